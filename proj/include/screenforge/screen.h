#ifndef SCREENFORGE_SCREEN_H_
#define SCREENFORGE_SCREEN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "screenforge/cluster.h"
#include "screenforge/dataset.h"
#include "screenforge/descriptors.h"
#include "screenforge/fingerprint.h"
#include "screenforge/mlp.h"
#include "screenforge/pharmacophore.h"

namespace screenforge {

struct ScreenConfig {
  int clusters = 34;
  int picks = 16;
  Linkage linkage = Linkage::kAverage;
  double threshold = kActivityGate;
  std::uint64_t seed = 0;
  FingerprintConfig fingerprint;  // used for clustering the actives
  std::string library;            // source name recorded in the header
};

struct ReportRow {
  std::string id;
  std::string name;
  std::string canonical_smiles;
  std::string formula;
  double mw = 0.0;
  std::optional<double> fit;
  std::map<std::string, double> pic50;  // target -> prediction
  std::optional<int> cluster_id;
  bool representative = false;
  AdmetFlags admet;
  bool active = false;
  std::optional<std::string> class_label;
};

struct ScreeningReport {
  // Ordered key/value provenance; written as "# key: value" lines.
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::string> targets;  // one pIC50 column each, model order
  bool has_fit = false;
  std::vector<ReportRow> rows;       // actives, sorted by score desc, id asc
};

// Scores every record with each model (and the hypothesis when given),
// keeps records that clear the threshold under all of them, clusters those
// actives' fingerprints into min(clusters, actives) groups and flags the
// medoids of the `picks` largest clusters. Rows sort by the mean predicted
// pIC50 (or the fit when there are no models), descending, ties by id.
// Error(kInvalidConfig) when neither models nor a hypothesis are supplied
// or picks exceeds clusters. An empty active set returns a report with no
// rows; callers decide how to signal it.
ScreeningReport run_screen(const std::vector<DatasetRecord>& library, const std::vector<MlpModel>& models,
                           const std::optional<Hypothesis>& hypothesis, const ScreenConfig& cfg);

struct RouteRow {
  std::string id;
  double max_tanimoto = 0.0;
  double mean_tanimoto = 0.0;
  double max_string = 0.0;
  double mean_string = 0.0;
};

struct RouteComparison {
  std::vector<std::string> ids_a;
  std::vector<std::string> ids_b;
  std::vector<std::vector<double>> tanimoto;  // |a| x |b|
  std::vector<std::vector<double>> string;    // canonical SMILES LCS ratio
  std::vector<RouteRow> rows;                 // one per member of a
  double cutoff = 0.85;
  int overlap = 0;  // members of a whose best Tanimoto reaches the cutoff
};

// Cross-similarity between two compound sets (both non-empty).
RouteComparison compare_routes(const std::vector<DatasetRecord>& a, const std::vector<DatasetRecord>& b,
                               double cutoff = 0.85, const FingerprintConfig& cfg = {});

enum class ReportFormat { kCsv, kMarkdown };
// full: every column; forecast: Compound ID plus one pIC50 column per
// target; compounds: Name (En), MW (g/mol), Formula. The last two list the
// representative rows only.
enum class ReportLayout { kFull, kForecast, kCompounds };

ReportFormat parse_report_format(std::string_view name);
ReportLayout parse_report_layout(std::string_view name);

std::string emit_report(const ScreeningReport& report, ReportFormat format,
                        ReportLayout layout = ReportLayout::kFull);
void write_report(const ScreeningReport& report, const std::filesystem::path& path, ReportFormat format,
                  ReportLayout layout = ReportLayout::kFull);

}  // namespace screenforge

#endif  // SCREENFORGE_SCREEN_H_
