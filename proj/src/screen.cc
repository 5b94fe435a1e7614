#include "screenforge/screen.h"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "screenforge/error.h"
#include "screenforge/ingest.h"
#include "screenforge/pdenet.h"
#include "screenforge/similarity.h"
#include "screenforge/smiles.h"
#include "screenforge/util.h"

namespace screenforge {

namespace {

std::string model_summary(const MlpModel& m) {
  std::string layers;
  for (std::size_t i = 0; i < m.layer_sizes.size(); ++i) {
    layers += (i ? "-" : "") + std::to_string(m.layer_sizes[i]);
  }
  return fmt::format("{}(layers={},activation={},features={},seed={},epochs={},lr={},batch={})", m.target, layers,
                     activation_name(m.activation), m.features.fingerprint.descriptor(), m.meta.seed,
                     m.meta.epochs, m.meta.learning_rate, m.meta.batch_size);
}

struct Scored {
  ReportRow row;
  FingerprintVector fp;
  double score = 0.0;
};

}  // namespace

ScreeningReport run_screen(const std::vector<DatasetRecord>& library, const std::vector<MlpModel>& models,
                           const std::optional<Hypothesis>& hypothesis, const ScreenConfig& cfg) {
  if (models.empty() && !hypothesis) {
    throw Error(Errc::kInvalidConfig, "screening needs at least one model or a hypothesis");
  }
  if (cfg.clusters < 1 || cfg.picks < 1 || cfg.picks > cfg.clusters) {
    throw Error(Errc::kInvalidConfig, "need 1 <= picks <= clusters");
  }
  cfg.fingerprint.validate();

  ScreeningReport report;
  for (const auto& m : models) report.targets.push_back(m.target);
  report.has_fit = hypothesis.has_value();

  std::vector<Scored> actives;
  int skipped = 0;
  for (const auto& rec : library) {
    try {
      const std::string& smiles = rec.canonical_smiles.empty() ? rec.smiles : rec.canonical_smiles;
      Molecule mol = parse_smiles(smiles);
      Molecule main = largest_fragment(mol);
      DescriptorSet d = compute_descriptors(mol);
      Scored s{ReportRow{}, circular_fingerprint(mol, cfg.fingerprint), 0.0};
      ReportRow& row = s.row;
      row.id = rec.id;
      row.name = rec.name.value_or("");
      row.canonical_smiles = canonical_smiles(mol);
      row.formula = molecular_formula(main);
      row.mw = d.mw;
      row.admet = admet_flags(d);
      row.class_label = rec.class_label;
      bool active = true;
      double total = 0.0;
      for (const auto& m : models) {
        double p = predict_pic50(m, mol);
        row.pic50[m.target] = p;
        total += p;
        active = active && p > cfg.threshold;
      }
      if (hypothesis) {
        double f = fit_value(*hypothesis, mol);
        row.fit = f;
        active = active && hypothesis->predict(f) > cfg.threshold;
      }
      s.score = models.empty() ? *row.fit : total / static_cast<double>(models.size());
      row.active = active;
      if (active) actives.push_back(std::move(s));
    } catch (const Error& e) {
      ++skipped;
      log_warning("skipping " + rec.id + ": " + e.what());
    }
  }

  std::stable_sort(actives.begin(), actives.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.row.id < b.row.id;
  });

  const int n = static_cast<int>(actives.size());
  const int k = std::min(cfg.clusters, n);
  const int p = std::min(cfg.picks, k);
  if (n == 1) {
    actives[0].row.cluster_id = 0;
    actives[0].row.representative = true;
  } else if (n > 1) {
    std::vector<FingerprintVector> fps;
    for (const auto& s : actives) fps.push_back(s.fp);
    FunnelResult funnel = diversity_funnel(distance_matrix(fps).distances(), cfg.linkage, k, p);
    for (int i = 0; i < n; ++i) actives[i].row.cluster_id = funnel.clusters.labels[i];
    for (int i : funnel.picks) actives[i].row.representative = true;
  }
  if (k < cfg.clusters && n > 0) {
    log_warning(fmt::format("only {} actives; clustering into {} instead of {}", n, k, cfg.clusters));
  }

  std::string model_text;
  for (const auto& m : models) model_text += (model_text.empty() ? "" : ";") + model_summary(m);
  auto& h = report.header;
  h.emplace_back("toolchain", "screenforge " + std::string(library_version()));
  h.emplace_back("seed", std::to_string(cfg.seed));
  h.emplace_back("library", cfg.library);
  h.emplace_back("library_records", std::to_string(library.size()));
  h.emplace_back("skipped", std::to_string(skipped));
  h.emplace_back("models", model_text.empty() ? "none" : model_text);
  h.emplace_back("hypothesis", hypothesis ? fmt::format("seed={},features={},delta={:.4f},slope={:.6f},intercept={:.6f}",
                                                        hypothesis->seed_id, hypothesis->features.size(),
                                                        hypothesis->costs.delta(), hypothesis->slope,
                                                        hypothesis->intercept)
                                          : "none");
  h.emplace_back("gate", fmt::format("pIC50 > {} for every model{}", cfg.threshold,
                                     hypothesis ? " and the hypothesis" : ""));
  h.emplace_back("threshold", fmt::format("{}", cfg.threshold));
  h.emplace_back("fingerprint", cfg.fingerprint.descriptor());
  h.emplace_back("linkage", std::string(linkage_name(cfg.linkage)));
  h.emplace_back("clusters_requested", std::to_string(cfg.clusters));
  h.emplace_back("picks_requested", std::to_string(cfg.picks));
  h.emplace_back("actives", std::to_string(n));
  h.emplace_back("clusters", std::to_string(k));
  h.emplace_back("picks", std::to_string(p));
  h.emplace_back("sort", models.empty() ? "fit desc, id asc" : "mean pIC50 desc, id asc");

  for (auto& s : actives) report.rows.push_back(std::move(s.row));
  return report;
}

RouteComparison compare_routes(const std::vector<DatasetRecord>& a, const std::vector<DatasetRecord>& b,
                               double cutoff, const FingerprintConfig& cfg) {
  if (a.empty() || b.empty()) throw Error(Errc::kInvalidConfig, "both compound sets must be non-empty");
  auto prepare = [&](const std::vector<DatasetRecord>& set, std::vector<std::string>& ids,
                     std::vector<std::string>& smiles, std::vector<FingerprintVector>& fps) {
    for (const auto& r : set) {
      Molecule m = parse_smiles(r.canonical_smiles.empty() ? r.smiles : r.canonical_smiles);
      ids.push_back(r.id);
      smiles.push_back(canonical_smiles(m));
      fps.push_back(circular_fingerprint(m, cfg));
    }
  };
  RouteComparison out;
  out.cutoff = cutoff;
  std::vector<std::string> sa, sb;
  std::vector<FingerprintVector> fa, fb;
  prepare(a, out.ids_a, sa, fa);
  prepare(b, out.ids_b, sb, fb);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    std::vector<double> t, s;
    for (std::size_t j = 0; j < fb.size(); ++j) {
      t.push_back(tanimoto(fa[i], fb[j]));
      s.push_back(string_similarity(sa[i], sb[j]));
    }
    RouteRow row;
    row.id = out.ids_a[i];
    row.max_tanimoto = *std::max_element(t.begin(), t.end());
    row.mean_tanimoto = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
    row.max_string = *std::max_element(s.begin(), s.end());
    row.mean_string = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    if (row.max_tanimoto >= cutoff) ++out.overlap;
    out.rows.push_back(row);
    out.tanimoto.push_back(std::move(t));
    out.string.push_back(std::move(s));
  }
  return out;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "md" || name == "markdown") return ReportFormat::kMarkdown;
  throw Error(Errc::kInvalidConfig, "unknown report format: " + std::string(name));
}

ReportLayout parse_report_layout(std::string_view name) {
  if (name == "full") return ReportLayout::kFull;
  if (name == "forecast") return ReportLayout::kForecast;
  if (name == "compounds") return ReportLayout::kCompounds;
  throw Error(Errc::kInvalidConfig, "unknown report layout: " + std::string(name));
}

std::string emit_report(const ScreeningReport& report, ReportFormat format, ReportLayout layout) {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> cells;
  auto yes_no = [](bool v) { return std::string(v ? "Yes" : "No"); };
  auto num = [](double v) { return fmt::format("{:.2f}", v); };

  switch (layout) {
    case ReportLayout::kFull:
      columns = {"id", "name", "canonical_smiles", "formula", "mw"};
      for (const auto& t : report.targets) columns.push_back(t + " pIC50");
      if (report.has_fit) columns.push_back("fit");
      for (const char* c : {"active", "cluster_id", "representative", "class", "gi_absorption", "bbb_permeant",
                            "pgp_substrate", "bioavailability"}) {
        columns.emplace_back(c);
      }
      break;
    case ReportLayout::kForecast:
      columns = {"Compound ID"};
      for (const auto& t : report.targets) columns.push_back(t + " pIC50");
      if (report.has_fit) columns.push_back("Fit");
      break;
    case ReportLayout::kCompounds:
      columns = {"Name (En)", "MW (g/mol)", "Formula"};
      break;
  }

  for (const auto& r : report.rows) {
    if (layout != ReportLayout::kFull && !r.representative) continue;
    std::vector<std::string> c;
    auto pic50s = [&] {
      for (const auto& t : report.targets) {
        auto it = r.pic50.find(t);
        c.push_back(it == r.pic50.end() ? "" : num(it->second));
      }
      if (report.has_fit) c.push_back(r.fit ? num(*r.fit) : "");
    };
    switch (layout) {
      case ReportLayout::kFull:
        c = {r.id, r.name, r.canonical_smiles, r.formula, num(r.mw)};
        pic50s();
        c.push_back(yes_no(r.active));
        c.push_back(r.cluster_id ? std::to_string(*r.cluster_id) : "");
        c.push_back(yes_no(r.representative));
        c.push_back(r.class_label.value_or(""));
        c.push_back(r.admet.gi_high ? "High" : "Low");
        c.push_back(yes_no(r.admet.bbb_permeant));
        c.push_back(yes_no(r.admet.pgp_substrate));
        c.push_back(num(r.admet.bioavailability));
        break;
      case ReportLayout::kForecast:
        c = {r.id};
        pic50s();
        break;
      case ReportLayout::kCompounds:
        c = {r.name.empty() ? r.id : r.name, num(r.mw), r.formula};
        break;
    }
    cells.push_back(std::move(c));
  }

  std::string out;
  if (format == ReportFormat::kCsv) {
    for (const auto& [k, v] : report.header) out += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_field(columns[i]);
    out += "\n";
    for (const auto& row : cells) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
      out += "\n";
    }
    return out;
  }

  auto md = [](std::string s) {
    std::string o;
    for (char ch : s) {
      if (ch == '|') o += '\\';
      o += ch;
    }
    return o;
  };
  for (const auto& [k, v] : report.header) out += "- " + k + ": " + md(v) + "\n";
  if (!report.header.empty()) out += "\n";
  out += "|";
  for (const auto& c : columns) out += " " + md(c) + " |";
  out += "\n|";
  for (std::size_t i = 0; i < columns.size(); ++i) out += " --- |";
  out += "\n";
  for (const auto& row : cells) {
    out += "|";
    for (const auto& c : row) out += " " + md(c) + " |";
    out += "\n";
  }
  return out;
}

void write_report(const ScreeningReport& report, const std::filesystem::path& path, ReportFormat format,
                  ReportLayout layout) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  out << emit_report(report, format, layout);
  if (!out) throw Error(Errc::kIo, "write failed: " + path.string());
}

}  // namespace screenforge
