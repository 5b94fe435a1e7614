#ifndef SCREENFORGE_INGEST_H_
#define SCREENFORGE_INGEST_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "screenforge/dataset.h"

namespace screenforge {

enum class LibraryFormat { kSmi, kCsv };

// Column roles understood by csv ingestion.
inline constexpr std::string_view kColumnRoles[] = {"id", "name", "smiles", "ic50_nm", "pic50", "class", "target"};

struct LibrarySource {
  std::filesystem::path path;
  LibraryFormat format = LibraryFormat::kSmi;
  // role -> header name. Roles left out are matched to a header of the
  // same name (case-insensitive) when present.
  std::map<std::string, std::string> column_map;

  // Format from the extension: .csv is csv, everything else smi.
  static LibrarySource from_path(const std::filesystem::path& path);
};

struct IngestStats {
  int read = 0;
  int parsed = 0;
  int parse_errors = 0;
  int duplicates_removed = 0;
};

struct IngestResult {
  std::vector<DatasetRecord> records;
  IngestStats stats;
  std::vector<std::string> errors;  // "line N: message"
};

// Row-level problems are collected in errors; unreadable files throw
// Error(kIo) and a csv without a smiles column throws Error(kFormat).
// Duplicates (same canonical SMILES) keep the first occurrence.
IngestResult ingest(const LibrarySource& source);
IngestResult ingest_text(std::string_view text, LibraryFormat format,
                         const std::map<std::string, std::string>& column_map = {});

// Active / inactive counts over records with an activity value; records
// carrying an explicit flag use it, others compare pIC50 >= kActiveLabelPic50.
struct DatasetSummary {
  int total = 0;
  int active = 0;
  int inactive = 0;
  int unlabeled = 0;
};
DatasetSummary summarize_dataset(const std::vector<DatasetRecord>& records);

// Splits one csv line; supports quoted fields with doubled quotes.
std::vector<std::string> split_csv_line(std::string_view line);
// Quotes a field when it holds a comma, quote or newline.
std::string csv_field(std::string_view value);

}  // namespace screenforge

#endif  // SCREENFORGE_INGEST_H_
