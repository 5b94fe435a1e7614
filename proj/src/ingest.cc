#include "screenforge/ingest.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "screenforge/error.h"
#include "screenforge/smiles.h"

namespace screenforge {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw Error(Errc::kFormat, "invalid " + std::string(what) + " value '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    start = end + 1;
  }
  return out;
}

bool skippable(std::string_view line) {
  std::string_view t = trim(line);
  return t.empty() || t.front() == '#';
}

void finish(DatasetRecord& r, std::vector<DatasetRecord>& out, std::unordered_set<std::string>& seen,
            IngestStats& stats) {
  ++stats.parsed;
  if (!seen.insert(r.canonical_smiles).second) {
    ++stats.duplicates_removed;
    return;
  }
  out.push_back(std::move(r));
}

}  // namespace

LibrarySource LibrarySource::from_path(const std::filesystem::path& path) {
  LibrarySource s;
  s.path = path;
  s.format = lower(path.extension().string()) == ".csv" ? LibraryFormat::kCsv : LibraryFormat::kSmi;
  return s;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(Errc::kFormat, "unterminated quoted field");
  out.push_back(std::move(cur));
  return out;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

IngestResult ingest_text(std::string_view text, LibraryFormat format,
                         const std::map<std::string, std::string>& column_map) {
  IngestResult res;
  std::unordered_set<std::string> seen;
  const auto lines = lines_of(text);

  if (format == LibraryFormat::kSmi) {
    for (std::size_t n = 0; n < lines.size(); ++n) {
      if (skippable(lines[n])) continue;
      ++res.stats.read;
      std::istringstream fields{lines[n]};
      DatasetRecord r;
      fields >> r.smiles >> r.id;
      std::string rest;
      std::getline(fields, rest);
      if (auto name = trim(rest); !name.empty()) r.name = std::string(name);
      if (r.id.empty()) r.id = "line" + std::to_string(n + 1);
      try {
        r.canonical_smiles = canonical_smiles(parse_smiles(r.smiles));
      } catch (const Error& e) {
        ++res.stats.parse_errors;
        res.errors.push_back("line " + std::to_string(n + 1) + ": " + e.what());
        continue;
      }
      finish(r, res.records, seen, res.stats);
    }
    return res;
  }

  std::size_t header_line = 0;
  while (header_line < lines.size() && skippable(lines[header_line])) ++header_line;
  if (header_line == lines.size()) throw Error(Errc::kFormat, "csv input has no header row");
  const auto header = split_csv_line(lines[header_line]);
  std::map<std::string, int> column;  // role -> index
  for (std::string_view role : kColumnRoles) {
    auto mapped = column_map.find(std::string(role));
    const std::string wanted = lower(mapped != column_map.end() ? mapped->second : std::string(role));
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (lower(trim(header[c])) == wanted) {
        column[std::string(role)] = static_cast<int>(c);
        break;
      }
    }
    if (mapped != column_map.end() && !column.count(std::string(role))) {
      throw Error(Errc::kFormat, "csv has no column '" + mapped->second + "' for role " + std::string(role));
    }
  }
  for (const auto& [role, name] : column_map) {
    if (std::find(std::begin(kColumnRoles), std::end(kColumnRoles), role) == std::end(kColumnRoles)) {
      throw Error(Errc::kInvalidConfig, "unknown column role: " + role);
    }
  }
  if (!column.count("smiles")) throw Error(Errc::kFormat, "csv input needs a smiles column");

  for (std::size_t n = header_line + 1; n < lines.size(); ++n) {
    if (skippable(lines[n])) continue;
    ++res.stats.read;
    try {
      const auto fields = split_csv_line(lines[n]);
      auto get = [&](const char* role) -> std::string {
        auto it = column.find(role);
        if (it == column.end() || it->second >= static_cast<int>(fields.size())) return "";
        return std::string(trim(fields[it->second]));
      };
      DatasetRecord r;
      r.smiles = get("smiles");
      r.id = get("id");
      if (r.id.empty()) r.id = "line" + std::to_string(n + 1);
      if (auto name = get("name"); !name.empty()) r.name = name;
      if (auto cls = get("class"); !cls.empty()) r.class_label = cls;
      if (auto t = get("target"); !t.empty()) r.target = parse_target(t);
      if (auto ic = get("ic50_nm"); !ic.empty()) {
        r.ic50_nm = parse_number(ic, "ic50_nm");
        r.pic50 = ic50_to_pic50(*r.ic50_nm);
      }
      if (auto p = get("pic50"); !p.empty()) {
        double v = parse_number(p, "pic50");
        if (r.ic50_nm && std::abs(v - *r.pic50) > 1e-6) {
          throw Error(Errc::kInconsistentActivity, "pic50 disagrees with ic50_nm");
        }
        r.pic50 = v;
      }
      r.canonical_smiles = canonical_smiles(parse_smiles(r.smiles));
      finish(r, res.records, seen, res.stats);
    } catch (const Error& e) {
      ++res.stats.parse_errors;
      res.errors.push_back("line " + std::to_string(n + 1) + ": " + e.what());
    }
  }
  return res;
}

IngestResult ingest(const LibrarySource& source) {
  std::ifstream in(source.path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read " + source.path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ingest_text(ss.str(), source.format, source.column_map);
}

DatasetSummary summarize_dataset(const std::vector<DatasetRecord>& records) {
  DatasetSummary s;
  for (const auto& r : records) {
    ++s.total;
    std::optional<bool> active = r.active;
    if (!active) {
      if (auto p = r.activity()) active = *p >= kActiveLabelPic50;
    }
    if (!active) {
      ++s.unlabeled;
    } else if (*active) {
      ++s.active;
    } else {
      ++s.inactive;
    }
  }
  return s;
}

}  // namespace screenforge
