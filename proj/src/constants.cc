#include "screenforge/constants.h"

#include <fstream>
#include <sstream>

#include "screenforge/error.h"

namespace screenforge {
namespace internal {
extern const std::string_view kDefaultConstantsText;
}  // namespace internal

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

const ConstantsTable& ConstantsTable::defaults() {
  static const ConstantsTable table = parse(internal::kDefaultConstantsText);
  return table;
}

ConstantsTable ConstantsTable::parse(std::string_view text) {
  ConstantsTable table;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::kFormat, "constants line " + std::to_string(line_no) +
                                     ": expected key = value");
    }
    std::string_view key = trim(line.substr(0, eq));
    std::string value_text(trim(line.substr(eq + 1)));
    double value = 0.0;
    std::size_t used = 0;
    try {
      value = std::stod(value_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (key.empty() || used == 0 || used != value_text.size()) {
      throw Error(Errc::kFormat, "constants line " + std::to_string(line_no) +
                                     ": invalid entry");
    }
    table.values_[std::string(key)] = value;
  }
  auto version = table.find("format_version");
  if (!version) throw Error(Errc::kFormat, "constants table lacks format_version");
  if (*version != kFormatVersion) {
    throw Error(Errc::kFormat, "unsupported constants format_version");
  }
  return table;
}

ConstantsTable ConstantsTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

ConstantsTable ConstantsTable::merged(const ConstantsTable& overrides) const {
  ConstantsTable out = *this;
  for (const auto& [k, v] : overrides.values_) out.values_[k] = v;
  return out;
}

std::optional<double> ConstantsTable::find(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double ConstantsTable::get(std::string_view key) const {
  auto v = find(key);
  if (!v) throw Error(Errc::kFormat, "missing constant " + std::string(key));
  return *v;
}

}  // namespace screenforge
