#include "doomsday/population_data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>

#include "doomsday/error.hpp"

namespace doomsday {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV record into fields, honouring double quotes ("" escapes).
std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      if (!trim(cur).empty()) throw ParseError("stray quote", line_no);
      cur.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote", line_no);
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

}  // namespace

PopulationTable::PopulationTable(std::vector<PopulationEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw InvalidParameter("population table is empty");
  for (const auto& e : entries_) {
    if (e.population > UINT64_MAX - total_) throw InvalidParameter("population total overflows");
    total_ += e.population;
  }
  if (total_ == 0) throw InvalidParameter("population table has zero total population");
}

std::optional<std::size_t> PopulationTable::rank_of(const std::string& name) const {
  const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.name == name; });
  if (it == entries_.end()) return std::nullopt;
  const auto self = static_cast<std::size_t>(it - entries_.begin());
  std::size_t rank = 1;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i == self) continue;
    if (entries_[i].population > it->population || (entries_[i].population == it->population && i < self)) ++rank;
  }
  return rank;
}

PopulationTable load_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<PopulationEntry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    if (!header_seen) {
      if (stripped[0] == '#') continue;
      const auto fields = split_record(line, line_no);
      if (fields.size() != 2 || fields[0] != "name" || fields[1] != "population")
        throw ParseError("expected header 'name,population'", line_no);
      header_seen = true;
      continue;
    }
    const auto fields = split_record(line, line_no);
    if (fields.size() != 2) throw ParseError("expected 2 fields, found " + std::to_string(fields.size()), line_no);
    if (fields[0].empty()) throw ParseError("empty name", line_no);
    const std::string& pop = fields[1];
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(pop.data(), pop.data() + pop.size(), value);
    if (pop.empty() || ec != std::errc{} || ptr != pop.data() + pop.size())
      throw ParseError("population '" + pop + "' is not a nonnegative integer", line_no);
    entries.push_back({fields[0], value});
  }
  if (!header_seen) throw ParseError("missing header 'name,population'", line_no);
  if (entries.empty()) throw ParseError("table has no rows", line_no);
  return PopulationTable(std::move(entries));
}

PopulationTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open population table " + path.string());
  return load_table(in);
}

EmpiricalMedians empirical_medians(const PopulationTable& table) {
  std::vector<std::uint64_t> pops;
  pops.reserve(table.size());
  for (const auto& e : table.entries()) pops.push_back(e.population);
  std::sort(pops.begin(), pops.end());

  EmpiricalMedians m;
  m.m_group = pops[(pops.size() - 1) / 2];
  const unsigned __int128 total = table.total();
  unsigned __int128 cumulative = 0;
  for (std::uint64_t p : pops) {
    cumulative += p;
    if (2 * cumulative >= total) {
      m.m_individual = p;
      break;
    }
  }
  return m;
}

double fraction_between(const PopulationTable& table, double low, double high) {
  if (!(low < high)) throw InvalidParameter("fraction_between needs low < high");
  std::uint64_t inside = 0;
  for (const auto& e : table.entries()) {
    const auto p = static_cast<double>(e.population);
    if (p > low && p <= high) inside += e.population;
  }
  return static_cast<double>(inside) / static_cast<double>(table.total());
}

NeutralityReport neutrality_report(const PopulationTable& table) {
  NeutralityReport r;
  r.medians = empirical_medians(table);
  r.total = table.total();
  for (const auto& e : table.entries()) {
    if (e.population <= r.medians.m_group)
      r.at_or_below_group += e.population;
    else if (e.population <= r.medians.m_individual)
      r.between += e.population;
    else
      r.above_individual += e.population;
  }
  return r;
}

}  // namespace doomsday
