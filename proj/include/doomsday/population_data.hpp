#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace doomsday {

struct PopulationEntry {
  std::string name;
  std::uint64_t population = 0;
};

/// Order-preserving list of groups with a positive total population.
class PopulationTable {
 public:
  explicit PopulationTable(std::vector<PopulationEntry> entries);

  const std::vector<PopulationEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::uint64_t total() const noexcept { return total_; }
  /// 1-based rank by descending population (ties keep file order).
  std::optional<std::size_t> rank_of(const std::string& name) const;

 private:
  std::vector<PopulationEntry> entries_;
  std::uint64_t total_ = 0;
};

/// Reads `name,population` CSV. Leading '#' lines are provenance comments;
/// names may be double-quoted. Malformed rows throw ParseError with the line.
PopulationTable load_table(std::istream& in);
PopulationTable load_table(const std::filesystem::path& path);

struct EmpiricalMedians {
  std::uint64_t m_group = 0;       ///< lower median of the group populations
  std::uint64_t m_individual = 0;  ///< smallest P with half the people in groups <= P
};

EmpiricalMedians empirical_medians(const PopulationTable& table);

/// Share of individuals living in groups with low < population <= high.
double fraction_between(const PopulationTable& table, double low, double high);

/// Individuals binned at the two medians. Counts are exact and sum to the
/// table total.
struct NeutralityReport {
  EmpiricalMedians medians;
  std::uint64_t at_or_below_group = 0;
  std::uint64_t between = 0;
  std::uint64_t above_individual = 0;
  std::uint64_t total = 0;

  double p_low() const { return static_cast<double>(at_or_below_group) / static_cast<double>(total); }
  double p_central() const { return static_cast<double>(between) / static_cast<double>(total); }
  double p_high() const { return static_cast<double>(above_individual) / static_cast<double>(total); }
};

NeutralityReport neutrality_report(const PopulationTable& table);

}  // namespace doomsday
