#include "doomsday/serialization.hpp"

#include <ostream>
#include <variant>

#include <fmt/format.h>

namespace doomsday {

std::string format_number(double x) { return fmt::format("{}", x); }

namespace {

nlohmann::json lognormal_json(const Lognormal& l) { return {{"mu_log", l.mu_log}, {"sigma", l.sigma}}; }

}  // namespace

nlohmann::json to_json(const DistributionSpec& spec) {
  nlohmann::json j{{"family", spec.family_name()}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Pareto>) {
          j["alpha"] = p.alpha;
          j["n_min"] = p.n_min;
        } else if constexpr (std::is_same_v<T, Lognormal>) {
          j["mu_log"] = p.mu_log;
          j["sigma"] = p.sigma;
        } else {
          j["weight"] = p.weight;
          j["first"] = lognormal_json(p.first);
          j["second"] = lognormal_json(p.second);
        }
      },
      spec.params());
  return j;
}

nlohmann::json to_json(const fermi::ModelReport& report) {
  return {{"spec", to_json(report.spec)},
          {"m_group", report.m_group},
          {"m_individual", report.m_individual},
          {"ratio", report.m_individual / report.m_group},
          {"frac_exceeding", report.frac_exceeding}};
}

nlohmann::json to_json(const EmpiricalMedians& medians) {
  return {{"m_group", medians.m_group}, {"m_individual", medians.m_individual}};
}

nlohmann::json to_json(const NeutralityReport& report) {
  return {{"medians", to_json(report.medians)},
          {"total", report.total},
          {"counts",
           {{"at_or_below_group", report.at_or_below_group},
            {"between", report.between},
            {"above_individual", report.above_individual}}},
          {"shares", {{"low", report.p_low()}, {"central", report.p_central()}, {"high", report.p_high()}}}};
}

nlohmann::json posterior_summary(const TabulatedPosterior& posterior) {
  return {{"normalization", posterior.quadrature_mass()},
          {"median", posterior.median()},
          {"quantiles",
           {{"0.05", posterior.quantile(0.05)}, {"0.5", posterior.median()}, {"0.95", posterior.quantile(0.95)}}},
          {"support_min", posterior.support_min()},
          {"upper_tail_mass", posterior.upper_mass()}};
}

void write_comment_header(std::ostream& out, const nlohmann::json& header) { out << "# " << header.dump() << '\n'; }

void write_posterior_csv(std::ostream& out, const TabulatedPosterior& posterior, nlohmann::json header,
                         const std::string& axis) {
  header.update(posterior_summary(posterior));
  write_comment_header(out, header);
  out << axis << ",density\n";
  auto grid = posterior.grid();
  auto density = posterior.density();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < posterior.support_min()) continue;
    out << format_number(grid[i]) << ',' << format_number(density[i]) << '\n';
  }
}

void write_curves_csv(std::ostream& out, const fermi::Curves& curves, nlohmann::json header) {
  header["m_group"] = curves.m_group;
  header["m_individual"] = curves.m_individual;
  header["true_outside_mass"] = curves.true_outside_mass;
  header["biased_outside_mass"] = curves.biased_outside_mass;
  write_comment_header(out, header);
  out << "n,pdf_true,pdf_size_biased\n";
  for (std::size_t i = 0; i < curves.n.size(); ++i) {
    out << format_number(curves.n[i]) << ',' << format_number(curves.pdf_true[i]) << ','
        << format_number(curves.pdf_size_biased[i]) << '\n';
  }
}

}  // namespace doomsday
