#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "doomsday/distributions.hpp"
#include "doomsday/fermi.hpp"
#include "doomsday/population_data.hpp"
#include "doomsday/posterior_engine.hpp"

namespace doomsday {

/// Shortest representation that round-trips to the same double.
std::string format_number(double x);

nlohmann::json to_json(const DistributionSpec& spec);
nlohmann::json to_json(const fermi::ModelReport& report);
nlohmann::json to_json(const EmpiricalMedians& medians);
nlohmann::json to_json(const NeutralityReport& report);

/// normalization, median and the 5/50/95% quantiles.
nlohmann::json posterior_summary(const TabulatedPosterior& posterior);

/// `# {header}` line followed by `N,density` rows from the support start.
/// `header` is merged with the posterior summary.
void write_posterior_csv(std::ostream& out, const TabulatedPosterior& posterior, nlohmann::json header,
                         const std::string& axis = "N");

/// n,pdf_true,pdf_size_biased with markers and outside mass in the header.
void write_curves_csv(std::ostream& out, const fermi::Curves& curves, nlohmann::json header);

/// A single comment line carrying compact JSON.
void write_comment_header(std::ostream& out, const nlohmann::json& header);

}  // namespace doomsday
