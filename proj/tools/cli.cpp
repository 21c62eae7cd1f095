#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "doomsday/error.hpp"
#include "doomsday/fermi.hpp"
#include "doomsday/forecast.hpp"
#include "doomsday/population_data.hpp"
#include "doomsday/posterior_engine.hpp"
#include "doomsday/serialization.hpp"
#include "doomsday/urn_ensemble.hpp"

#ifndef DOOMSDAY_DEFAULT_DATA_DIR
#define DOOMSDAY_DEFAULT_DATA_DIR "data"
#endif

namespace doomsday::cli {

using nlohmann::json;

namespace {

struct IoError : Error {
  explicit IoError(const std::string& m) : Error("IoError", m) {}
};

struct Common {
  std::string format = "csv";
  std::string output;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--output", common.output, "Write the report to this file instead of stdout");
}

// Counts given as doubles ("1e6") must be exact nonnegative integers.
std::uint64_t as_count(double x, const char* what) {
  if (!(x >= 0.0) || x > 9.0e18 || std::floor(x) != x)
    throw InvalidParameter(fmt::format("{} must be a nonnegative integer, got {}", what, x));
  return static_cast<std::uint64_t>(x);
}

std::string num(double x) { return format_number(x); }

// "0.002" -> "p_h0002"
std::string hazard_column(double h) {
  std::string s = format_number(h);
  s.erase(std::remove(s.begin(), s.end(), '.'), s.end());
  return "p_h" + s;
}

UrnEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ensemble file " + path.string());
  return read_ensemble(in);
}

json config_json(const CLI::App* sub) {
  json j{{"command", sub->get_name()}};
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_lnames().empty()) continue;
    const std::string key = opt->get_lnames().front();
    const auto& results = opt->results();
    if (opt->get_type_size() == 0) {
      j[key] = opt->count() > 0;
    } else if (results.size() == 1) {
      j[key] = results.front();
    } else if (!results.empty()) {
      j[key] = results;
    } else if (!opt->get_default_str().empty()) {
      j[key] = opt->get_default_str();
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// urn
// ---------------------------------------------------------------------------

struct UrnArgs {
  std::vector<std::string> candidates;
  double rank = 3;
  double trials = 1e6;
  std::uint64_t seed = 2016;
  unsigned workers = 1;
  bool scan = false;
  double total = 1e6;
  double mu_max = 100;
};

void cmd_urn(const UrnArgs& a, const Common& common, const json& config, std::ostream& out) {
  const std::uint64_t r = as_count(a.rank, "--rank");
  if (r < 1) throw InvalidParameter("--rank must be at least 1");

  if (a.scan) {
    const std::uint64_t total = as_count(a.total, "--total");
    const std::uint64_t mu_max = as_count(a.mu_max, "--mu-max");
    std::vector<std::uint64_t> mus;
    for (std::uint64_t m = 1; m <= mu_max; ++m) mus.push_back(m);
    const auto scan = uniform_ensemble_scan(total, r, mus);
    if (common.format == "json") {
      json rows = json::array();
      for (const auto& p : scan)
        rows.push_back({{"mean_size", p.mean_size},
                        {"urns", p.urns},
                        {"likelihood", p.likelihood.to_string()},
                        {"likelihood_value", p.likelihood.to_double()},
                        {"relative", p.relative.to_double()}});
      out << json{{"config", config}, {"scan", rows}}.dump(2) << '\n';
      return;
    }
    write_comment_header(out, config);
    out << "mean_size,urns,likelihood,likelihood_value,relative\n";
    for (const auto& p : scan)
      out << p.mean_size << ',' << p.urns << ',' << p.likelihood.to_string() << ',' << num(p.likelihood.to_double())
          << ',' << num(p.relative.to_double()) << '\n';
    return;
  }

  std::vector<std::string> files = a.candidates;
  if (files.empty())
    for (const char* name : {"fig2_a.txt", "fig2_b.txt", "fig2_c.txt"}) files.push_back((data_dir() / "urns" / name).string());
  std::vector<EnsembleCandidate> candidates;
  for (const auto& f : files)
    candidates.push_back({load_ensemble(f), Rational{1}, std::filesystem::path(f).stem().string()});

  const auto posterior = candidate_posterior(candidates, r);
  std::optional<Rational> smallest;
  for (const auto& p : posterior)
    if (!p.is_zero() && (!smallest || p < *smallest)) smallest = p;

  const std::uint64_t trials = as_count(a.trials, "--trials");
  std::optional<MonteCarloResult> mc;
  if (trials > 0) mc = monte_carlo_oracle(candidates, r, a.seed, trials, a.workers);

  struct Row {
    std::string label;
    std::size_t urns;
    std::uint64_t total, m_r;
    Rational likelihood, posterior, odds;
    double mc = 0.0, mc_sigma = 0.0;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& e = candidates[i].ensemble;
    Row row{candidates[i].label, e.urns(), e.total(), e.urns_at_least(r), rank_likelihood(e, r), posterior[i],
            posterior[i] / *smallest};
    if (mc && mc->accepted > 0) {
      const double acc = static_cast<double>(mc->accepted);
      row.mc = static_cast<double>(mc->accepted_per_candidate[i]) / acc;
      row.mc_sigma = std::sqrt(row.mc * (1.0 - row.mc) / acc);
    }
    rows.push_back(row);
  }

  if (common.format == "json") {
    json items = json::array();
    for (const auto& row : rows) {
      json item{{"candidate", row.label},
                {"urns", row.urns},
                {"balls", row.total},
                {"m_r", row.m_r},
                {"likelihood", row.likelihood.to_string()},
                {"posterior", row.posterior.to_string()},
                {"posterior_value", row.posterior.to_double()},
                {"odds", row.odds.to_double()}};
      if (mc) {
        item["posterior_mc"] = row.mc;
        item["mc_sigma"] = row.mc_sigma;
      }
      items.push_back(item);
    }
    json source = json::object();
    for (const auto& [size, p] : source_urn_posterior(candidates, r)) source[std::to_string(size)] = p.to_string();
    json doc{{"config", config}, {"candidates", items}, {"source_urn_posterior", source}};
    if (mc) doc["monte_carlo"] = {{"trials", mc->trials}, {"accepted", mc->accepted}};
    out << doc.dump(2) << '\n';
    return;
  }

  json header = config;
  if (mc) header["monte_carlo"] = {{"trials", mc->trials}, {"accepted", mc->accepted}};
  write_comment_header(out, header);
  out << "candidate,urns,balls,m_r,likelihood,posterior,posterior_value,odds";
  if (mc) out << ",posterior_mc,mc_sigma";
  out << '\n';
  for (const auto& row : rows) {
    out << row.label << ',' << row.urns << ',' << row.total << ',' << row.m_r << ',' << row.likelihood.to_string()
        << ',' << row.posterior.to_string() << ',' << num(row.posterior.to_double()) << ','
        << fmt::format("{:.1f}", row.odds.to_double());
    if (mc) out << ',' << num(row.mc) << ',' << num(row.mc_sigma);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// posterior
// ---------------------------------------------------------------------------

struct PosteriorArgs {
  double rank = 1e11;
  std::string rank_prior = "exact";
  std::optional<double> rank_lo;
  std::optional<double> rank_hi;
  std::string over = "N";
  std::vector<double> cdf_at;
};

RankPrior make_rank_prior(const std::string& kind, double rank, std::optional<double> lo, std::optional<double> hi) {
  if (!(rank > 0.0) || !std::isfinite(rank)) throw InvalidParameter("--rank must be positive and finite");
  if (kind == "exact") return RankPrior::exact(rank);
  return RankPrior::log_uniform(lo.value_or(rank / 3.0), hi.value_or(rank * 3.0));
}

void cmd_posterior(const PosteriorArgs& a, const Common& common, const json& config, std::ostream& out) {
  if (a.rank_prior == "exact" && !(a.rank >= 1.0)) throw InvalidParameter("--rank must be at least 1");
  const RankPrior prior = make_rank_prior(a.rank_prior, a.rank, a.rank_lo, a.rank_hi);
  const TabulatedPosterior post = a.over == "N" ? rank_posterior(prior) : future_count_posterior(prior);

  json header = config;
  if (!a.cdf_at.empty()) {
    json points = json::array();
    for (double x : a.cdf_at) points.push_back({{"x", x}, {"cdf", post.cdf_at(x)}});
    header["cdf_at"] = points;
  }
  if (common.format == "json") {
    json doc{{"config", header}, {"summary", posterior_summary(post)}};
    json xs = json::array(), ds = json::array();
    for (std::size_t i = 0; i < post.grid().size(); ++i) {
      if (post.grid()[i] < post.support_min()) continue;
      xs.push_back(post.grid()[i]);
      ds.push_back(post.density()[i]);
    }
    doc[a.over] = xs;
    doc["density"] = ds;
    out << doc.dump(2) << '\n';
    return;
  }
  write_posterior_csv(out, post, header, a.over);
}

// ---------------------------------------------------------------------------
// forecast
// ---------------------------------------------------------------------------

struct ForecastArgs {
  double rank = 1e11;
  double rank_factor = 3.0;
  std::optional<double> rank_exact;
  double rate = 1.4e8;
  double epoch = 2016;
  std::vector<double> hazards{0.002, 0.0002};
  double until = 3016;
  double step = 1;
  std::string axis = "years";
  double milestone_year = 2100;
  double fit_until = 2100;
  std::size_t births_points = 601;
};

void cmd_forecast(const ForecastArgs& a, const Common& common, json config, std::ostream& out) {
  const RankPrior prior = a.rank_exact ? RankPrior::exact(*a.rank_exact) : RankPrior::around(a.rank, a.rank_factor);
  const BirthRateModel model{a.rate, a.epoch};
  model.validate();
  for (double h : a.hazards)
    if (!(h > 0.0 && h < 1.0)) throw InvalidParameter("--hazard must lie in (0, 1)");
  const YearRange range{a.epoch, a.until, a.step};
  if (!(a.milestone_year >= a.epoch) || !(a.fit_until > a.epoch))
    throw InvalidParameter("--milestone-year and --fit-until must not precede the epoch");
  const TabulatedPosterior births = future_count_posterior(prior);
  const ForecastCurve curve = extinction_curve(births, model, range);
  // Milestones come from a curve long enough to cover every requested year.
  const YearRange long_range{a.epoch, std::max({a.until, a.milestone_year, a.fit_until}), a.step};
  const ForecastCurve long_curve = extinction_curve(births, model, long_range);

  const double mile[] = {a.milestone_year};
  const Milestones m = milestones(long_curve, mile);
  const double p_mile = m.p_at.front().second;
  json milestones_json{{fmt::format("p_{}", num(a.milestone_year)), p_mile},
                       {"odds_against", (1.0 - p_mile) / p_mile},
                       {"median_year", m.median_year ? json(*m.median_year) : json(nullptr)},
                       {"median_births", births.median()},
                       {"fitted_hazard", hazard_fit_window(long_curve, a.epoch, a.fit_until)},
                       {"fit_window", {a.epoch, a.fit_until}}};
  json baselines = json::array();
  std::vector<ForecastCurve> hazard_curves;
  for (double h : a.hazards) {
    hazard_curves.push_back(constant_hazard_curve(h, model, range));
    const Milestones hm = milestones(constant_hazard_curve(h, model, long_range), mile);
    baselines.push_back({{"hazard", h},
                         {"column", hazard_column(h)},
                         {"p_milestone", hm.p_at.front().second},
                         {"median_year", hm.median_year ? json(*hm.median_year) : json(nullptr)}});
  }
  milestones_json["baselines"] = baselines;

  if (a.axis == "births") {
    const double center = std::sqrt(prior.lower() * prior.upper());
    if (a.births_points < 2) throw InvalidParameter("--births-points must be at least 2");
    std::vector<double> bs(a.births_points);
    for (std::size_t i = 0; i < bs.size(); ++i)
      bs[i] = center * std::pow(10.0, -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(bs.size() - 1));
    if (common.format == "json") {
      json cols{{"births", bs}};
      json dens = json::array(), cdfs = json::array();
      for (double b : bs) {
        dens.push_back(births.density_at(b));
        cdfs.push_back(births.cdf_at(b));
      }
      cols["density_doomsday"] = dens;
      cols["cdf_doomsday"] = cdfs;
      for (double h : a.hazards) {
        json hd = json::array(), hc = json::array();
        for (double b : bs) {
          hd.push_back(constant_hazard_births_density(h, model, b));
          hc.push_back(constant_hazard_births_cdf(h, model, b));
        }
        cols["density_" + hazard_column(h).substr(2)] = hd;
        cols["cdf_" + hazard_column(h).substr(2)] = hc;
      }
      out << json{{"config", config}, {"milestones", milestones_json}, {"columns", cols}}.dump(2) << '\n';
      return;
    }
    config["milestones"] = milestones_json;
    write_comment_header(out, config);
    out << "births,density_doomsday,cdf_doomsday";
    for (double h : a.hazards) out << ",density_" << hazard_column(h).substr(2) << ",cdf_" << hazard_column(h).substr(2);
    out << '\n';
    for (double b : bs) {
      out << num(b) << ',' << num(births.density_at(b)) << ',' << num(births.cdf_at(b));
      for (double h : a.hazards)
        out << ',' << num(constant_hazard_births_density(h, model, b)) << ','
            << num(constant_hazard_births_cdf(h, model, b));
      out << '\n';
    }
    return;
  }

  if (common.format == "json") {
    json cols{{"year", curve.years}, {"p_doomsday", curve.p_extinct}, {"hazard_doomsday", curve.hazard}};
    for (std::size_t k = 0; k < a.hazards.size(); ++k) cols[hazard_column(a.hazards[k])] = hazard_curves[k].p_extinct;
    out << json{{"config", config}, {"milestones", milestones_json}, {"columns", cols}}.dump(2) << '\n';
    return;
  }
  config["milestones"] = milestones_json;
  write_comment_header(out, config);
  out << "year,p_doomsday";
  for (double h : a.hazards) out << ',' << hazard_column(h);
  out << ",hazard_doomsday\n";
  for (std::size_t i = 0; i < curve.years.size(); ++i) {
    out << num(curve.years[i]) << ',' << num(curve.p_extinct[i]);
    for (const auto& hc : hazard_curves) out << ',' << num(hc.p_extinct[i]);
    out << ',' << num(curve.hazard[i]) << '\n';
  }
}

// ---------------------------------------------------------------------------
// fermi
// ---------------------------------------------------------------------------

struct FermiArgs {
  std::string model = "all";
  double target = fermi::kDefaultTarget;
  double n_min = fermi::kDefaultParetoNmin;
  double sigma = fermi::kDefaultLognormalSigma;
  fermi::BimodalShape shape;
  std::size_t points = 512;
  std::string output_dir;
};

void cmd_fermi(const FermiArgs& a, const Common& common, const json& config, std::ostream& out) {
  std::vector<std::string> models;
  if (a.model == "all")
    models = {"pareto", "lognormal", "bimodal"};
  else
    models = {a.model};

  std::vector<fermi::ModelReport> reports;
  for (const auto& name : models) {
    DistributionSpec spec = name == "pareto"      ? fermi::calibrate_pareto(a.n_min, a.target)
                            : name == "lognormal" ? fermi::calibrate_lognormal(a.sigma, a.target)
                                                  : fermi::calibrate_bimodal(a.shape, a.target);
    reports.push_back(fermi::report(spec));
  }

  if (!a.output_dir.empty()) {
    const std::filesystem::path dir(a.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    json all = json::array();
    for (const auto& rep : reports) {
      const std::string name = rep.spec.family_name();
      std::ofstream f(dir / ("fermi_" + name + ".csv"));
      if (!f) throw IoError("cannot write curves for " + name);
      json header = config;
      header["model"] = name;
      header["spec"] = to_json(rep.spec);
      write_curves_csv(f, fermi::curves(rep.spec, a.points), header);
      all.push_back(to_json(rep));
    }
    std::ofstream f(dir / "fermi_report.json");
    if (!f) throw IoError("cannot write fermi_report.json");
    f << json{{"config", config}, {"reports", all}}.dump(2) << '\n';
  }

  if (common.format == "json") {
    json all = json::array();
    for (const auto& rep : reports) all.push_back(to_json(rep));
    out << json{{"config", config}, {"reports", all}}.dump(2) << '\n';
    return;
  }
  write_comment_header(out, config);
  out << "model,parameters,m_group,m_individual,ratio,frac_exceeding\n";
  for (const auto& rep : reports) {
    std::string params = to_json(rep.spec).dump();
    std::string quoted = "\"";
    for (char c : params) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    quoted += '"';
    out << rep.spec.family_name() << ',' << quoted << ',' << num(rep.m_group) << ',' << num(rep.m_individual) << ','
        << num(rep.m_individual / rep.m_group) << ',' << num(rep.frac_exceeding) << '\n';
  }
}

// ---------------------------------------------------------------------------
// medians
// ---------------------------------------------------------------------------

struct MediansArgs {
  std::string table;
  std::vector<double> between;
};

void cmd_medians(const MediansArgs& a, const Common& common, const json& config, std::ostream& out) {
  const std::filesystem::path path = a.table.empty() ? data_dir() / "countries_2016.csv" : std::filesystem::path(a.table);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open population table " + path.string());
  const PopulationTable table = load_table(in);
  const NeutralityReport rep = neutrality_report(table);

  json doc = to_json(rep);
  doc["groups"] = table.size();
  if (!a.between.empty()) {
    if (a.between.size() != 2 || !(a.between[0] < a.between[1]))
      throw InvalidParameter("--between needs two increasing bounds");
    doc["between"] = {{"low", a.between[0]},
                      {"high", a.between[1]},
                      {"fraction", fraction_between(table, a.between[0], a.between[1])}};
  }
  if (common.format == "json") {
    out << json{{"config", config}, {"report", doc}}.dump(2) << '\n';
    return;
  }
  write_comment_header(out, config);
  out << "quantity,value\n";
  out << "groups," << table.size() << '\n';
  out << "total," << rep.total << '\n';
  out << "m_group," << rep.medians.m_group << '\n';
  out << "m_individual," << rep.medians.m_individual << '\n';
  out << "share_at_or_below_group," << num(rep.p_low()) << '\n';
  out << "share_between," << num(rep.p_central()) << '\n';
  out << "share_above_individual," << num(rep.p_high()) << '\n';
  if (doc.contains("between")) out << "fraction_between," << num(doc["between"]["fraction"].get<double>()) << '\n';
}

void write_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("DOOMSDAY_DATA_DIR"); env && *env) return env;
  return DOOMSDAY_DEFAULT_DATA_DIR;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian doomsday calculations: urn ensembles, rank posteriors, forecasts"};
  app.name("doomsday");
  app.require_subcommand(1);

  Common common;

  UrnArgs urn;
  auto* urn_cmd = app.add_subcommand("urn", "Posterior over candidate urn ensembles given a drawn label");
  urn_cmd->add_option("--candidate", urn.candidates, "Ensemble file (one urn size per line); repeatable");
  urn_cmd->add_option("--rank", urn.rank, "Drawn ball label r")->capture_default_str();
  urn_cmd->add_option("--trials", urn.trials, "Monte Carlo trials (0 for exact only)")->capture_default_str();
  urn_cmd->add_option("--seed", urn.seed, "Monte Carlo seed")->capture_default_str();
  urn_cmd->add_option("--workers", urn.workers, "Monte Carlo worker threads")->capture_default_str();
  urn_cmd->add_flag("--scan", urn.scan, "Likelihood scan over equal-size ensembles");
  urn_cmd->add_option("--total", urn.total, "Balls in every scanned ensemble")->capture_default_str();
  urn_cmd->add_option("--mu-max", urn.mu_max, "Largest mean urn size in the scan")->capture_default_str();
  add_common(urn_cmd, common);

  PosteriorArgs post;
  auto* post_cmd = app.add_subcommand("posterior", "Posterior on total count N or future count B given rank r");
  post_cmd->add_option("--rank", post.rank, "Observed rank r")->capture_default_str();
  post_cmd->add_option("--rank-prior", post.rank_prior, "Rank prior")
      ->check(CLI::IsMember({"exact", "log-uniform"}))
      ->capture_default_str();
  post_cmd->add_option("--rank-lo", post.rank_lo, "Log-uniform lower bound (default rank/3)");
  post_cmd->add_option("--rank-hi", post.rank_hi, "Log-uniform upper bound (default rank*3)");
  post_cmd->add_option("--over", post.over, "Variable")->check(CLI::IsMember({"N", "B"}))->capture_default_str();
  post_cmd->add_option("--cdf-at", post.cdf_at, "Report the CDF at these points in the header");
  add_common(post_cmd, common);

  ForecastArgs fc;
  auto* fc_cmd = app.add_subcommand("forecast", "Extinction probability by year against constant-hazard baselines");
  fc_cmd->add_option("--rank", fc.rank, "Central rank r0 of the log-uniform prior")->capture_default_str();
  fc_cmd->add_option("--rank-factor", fc.rank_factor, "Prior spans [r0/f, r0*f]")->capture_default_str();
  fc_cmd->add_option("--rank-exact", fc.rank_exact, "Use a known rank instead of the log-uniform prior");
  fc_cmd->add_option("--rate", fc.rate, "Births per year")->capture_default_str();
  fc_cmd->add_option("--epoch", fc.epoch, "Calendar year of the observation")->capture_default_str();
  fc_cmd->add_option("--hazard", fc.hazards, "Constant annual extinction probability; repeatable")
      ->capture_default_str();
  fc_cmd->add_option("--until", fc.until, "Last year of the curve")->capture_default_str();
  fc_cmd->add_option("--step", fc.step, "Years between rows")->capture_default_str();
  fc_cmd->add_option("--axis", fc.axis, "Tabulate against years or future births")
      ->check(CLI::IsMember({"years", "births"}))
      ->capture_default_str();
  fc_cmd->add_option("--milestone-year", fc.milestone_year, "Year for the headline probability")
      ->capture_default_str();
  fc_cmd->add_option("--fit-until", fc.fit_until, "End of the constant-hazard fit window")->capture_default_str();
  fc_cmd->add_option("--births-points", fc.births_points, "Rows on the births axis")->capture_default_str();
  add_common(fc_cmd, common);

  FermiArgs fe;
  auto* fe_cmd = app.add_subcommand("fermi", "Calibrated civilization-size models and their median gap");
  fe_cmd->add_option("--model", fe.model, "Model family")
      ->check(CLI::IsMember({"pareto", "lognormal", "bimodal", "all"}))
      ->capture_default_str();
  fe_cmd->add_option("--target-mi", fe.target, "Population of the median individual's civilization")
      ->capture_default_str();
  fe_cmd->add_option("--n-min", fe.n_min, "Pareto floor")->capture_default_str();
  fe_cmd->add_option("--sigma", fe.sigma, "Lognormal sigma")->capture_default_str();
  fe_cmd->add_option("--bimodal-weight", fe.shape.weight_small, "Weight of the small component")
      ->capture_default_str();
  fe_cmd->add_option("--bimodal-sigma-small", fe.shape.sigma_small, "Sigma of the small component")
      ->capture_default_str();
  fe_cmd->add_option("--bimodal-sigma-large", fe.shape.sigma_large, "Sigma of the large component")
      ->capture_default_str();
  fe_cmd->add_option("--bimodal-separation", fe.shape.separation, "Ratio of the component medians")
      ->capture_default_str();
  fe_cmd->add_option("--points", fe.points, "Curve points per model")->capture_default_str();
  fe_cmd->add_option("--output-dir", fe.output_dir, "Write per-model curve CSVs and a JSON report here");
  add_common(fe_cmd, common);

  MediansArgs md;
  auto* md_cmd = app.add_subcommand("medians", "Median group versus median individual on a population table");
  md_cmd->add_option("--table", md.table, "CSV with name,population (default: bundled 2016 snapshot)");
  md_cmd->add_option("--between", md.between, "Share of individuals in groups with lo < size <= hi")
      ->expected(2);
  add_common(md_cmd, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    write_error(err, "UsageError", e.what());
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    const json config = config_json(sub);
    std::ostringstream buffer;
    if (sub == urn_cmd) cmd_urn(urn, common, config, buffer);
    else if (sub == post_cmd) cmd_posterior(post, common, config, buffer);
    else if (sub == fc_cmd) cmd_forecast(fc, common, config, buffer);
    else if (sub == fe_cmd) cmd_fermi(fe, common, config, buffer);
    else cmd_medians(md, common, config, buffer);

    if (common.output.empty()) {
      out << buffer.str();
    } else {
      std::ofstream f(common.output);
      if (!f) throw IoError("cannot open output file " + common.output);
      f << buffer.str();
    }
    return 0;
  } catch (const Error& e) {
    write_error(err, e.kind(), e.what());
  } catch (const std::exception& e) {
    write_error(err, "InternalError", e.what());
  }
  return 1;
}

}  // namespace doomsday::cli
