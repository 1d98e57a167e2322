#pragma once

// Seeded Monte Carlo studies of the QQ estimators and the QQr normality test.
// Every study is deterministic given its StudyConfig: each replicate draws from
// its own substream of the configured RNG stream, and reductions run in
// replicate order regardless of how many threads did the work.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qq/rng.hpp"

namespace qq::sim {

enum class StudyId {
  score_profile,     // "A-profile"
  slope_efficiency,  // "B-efficiency"
  censoring,         // "C-censoring"
  winsor,            // "D-winsor"
  boxcox,            // "E-boxcox"
  calibration,       // "F-calibrate"
  power,             // "G-power"
  tfit,              // "H-tfit"
};

std::string_view to_string(StudyId id);
StudyId parse_study_id(std::string_view name);

// Raised for malformed configuration or auxiliary input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StudyConfig {
  StudyId study = StudyId::slope_efficiency;
  std::size_t replicates = 2000;
  std::vector<std::size_t> sample_sizes;
  RngStream seed{.seed = 20240601};
  // Replicates are grouped into this many contiguous batches to estimate
  // Monte Carlo standard errors of derived quantities.
  std::size_t batches = 20;
  // Worker threads; 0 means hardware concurrency. Results do not depend on it.
  std::size_t threads = 0;

  // A-profile: common alpha = beta values.
  std::vector<double> position_grid;
  // C-censoring: censored fractions k/n. F-calibrate: censored extension.
  std::vector<double> censor_fractions;
  // D-winsor: observations dropped per side.
  std::vector<std::size_t> winsor_counts;
  // E-boxcox: true Box-Cox powers.
  std::vector<double> lambdas;
  // F-calibrate: test variants to calibrate ("full", "winsorized", ...).
  std::vector<std::string> variants;
  bool censored_extension = false;
  // G-power: exponents applied to N(3, 1) data.
  std::vector<double> shifts;
  double alpha = 0.05;
  std::string power_variant = "full";
  // G-power: optional external per-sample p-values (replicate_id, p) and an
  // optional CSV export of the generated samples.
  std::optional<std::string> external_pvalues_path;
  std::optional<std::string> export_samples_path;
  // H-tfit: data are mu + sigma * t(nu).
  double t_mu = 20.0;
  double t_sigma = 4.0;
  int t_nu = 5;

  // Desk-scale defaults for a study; `full_scale` switches replicate counts
  // and grids to the sizes of the original experiments.
  static StudyConfig defaults(StudyId id, bool full_scale = false);
  void validate() const;
};

// Reads a JSON object of overrides on top of defaults(study).
StudyConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StudyConfig& c);

struct Estimate {
  double value = 0.0;
  double mcse = 0.0;
  std::optional<double> reference;
};

struct Cell {
  std::string label;
  std::vector<std::pair<std::string, double>> params;
  std::vector<std::pair<std::string, Estimate>> stats;

  const Estimate& stat(std::string_view name) const;
  double param(std::string_view name) const;
  void add(std::string name, Estimate e) { stats.emplace_back(std::move(name), e); }
};

// A quantity checked against a target: passes when |value - target| is within
// max(tolerance, 3 * mcse). Bound checks allow the same 3 * mcse slack.
struct Comparison {
  std::string name;
  double value = 0.0;
  double mcse = 0.0;
  std::optional<double> target;
  double tolerance = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  bool pass = false;
  std::string note;
};

Comparison compare_to_target(std::string name, const Estimate& e, double target,
                             double tolerance);
Comparison compare_to_bounds(std::string name, const Estimate& e, std::optional<double> lower,
                             std::optional<double> upper);

struct FigureTable {
  std::string name;  // e.g. "A1"
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct StudyReport {
  StudyConfig config;
  std::vector<Cell> cells;
  std::vector<std::pair<std::string, Estimate>> summary;
  std::vector<Comparison> comparisons;
  std::vector<FigureTable> figures;
  std::vector<std::string> notes;
  double runtime_seconds = 0.0;

  bool all_pass() const;
  const Cell* find_cell(std::string_view label) const;
  const Estimate& summary_stat(std::string_view name) const;
};

// JSON report. `include_runtime = false` drops the only nondeterministic field.
nlohmann::json to_json(const StudyReport& r, bool include_runtime = true);
std::string to_csv(const FigureTable& t);

StudyReport run_score_profile(const StudyConfig& config);
StudyReport run_slope_efficiency(const StudyConfig& config);
StudyReport run_censoring_study(const StudyConfig& config);
StudyReport run_winsor_study(const StudyConfig& config);
StudyReport run_boxcox_study(const StudyConfig& config);
StudyReport run_calibration(const StudyConfig& config);
StudyReport run_power_study(const StudyConfig& config);
StudyReport run_tfit_study(const StudyConfig& config);

// Dispatches on config.study.
StudyReport run_study(const StudyConfig& config);

}  // namespace qq::sim
