#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "common.hpp"
#include "qq/simharness.hpp"

namespace qq::sim {

namespace {

// Finite numbers as-is; anything else as null. The caller records the reason.
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nullptr; }

nlohmann::json to_json(const Estimate& e) {
  nlohmann::json j;
  j["value"] = number(e.value);
  j["mcse"] = number(e.mcse);
  if (e.reference) j["reference"] = number(*e.reference);
  if (!std::isfinite(e.value)) j["reason"] = "non-finite estimate";
  return j;
}

nlohmann::json to_json(const Comparison& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["value"] = number(c.value);
  j["mcse"] = number(c.mcse);
  if (c.target) {
    j["target"] = *c.target;
    j["tolerance"] = c.tolerance;
  }
  if (c.lower) j["lower"] = *c.lower;
  if (c.upper) j["upper"] = *c.upper;
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  if (!std::isfinite(c.value)) j["reason"] = "non-finite estimate";
  return j;
}

}  // namespace

const Estimate& Cell::stat(std::string_view name) const {
  for (const auto& [key, e] : stats) {
    if (key == name) return e;
  }
  throw std::out_of_range("cell '" + label + "' has no statistic '" + std::string(name) + "'");
}

double Cell::param(std::string_view name) const {
  for (const auto& [key, v] : params) {
    if (key == name) return v;
  }
  throw std::out_of_range("cell '" + label + "' has no parameter '" + std::string(name) + "'");
}

Comparison compare_to_target(std::string name, const Estimate& e, double target,
                             double tolerance) {
  Comparison c;
  c.name = std::move(name);
  c.value = e.value;
  c.mcse = e.mcse;
  c.target = target;
  c.tolerance = tolerance;
  const double allowed = std::max(tolerance, 3.0 * e.mcse);
  c.pass = std::isfinite(e.value) && std::abs(e.value - target) <= allowed;
  if (allowed > tolerance) c.note = "tolerance widened to 3 x MCSE";
  return c;
}

Comparison compare_to_bounds(std::string name, const Estimate& e, std::optional<double> lower,
                             std::optional<double> upper) {
  Comparison c;
  c.name = std::move(name);
  c.value = e.value;
  c.mcse = e.mcse;
  c.lower = lower;
  c.upper = upper;
  const double slack = 3.0 * e.mcse;
  c.pass = std::isfinite(e.value) && (!lower || e.value >= *lower - slack) &&
           (!upper || e.value <= *upper + slack);
  const bool strict = std::isfinite(e.value) && (!lower || e.value >= *lower) &&
                      (!upper || e.value <= *upper);
  if (c.pass && !strict) c.note = "outside the bounds by less than 3 x MCSE";
  return c;
}

bool StudyReport::all_pass() const {
  for (const auto& c : comparisons) {
    if (!c.pass) return false;
  }
  return true;
}

const Cell* StudyReport::find_cell(std::string_view label) const {
  for (const auto& c : cells) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

const Estimate& StudyReport::summary_stat(std::string_view name) const {
  for (const auto& [key, e] : summary) {
    if (key == name) return e;
  }
  throw std::out_of_range("report has no summary statistic '" + std::string(name) + "'");
}

nlohmann::json to_json(const StudyReport& r, bool include_runtime) {
  nlohmann::json j;
  j["config"] = to_json(r.config);
  j["rng"] = {{"algorithm", r.config.seed.algorithm_id},
              {"seed", r.config.seed.seed},
              {"stream_index", r.config.seed.stream_index},
              {"replicate_streams", "substream(cell).substream(replicate)"}};
  auto cells = nlohmann::json::array();
  for (const auto& cell : r.cells) {
    nlohmann::json cj;
    cj["label"] = cell.label;
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : cell.params) params[k] = number(v);
    cj["params"] = params;
    nlohmann::json stats = nlohmann::json::object();
    for (const auto& [k, e] : cell.stats) stats[k] = to_json(e);
    cj["stats"] = stats;
    cells.push_back(cj);
  }
  j["cells"] = cells;
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& [k, e] : r.summary) summary[k] = to_json(e);
  j["summary"] = summary;
  auto comparisons = nlohmann::json::array();
  for (const auto& c : r.comparisons) comparisons.push_back(to_json(c));
  j["comparisons"] = comparisons;
  j["all_pass"] = r.all_pass();
  auto figures = nlohmann::json::array();
  for (const auto& f : r.figures) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : f.rows) {
      nlohmann::json jr = nlohmann::json::array();
      for (double v : row) jr.push_back(number(v));
      rows.push_back(jr);
    }
    figures.push_back({{"name", f.name}, {"columns", f.columns}, {"rows", rows}});
  }
  j["figures"] = figures;
  j["notes"] = r.notes;
  if (include_runtime) j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

std::string to_csv(const FigureTable& t) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (std::isfinite(row[i])) out << row[i];
    }
    out << '\n';
  }
  return out.str();
}

namespace detail {

OlsResult ols(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const std::size_t m = y.size();
  if (m == 0 || x.size() != m) throw std::invalid_argument("ols: row count mismatch");
  const std::size_t p = x.front().size();
  if (m < p) throw std::invalid_argument("ols: fewer rows than regressors");
  // Normal equations with partial pivoting; p is at most 4 here.
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t k = 0; k < p; ++k) a[i][k] += x[r][i] * x[r][k];
      a[i][p] += x[r][i] * y[r];
    }
  }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < p; ++i) {
      if (std::abs(a[i][col]) > std::abs(a[pivot][col])) pivot = i;
    }
    if (std::abs(a[pivot][col]) < 1e-12) throw std::invalid_argument("ols: singular design");
    std::swap(a[col], a[pivot]);
    for (std::size_t i = 0; i < p; ++i) {
      if (i == col) continue;
      const double factor = a[i][col] / a[col][col];
      for (std::size_t k = col; k <= p; ++k) a[i][k] -= factor * a[col][k];
    }
  }
  OlsResult out;
  out.coef.resize(p);
  for (std::size_t i = 0; i < p; ++i) out.coef[i] = a[i][p] / a[i][i];

  const double my = mean(y);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    double fitted = 0.0;
    for (std::size_t i = 0; i < p; ++i) fitted += out.coef[i] * x[r][i];
    ss_res += (y[r] - fitted) * (y[r] - fitted);
    ss_tot += (y[r] - my) * (y[r] - my);
  }
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  out.residual_sd = m > p ? std::sqrt(ss_res / static_cast<double>(m - p)) : 0.0;
  return out;
}

double simple_slope(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::vector<double> sorted_normal(Generator& gen, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = gen.normal();
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace detail

}  // namespace qq::sim
