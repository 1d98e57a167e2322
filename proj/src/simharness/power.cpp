#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "common.hpp"
#include "qq/normtest.hpp"

namespace qq::sim {

namespace {

// x -> sign(x) |x|^shift keeps the rare negative draws of N(3, 1) defined.
std::vector<double> shifted_sample(const std::vector<double>& z, double shift) {
  std::vector<double> x(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = 3.0 + z[i];
    x[i] = std::copysign(std::pow(std::abs(v), shift), v);
  }
  return x;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// Two-column CSV (replicate_id, p); a non-numeric first line is a header.
std::map<std::size_t, double> read_pvalues(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open external p-value file: " + path);
  std::map<std::size_t, double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string where = path + ":" + std::to_string(line_no);
    if (comma == std::string::npos) throw ConfigError(where + ": expected 'replicate_id,p'");
    const std::string id_text = trim(line.substr(0, comma));
    const std::string p_text = trim(line.substr(comma + 1));
    std::size_t id = 0;
    double p = 0.0;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(id_text, &used);
      if (used != id_text.size() || v < 0) throw std::invalid_argument("id");
      id = static_cast<std::size_t>(v);
      p = std::stod(p_text, &used);
      if (used != p_text.size()) throw std::invalid_argument("p");
    } catch (const std::exception&) {
      if (line_no == 1 && out.empty()) continue;
      throw ConfigError(where + ": malformed row '" + line + "'");
    }
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(where + ": p-value outside [0, 1]");
    if (!out.emplace(id, p).second) {
      throw ConfigError(where + ": duplicate replicate_id " + std::to_string(id));
    }
  }
  return out;
}

}  // namespace

StudyReport run_power_study(const StudyConfig& config) {
  config.validate();
  detail::Stopwatch clock;
  StudyReport report;
  report.config = config;
  const std::size_t R = config.replicates;
  const auto& shifts = config.shifts;
  const std::size_t S = shifts.size();
  const TestVariant variant = parse_test_variant(config.power_variant);
  std::map<std::size_t, double> external;
  if (config.external_pvalues_path) external = read_pvalues(*config.external_pvalues_path);
  std::ofstream export_out;
  if (config.export_samples_path) {
    export_out.open(*config.export_samples_path);
    if (!export_out) throw ConfigError("cannot write " + *config.export_samples_path);
    export_out << "replicate_id,n,shift,index,value\n";
    export_out.precision(17);
  }
  FigureTable g1{"G1", {"n", "shift", "power", "mcse"}, {}};
  if (!external.empty()) {
    g1.columns.push_back("external_power");
  }

  for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni) {
    const std::size_t n = config.sample_sizes[ni];
    // One standard normal sample per replicate, shared by all shifts.
    std::vector<double> hit(S * R);
    detail::parallel_for(R, config.threads, [&](std::size_t r) {
      Generator gen(detail::replicate_stream(config, ni, r));
      std::vector<double> z(n);
      for (auto& v : z) v = gen.normal();
      for (std::size_t j = 0; j < S; ++j) {
        const Sample sample = Sample::complete(shifted_sample(z, shifts[j]));
        hit[j * R + r] = test_normality(sample, variant, config.alpha).reject ? 1.0 : 0.0;
      }
    });
    if (export_out) {
      for (std::size_t r = 0; r < R; ++r) {
        Generator gen(detail::replicate_stream(config, ni, r));
        std::vector<double> z(n);
        for (auto& v : z) v = gen.normal();
        for (std::size_t j = 0; j < S; ++j) {
          const auto x = shifted_sample(z, shifts[j]);
          const std::size_t id = (ni * S + j) * R + r;
          for (std::size_t i = 0; i < n; ++i) {
            export_out << id << ',' << n << ',' << shifts[j] << ',' << i << ',' << x[i] << '\n';
          }
        }
      }
    }

    std::vector<Estimate> power(S);
    for (std::size_t j = 0; j < S; ++j) {
      power[j] = detail::proportion(detail::slice(hit, j * R, (j + 1) * R));
      Cell cell;
      cell.label = "n=" + std::to_string(n) + ",shift=" + detail::label_number(shifts[j]);
      cell.params = {{"n", static_cast<double>(n)}, {"shift", shifts[j]}};
      cell.add("power", power[j]);
      std::vector<double> row = {static_cast<double>(n), shifts[j], power[j].value, power[j].mcse};
      if (!external.empty()) {
        std::vector<double> ext(R);
        for (std::size_t r = 0; r < R; ++r) {
          const std::size_t id = (ni * S + j) * R + r;
          const auto it = external.find(id);
          if (it == external.end()) {
            throw ConfigError("external p-value file lacks replicate_id " + std::to_string(id));
          }
          ext[r] = it->second < config.alpha ? 1.0 : 0.0;
        }
        const Estimate e = detail::proportion(ext);
        cell.add("external_power", e);
        row.push_back(e.value);
      }
      g1.rows.push_back(row);
      if (std::abs(shifts[j] - 1.0) < 1e-12 && std::abs(config.alpha - 0.05) < 1e-12) {
        report.comparisons.push_back(compare_to_bounds(
            "size at shift 1 (n=" + std::to_string(n) + ")", power[j], 0.035, 0.065));
      }
      report.cells.push_back(std::move(cell));
    }

    // Paired differences between neighbouring shifts.
    std::size_t decreases = 0;
    Estimate worst{1e300, 0.0, std::nullopt};
    for (std::size_t j = 0; j + 1 < S; ++j) {
      std::vector<double> d(R);
      for (std::size_t r = 0; r < R; ++r) d[r] = hit[(j + 1) * R + r] - hit[j * R + r];
      const Estimate step{detail::mean(d), std::sqrt(detail::variance(d) / static_cast<double>(R)),
                          std::nullopt};
      if (step.value < 0.0) ++decreases;
      if (step.value < worst.value) worst = step;
    }
    if (S >= 2) {
      const std::string tag = " (n=" + std::to_string(n) + ")";
      report.summary.emplace_back("strict_decreases" + tag,
                                  Estimate{static_cast<double>(decreases), 0.0, 0.0});
      report.summary.emplace_back("smallest_step" + tag, worst);
      report.comparisons.push_back(
          compare_to_bounds("power nondecreasing in shift" + tag, worst, 0.0, std::nullopt));
    }
  }
  report.notes.push_back("data: sign(3 + Z) |3 + Z|^shift with Z shared across shifts");
  report.notes.push_back("replicate_id = (size_index * shifts + shift_index) * replicates + replicate");
  report.figures.push_back(std::move(g1));
  report.runtime_seconds = clock.seconds();
  return report;
}

}  // namespace qq::sim
