#include <cmath>
#include <string>

#include "qq/normtest.hpp"
#include "qq/simharness.hpp"

namespace qq::sim {

namespace {

constexpr StudyId kAllStudies[] = {
    StudyId::score_profile, StudyId::slope_efficiency, StudyId::censoring, StudyId::winsor,
    StudyId::boxcox,        StudyId::calibration,      StudyId::power,     StudyId::tfit,
};

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    // Rounded so that grid labels print cleanly (0.05 rather than 0.05000000000000001).
    const double v = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(std::round(v * 1e10) / 1e10);
  }
  return out;
}

const std::vector<std::size_t> kCalibrationSizes = {60,  80,  100, 120, 160, 200, 240,
                                                    320, 400, 480, 640, 840, 1080};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string_view to_string(StudyId id) {
  switch (id) {
    case StudyId::score_profile: return "A-profile";
    case StudyId::slope_efficiency: return "B-efficiency";
    case StudyId::censoring: return "C-censoring";
    case StudyId::winsor: return "D-winsor";
    case StudyId::boxcox: return "E-boxcox";
    case StudyId::calibration: return "F-calibrate";
    case StudyId::power: return "G-power";
    case StudyId::tfit: return "H-tfit";
  }
  return "unknown";
}

StudyId parse_study_id(std::string_view name) {
  for (StudyId id : kAllStudies) {
    if (name == to_string(id)) return id;
  }
  throw ConfigError("unknown study id: " + std::string(name));
}

StudyConfig StudyConfig::defaults(StudyId id, bool full_scale) {
  StudyConfig c;
  c.study = id;
  switch (id) {
    case StudyId::score_profile:
      c.replicates = full_scale ? 100000 : 5000;
      c.sample_sizes = {120};
      c.position_grid = linspace(0.0, 0.9, 19);
      break;
    case StudyId::slope_efficiency:
      c.replicates = full_scale ? 100000 : 10000;
      c.sample_sizes = {30, 60, 120, 240};
      break;
    case StudyId::censoring:
      c.replicates = full_scale ? 100000 : 4000;
      c.sample_sizes = full_scale ? kCalibrationSizes : std::vector<std::size_t>{60, 120, 240};
      c.censor_fractions = linspace(0.05, 0.5, 10);
      break;
    case StudyId::winsor:
      c.replicates = full_scale ? 100000 : 5000;
      c.sample_sizes = {80, 120, 160, 200, 240};
      c.winsor_counts = {1, 2, 3, 4, 5};
      break;
    case StudyId::boxcox:
      c.replicates = full_scale ? 10000 : 2000;
      c.sample_sizes = {120};
      c.lambdas = full_scale ? linspace(-2.0, 2.0, 17) : std::vector<double>{-1.0, 0.0, 1.0};
      break;
    case StudyId::calibration:
      c.replicates = full_scale ? 100000 : 2000;
      c.sample_sizes = kCalibrationSizes;
      c.variants = full_scale
                       ? std::vector<std::string>{"full", "winsorized", "boxcox", "boxcox-winsorized"}
                       : std::vector<std::string>{"full", "winsorized"};
      c.censor_fractions = linspace(0.05, 0.5, 10);
      break;
    case StudyId::power:
      c.replicates = full_scale ? 100000 : 5000;
      c.sample_sizes = {120};
      c.shifts = linspace(1.0, 2.0, 11);
      break;
    case StudyId::tfit:
      c.replicates = full_scale ? 5000 : 500;
      c.sample_sizes = {120};
      break;
  }
  return c;
}

void StudyConfig::validate() const {
  require(replicates >= 100, "replicates must be at least 100");
  require(!sample_sizes.empty(), "sample_sizes must not be empty");
  require(batches >= 2 && batches <= replicates, "batches must lie in [2, replicates]");
  for (std::size_t n : sample_sizes) require(n >= 10, "sample sizes must be at least 10");
  require(seed.algorithm_id == RngStream::kAlgorithm,
          "unsupported RNG algorithm: " + seed.algorithm_id);

  switch (study) {
    case StudyId::score_profile:
      require(!position_grid.empty(), "position_grid must not be empty");
      for (double a : position_grid) {
        require(a >= 0.0 && a <= 0.9, "position_grid values must lie in [0, 0.9]");
      }
      break;
    case StudyId::slope_efficiency:
      for (std::size_t n : sample_sizes) {
        require(n == 30 || n == 60 || n == 120 || n == 240,
                "B-efficiency sample sizes must be drawn from {30, 60, 120, 240}");
      }
      break;
    case StudyId::censoring:
      require(!censor_fractions.empty(), "censor_fractions must not be empty");
      for (double f : censor_fractions) {
        require(f > 0.0 && f <= 0.5, "censor_fractions must lie in (0, 0.5]");
      }
      for (std::size_t n : sample_sizes) {
        for (double f : censor_fractions) {
          const auto k = static_cast<std::size_t>(std::llround(f * static_cast<double>(n)));
          require(n - k >= 3, "too few uncensored points at n = " + std::to_string(n));
        }
      }
      break;
    case StudyId::winsor:
      require(!winsor_counts.empty(), "winsor_counts must not be empty");
      for (std::size_t w : winsor_counts) {
        require(w >= 1 && w <= 5, "winsor_counts must lie in 1..5");
        for (std::size_t n : sample_sizes) {
          require(n >= 2 * w + 10, "n - 2w must be at least 10");
        }
      }
      break;
    case StudyId::boxcox:
      require(!lambdas.empty(), "lambdas must not be empty");
      for (double l : lambdas) {
        const double q = l * 4.0;
        require(l >= -2.0 && l <= 2.0 && std::abs(q - std::round(q)) < 1e-9,
                "lambdas must come from {-2, -1.75, ..., 2}");
      }
      break;
    case StudyId::calibration:
      require(!variants.empty(), "variants must not be empty");
      for (const auto& v : variants) {
        TestVariant tv;
        try {
          tv = parse_test_variant(v);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        require(!is_censored_variant(tv) || censored_extension,
                "censored variants need censored_extension = true");
      }
      if (censored_extension) {
        require(!censor_fractions.empty(), "censor_fractions must not be empty");
        for (double f : censor_fractions) {
          require(f > 0.0 && f <= 0.5, "censor_fractions must lie in (0, 0.5]");
        }
      }
      require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
      break;
    case StudyId::power: {
      require(!shifts.empty(), "shifts must not be empty");
      for (double s : shifts) require(s >= 1.0 && s <= 2.0, "shifts must lie in [1, 2]");
      require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
      TestVariant tv;
      try {
        tv = parse_test_variant(power_variant);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      require(tv == TestVariant::full || tv == TestVariant::winsorized,
              "power_variant must be 'full' or 'winsorized'");
      break;
    }
    case StudyId::tfit:
      require(t_nu >= 1, "t_nu must be a positive integer");
      require(t_sigma > 0.0 && std::isfinite(t_mu), "t_sigma must be positive");
      break;
  }
}

StudyConfig config_from_json(const nlohmann::json& j) {
  require(j.is_object(), "study config must be a JSON object");
  require(j.contains("study"), "study config needs a 'study' field");
  bool full_scale = false;
  read(j, "full_scale", full_scale);
  StudyConfig c = StudyConfig::defaults(parse_study_id(j.at("study").get<std::string>()), full_scale);
  read(j, "replicates", c.replicates);
  read(j, "sample_sizes", c.sample_sizes);
  read(j, "batches", c.batches);
  read(j, "threads", c.threads);
  read(j, "position_grid", c.position_grid);
  read(j, "censor_fractions", c.censor_fractions);
  read(j, "winsor_counts", c.winsor_counts);
  read(j, "lambdas", c.lambdas);
  read(j, "variants", c.variants);
  read(j, "censored_extension", c.censored_extension);
  read(j, "shifts", c.shifts);
  read(j, "alpha", c.alpha);
  read(j, "power_variant", c.power_variant);
  read(j, "t_mu", c.t_mu);
  read(j, "t_sigma", c.t_sigma);
  read(j, "t_nu", c.t_nu);
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (s.is_number_unsigned()) {
      c.seed.seed = s.get<std::uint64_t>();
    } else {
      require(s.is_object(), "seed must be an integer or an object");
      read(s, "seed", c.seed.seed);
      read(s, "stream_index", c.seed.stream_index);
      read(s, "algorithm", c.seed.algorithm_id);
    }
  }
  std::string path;
  if (j.contains("external_pvalues")) {
    read(j, "external_pvalues", path);
    c.external_pvalues_path = path;
  }
  if (j.contains("export_samples")) {
    read(j, "export_samples", path);
    c.export_samples_path = path;
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const StudyConfig& c) {
  nlohmann::json j;
  j["study"] = std::string(to_string(c.study));
  j["replicates"] = c.replicates;
  j["sample_sizes"] = c.sample_sizes;
  j["seed"] = {{"algorithm", c.seed.algorithm_id},
               {"seed", c.seed.seed},
               {"stream_index", c.seed.stream_index}};
  j["batches"] = c.batches;
  switch (c.study) {
    case StudyId::score_profile: j["position_grid"] = c.position_grid; break;
    case StudyId::censoring: j["censor_fractions"] = c.censor_fractions; break;
    case StudyId::winsor: j["winsor_counts"] = c.winsor_counts; break;
    case StudyId::boxcox: j["lambdas"] = c.lambdas; break;
    case StudyId::calibration:
      j["variants"] = c.variants;
      j["censored_extension"] = c.censored_extension;
      if (c.censored_extension) j["censor_fractions"] = c.censor_fractions;
      j["alpha"] = c.alpha;
      break;
    case StudyId::power:
      j["shifts"] = c.shifts;
      j["alpha"] = c.alpha;
      j["power_variant"] = c.power_variant;
      if (c.external_pvalues_path) j["external_pvalues"] = *c.external_pvalues_path;
      if (c.export_samples_path) j["export_samples"] = *c.export_samples_path;
      break;
    case StudyId::tfit:
      j["t_mu"] = c.t_mu;
      j["t_sigma"] = c.t_sigma;
      j["t_nu"] = c.t_nu;
      break;
    case StudyId::slope_efficiency: break;
  }
  return j;
}

}  // namespace qq::sim
