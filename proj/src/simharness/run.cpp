#include "qq/simharness.hpp"

namespace qq::sim {

StudyReport run_study(const StudyConfig& config) {
  switch (config.study) {
    case StudyId::score_profile: return run_score_profile(config);
    case StudyId::slope_efficiency: return run_slope_efficiency(config);
    case StudyId::censoring: return run_censoring_study(config);
    case StudyId::winsor: return run_winsor_study(config);
    case StudyId::boxcox: return run_boxcox_study(config);
    case StudyId::calibration: return run_calibration(config);
    case StudyId::power: return run_power_study(config);
    case StudyId::tfit: return run_tfit_study(config);
  }
  throw ConfigError("unknown study");
}

}  // namespace qq::sim
