#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "qq/errors.hpp"
#include "qq/normtest.hpp"
#include "qq/probability.hpp"
#include "qq/scores.hpp"
#include "qq/shapefit.hpp"
#include "qq/simharness.hpp"

namespace qq::cli {

namespace {

using nlohmann::json;

std::string read_all(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

Interval parse_range(const std::string& text) {
  const auto sep = text.find_first_of(",:");
  if (sep == std::string::npos) throw UsageError("--range expects LO,HI");
  try {
    std::size_t used = 0;
    const std::string lo_text = text.substr(0, sep);
    const std::string hi_text = text.substr(sep + 1);
    Interval r{std::stod(lo_text, &used), 0.0};
    if (used != lo_text.size()) throw std::invalid_argument(lo_text);
    r.hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument(hi_text);
    if (!(r.lo < r.hi)) throw UsageError("--range needs LO < HI");
    return r;
  } catch (const std::logic_error&) {
    throw UsageError("--range expects two numbers LO,HI, got '" + text + "'");
  }
}

const char* to_string(FitKind k) {
  switch (k) {
    case FitKind::full: return "full";
    case FitKind::censored: return "censored";
    case FitKind::winsorized: return "winsorized";
  }
  return "unknown";
}

json fit_json(const QQFit& f) {
  return {{"kind", to_string(f.kind)},
          {"m", f.intercept},
          {"s", f.slope},
          {"r", f.r},
          {"n", f.n_total},
          {"k", f.k_censored},
          {"w", f.w_winsorized},
          {"n_eff", {{"mean", f.n_eff_mean}, {"sd", f.n_eff_sd}, {"limit", f.n_eff_limit}}},
          {"se", {{"mean", f.se_mean}, {"sd", f.se_sd}, {"upper_limit", f.se_upper_limit}}},
          {"flags",
           {{"out_of_calibration", f.out_of_calibration},
            {"outside_calibrated_n", f.outside_calibrated_n},
            {"negative_slope", f.negative_slope}}}};
}

json interval_json(const ReferenceInterval& ri) {
  return {{"lower", ri.lower},
          {"upper", ri.upper},
          {"coverage", ri.coverage},
          {"z", ri.z_multiplier},
          {"se_upper", ri.se_upper},
          {"se_lower", ri.se_lower},
          {"se_lower_assumed", ri.se_lower_assumed}};
}

json trace_json(const std::vector<SearchPoint>& trace) {
  json a = json::array();
  for (const auto& p : trace) a.push_back({p.parameter, p.objective});
  return a;
}

// evaluation, parameter, objective, best_so_far
std::string trace_csv(const std::vector<SearchPoint>& trace, const char* parameter) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "evaluation," << parameter << ",objective,best_so_far\n";
  double best = -INFINITY;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    best = std::max(best, trace[i].objective);
    out << i << ',' << trace[i].parameter << ',';
    if (std::isfinite(trace[i].objective)) out << trace[i].objective;
    out << ',';
    if (std::isfinite(best)) out << best;
    out << '\n';
  }
  return out.str();
}

// Box-Cox inverse; undefined when lambda * y + 1 <= 0.
std::optional<double> boxcox_inverse(double y, double lambda) {
  if (lambda == 0.0) return std::exp(y);
  const double base = lambda * y + 1.0;
  if (!(base > 0.0)) return std::nullopt;
  return std::pow(base, 1.0 / lambda);
}

struct Common {
  std::string input = "-";
  std::string column;
  std::optional<double> censor_below;
  std::string output;
};

void add_input_options(CLI::App* cmd, Common& c) {
  cmd->add_option("input", c.input, "Data file, or - for standard input")->capture_default_str();
  cmd->add_option("--column", c.column, "CSV column holding the values");
  cmd->add_option("--censor-below", c.censor_below, "Treat values below this as left-censored");
  cmd->add_option("-o,--output", c.output, "Write the JSON report here; print a summary instead");
}

struct Emitter {
  const std::vector<std::string>& command;
  std::ostream& out;

  void emit(const std::string& output, const std::optional<std::string>& digest, json payload,
            const std::vector<std::string>& warnings, const std::string& summary) const {
    const json env = make_envelope(command, digest, std::move(payload), warnings);
    if (output.empty()) {
      out << env.dump(2) << '\n';
    } else {
      write_file(output, env.dump(2) + "\n");
      out << summary;
      for (const auto& w : warnings) out << "warning: " << w << '\n';
    }
  }
};

ParsedInput load(const Common& c) {
  InputOptions opts;
  opts.column = c.column;
  opts.censor_below = c.censor_below;
  return parse_input(read_all(c.input), opts);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"QQ-plot estimation, shape fitting, normality testing and simulation studies"};
  app.name("qqtool");
  app.set_version_flag("--version", QQ_VERSION);
  app.require_subcommand(1);

  // scores
  std::size_t score_n = 0;
  std::string position = "hazen";
  std::optional<double> score_nu;
  std::string score_output;
  auto* scores = app.add_subcommand("scores", "Print QQ scores as CSV (i, score)");
  scores->add_option("n", score_n, "Number of scores")->required()->check(CLI::Range(1, 100000000));
  scores->add_option("--position", position, "hazen, blom, weibull or a number a for alpha=beta=a")
      ->capture_default_str();
  scores->add_option("--t-nu", score_nu, "Student-t scores with this many degrees of freedom");
  scores->add_option("-o,--output", score_output, "Also write a JSON report here");

  // fit
  Common fit_c;
  std::size_t winsor = 0;
  double coverage = 0.95;
  bool z_rounded = false;
  auto* fit = app.add_subcommand("fit", "QQ estimates of mean, sd and the reference interval");
  add_input_options(fit, fit_c);
  auto* winsor_opt = fit->add_option("--winsor", winsor, "Drop w points from each tail");
  fit->add_option("--coverage", coverage, "Central coverage of the interval")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  fit->add_flag("--z-rounded", z_rounded, "Use z = 1.96 instead of 1.959964");
  winsor_opt->excludes(fit->get_option("--censor-below"));

  // test
  Common test_c;
  std::string variant = "full";
  double alpha = 0.05;
  auto* test = app.add_subcommand("test", "QQ correlation test of normality");
  add_input_options(test, test_c);
  test->add_option("--variant", variant,
                   "full, winsorized, boxcox, boxcox-winsorized, censored-original, censored-boxcox")
      ->capture_default_str();
  test->add_option("--alpha", alpha, "Significance level")->capture_default_str();

  // boxcox
  Common bc_c;
  std::string bc_range = "-3,3";
  std::string method = "qqr";
  std::string bc_trace;
  std::size_t bc_winsor = 0;
  double bc_coverage = 0.95;
  auto* boxcox = app.add_subcommand("boxcox", "Fit the Box-Cox power");
  add_input_options(boxcox, bc_c);
  boxcox->add_option("--range", bc_range, "Search interval LO,HI")->capture_default_str();
  boxcox->add_option("--method", method, "qqr or pl")
      ->check(CLI::IsMember({"qqr", "pl"}))
      ->capture_default_str();
  boxcox->add_option("--winsor", bc_winsor, "Winsorize the QQ regression (qqr only)");
  boxcox->add_option("--coverage", bc_coverage, "Coverage of the back-transformed interval")
      ->check(CLI::Range(0.0, 1.0));
  boxcox->add_option("--trace", bc_trace, "Write the search trace as CSV");

  // tfit
  Common t_c;
  std::string t_range = "1,200";
  bool integer_nu = false;
  std::string t_trace;
  double t_coverage = 0.95;
  auto* tfit = app.add_subcommand("tfit", "Fit a Student-t model by maximum QQ correlation");
  add_input_options(tfit, t_c);
  tfit->add_option("--range", t_range, "Search interval for nu, LO,HI")->capture_default_str();
  tfit->add_flag("--integer-nu", integer_nu, "Search integer nu only");
  tfit->add_option("--coverage", t_coverage, "Central coverage of the interval")
      ->check(CLI::Range(0.0, 1.0));
  tfit->add_option("--trace", t_trace, "Write the search trace as CSV");

  // simulate
  std::string study;
  std::string config_path;
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool full_scale = false;
  bool strict = false;
  std::string out_dir;
  std::string sim_output;
  std::optional<std::string> external_pvalues;
  std::optional<std::string> export_samples;
  auto* simulate = app.add_subcommand("simulate", "Run a seeded Monte Carlo study");
  simulate->add_option("study", study, "A-profile, B-efficiency, ..., H-tfit")->required();
  simulate->add_option("--config", config_path, "JSON file of study settings");
  simulate->add_option("--replicates", replicates, "Replicates per cell");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--threads", threads, "Worker threads (0 = all cores)");
  simulate->add_flag("--full-scale", full_scale, "Use the original experiment sizes");
  simulate->add_flag("--strict", strict, "Exit 4 when a reference comparison fails");
  simulate->add_option("--out-dir", out_dir, "Write report.json and figure CSVs here");
  simulate->add_option("-o,--output", sim_output, "Write the JSON report here");
  simulate->add_option("--external-pvalues", external_pvalues,
                       "G-power: CSV of replicate_id,p from another test");
  simulate->add_option("--export-samples", export_samples, "G-power: write generated samples");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << QQ_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qqtool: " << e.what() << '\n';
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << "run 'qqtool " << sub->get_name() << " --help' for usage\n";
    }
    return kExitUsage;
  }

  const Emitter emitter{args, out};
  try {
    if (*scores) {
      PlottingPosition pos;
      if (position == "hazen") {
        pos = PlottingPosition::hazen();
      } else if (position == "blom") {
        pos = PlottingPosition::blom();
      } else if (position == "weibull") {
        pos = PlottingPosition::weibull();
      } else {
        try {
          std::size_t used = 0;
          const double a = std::stod(position, &used);
          if (used != position.size() || !(a >= 0.0 && a < 1.0)) throw std::invalid_argument("");
          pos = PlottingPosition::symmetric(a);
        } catch (const std::logic_error&) {
          throw UsageError("--position must be hazen, blom, weibull or a number in [0, 1)");
        }
      }
      if (score_nu && pos != PlottingPosition::hazen()) {
        throw UsageError("t scores use the Hazen position only");
      }
      const ScoreVector sv = score_nu ? t_scores(score_n, *score_nu) : normal_scores(score_n, pos);
      std::ostringstream csv;
      csv << std::setprecision(17) << "i,score\n";
      for (std::size_t i = 0; i < sv.size(); ++i) csv << i + 1 << ',' << sv[i] << '\n';
      out << csv.str();
      if (!score_output.empty()) {
        json payload = {{"n", score_n},
                        {"distribution", score_nu ? "student_t" : "normal"},
                        {"position", {{"alpha", pos.alpha}, {"beta", pos.beta}}},
                        {"scores", std::vector<double>(sv.values().begin(), sv.values().end())}};
        if (score_nu) payload["nu"] = *score_nu;
        write_file(score_output, make_envelope(args, std::nullopt, payload, {}).dump(2) + "\n");
      }
      return kExitOk;
    }

    if (*fit) {
      if (fit_c.censor_below && winsor > 0) {
        throw UsageError("--winsor and --censor-below are mutually exclusive");
      }
      ParsedInput in = load(fit_c);
      if (winsor > 0 && in.sample.k_censored > 0) {
        throw UsageError("--winsor cannot be combined with censored ('<') entries");
      }
      const Sample& s = in.sample;
      QQFit f = winsor > 0 ? fit_winsorized(s, winsor)
                           : (s.k_censored > 0 ? fit_censored(s) : fit_full(s));
      const ReferenceInterval ri =
          reference_interval(f, coverage, z_rounded ? std::optional<double>(1.96) : std::nullopt);
      json payload = fit_json(f);
      payload["interval"] = interval_json(ri);
      if (s.k_censored > 0) {
        const CensoringEfficiency e = censoring_efficiency(s.n_total, s.k_censored);
        payload["censoring"] = {{"detection_limit", *s.detection_limit},
                                {"uncensored_fraction", 1.0 - s.censored_fraction()},
                                {"efficiency", {{"mean", e.mean}, {"sd", e.sd}, {"limit", e.limit}}}};
      }
      auto warnings = in.warnings;
      warnings.insert(warnings.end(), f.warnings.begin(), f.warnings.end());
      std::ostringstream summary;
      summary << "QQ fit (" << to_string(f.kind) << "): n=" << f.n_total << " k=" << f.k_censored
              << " w=" << f.w_winsorized << "\n  m = " << fmt(f.intercept) << "  s = "
              << fmt(f.slope) << "  r = " << fmt(f.r) << "\n  interval [" << fmt(ri.lower) << ", "
              << fmt(ri.upper) << "]  coverage " << ri.coverage << "  se(upper) "
              << fmt(ri.se_upper) << '\n';
      emitter.emit(fit_c.output, in.sha256, payload, warnings, summary.str());
      return kExitOk;
    }

    if (*test) {
      TestVariant v;
      try {
        v = parse_test_variant(variant);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
      ParsedInput in = load(test_c);
      const NormalityTest t = test_normality(in.sample, v, alpha);
      json payload = {{"variant", std::string(to_string(t.variant))},
                      {"r", t.r},
                      {"y", t.y},
                      {"z", t.z},
                      {"p", t.p},
                      {"alpha", t.alpha},
                      {"reject", t.reject},
                      {"n", t.n},
                      {"k", in.sample.k_censored},
                      {"censored_fraction", t.f},
                      {"winsor", t.winsor},
                      {"r_clamped", t.r_clamped}};
      payload["lambda"] = t.lambda ? json(*t.lambda) : json(nullptr);
      auto warnings = in.warnings;
      if (t.calibration_warning) warnings.push_back(*t.calibration_warning);
      std::ostringstream summary;
      summary << "QQr normality test (" << to_string(t.variant) << "): n=" << t.n
              << "\n  r = " << fmt(t.r) << "  Z = " << fmt(t.z) << "  p = " << fmt(t.p) << "  "
              << (t.reject ? "reject" : "do not reject") << " normality at alpha " << t.alpha
              << '\n';
      emitter.emit(test_c.output, in.sha256, payload, warnings, summary.str());
      return kExitOk;
    }

    if (*boxcox) {
      BoxCoxOptions opts;
      opts.lambda_range = parse_range(bc_range);
      opts.winsor = bc_winsor;
      if (method == "pl" && bc_winsor > 0) throw UsageError("--winsor applies to --method qqr only");
      ParsedInput in = load(bc_c);
      const BoxCoxFit f =
          method == "pl" ? fit_boxcox_pl(in.sample, opts) : fit_boxcox_qqr(in.sample, opts);
      const ReferenceInterval ri = reference_interval(f.fit_at_opt, bc_coverage);
      json payload = {{"lambda_hat", f.lambda_hat},
                      {"method", method == "pl" ? "pseudolikelihood" : "max-qqr"},
                      {"range", {opts.lambda_range.lo, opts.lambda_range.hi}},
                      {"qqr_at_opt", f.qqr_at_opt},
                      {"objective_at_opt", f.objective_at_opt},
                      {"no_preference", f.no_preference},
                      {"fit_at_opt", fit_json(f.fit_at_opt)},
                      {"transformed_interval", interval_json(ri)},
                      {"search_trace", trace_json(f.search_trace)}};
      json reasons = json::object();
      json original = json::object();
      for (const char* side : {"lower", "upper"}) {
        const auto v = boxcox_inverse(side[0] == 'l' ? ri.lower : ri.upper, f.lambda_hat);
        original[side] = v ? json(*v) : json(nullptr);
        if (!v) {
          reasons[std::string("/original_interval/") + side] =
              "transformed limit lies outside the range of the inverse Box-Cox transform";
        }
      }
      payload["original_interval"] = original;
      payload["null_reasons"] = reasons;
      if (!bc_trace.empty()) write_file(bc_trace, trace_csv(f.search_trace, "lambda"));
      auto warnings = in.warnings;
      warnings.insert(warnings.end(), f.warnings.begin(), f.warnings.end());
      std::ostringstream summary;
      summary << "Box-Cox (" << method << "): lambda = " << fmt(f.lambda_hat)
              << "  QQr = " << fmt(f.qqr_at_opt) << "\n  transformed m = "
              << fmt(f.fit_at_opt.intercept) << "  s = " << fmt(f.fit_at_opt.slope) << '\n';
      emitter.emit(bc_c.output, in.sha256, payload, warnings, summary.str());
      return kExitOk;
    }

    if (*tfit) {
      TFitOptions opts;
      opts.nu_range = parse_range(t_range);
      opts.integer_only = integer_nu;
      opts.coverage = t_coverage;
      ParsedInput in = load(t_c);
      const TFit f = fit_t_nu(in.sample, opts);
      const QQFit normal = fit_full(in.sample);
      const ReferenceInterval nri = reference_interval(normal, t_coverage);
      json payload = {{"nu_hat", f.nu_hat},
                      {"range", {opts.nu_range.lo, opts.nu_range.hi}},
                      {"integer_nu", integer_nu},
                      {"qqr_at_opt", f.qqr_at_opt},
                      {"mu_hat", f.mu_hat},
                      {"sigma_hat", f.sigma_hat},
                      {"coverage", f.coverage},
                      {"lower_limit", f.lower_limit},
                      {"upper_limit", f.upper_limit},
                      {"normal_model", {{"m", normal.intercept}, {"s", normal.slope},
                                        {"r", normal.r}, {"interval", interval_json(nri)}}},
                      {"search_trace", trace_json(f.search_trace)}};
      if (in.sample.n_total >= 10) {
        const NormalityTest nt = test_normality(in.sample, TestVariant::full);
        payload["normal_model"]["test"] = {
            {"z", nt.z}, {"p", nt.p}, {"reject", nt.reject}, {"alpha", nt.alpha}};
      }
      if (!t_trace.empty()) write_file(t_trace, trace_csv(f.search_trace, "nu"));
      std::ostringstream summary;
      summary << "t fit: nu = " << fmt(f.nu_hat) << "  QQr = " << fmt(f.qqr_at_opt)
              << "\n  mu = " << fmt(f.mu_hat) << "  sigma = " << fmt(f.sigma_hat) << "  limits ["
              << fmt(f.lower_limit) << ", " << fmt(f.upper_limit) << "]\n  normal model limits ["
              << fmt(nri.lower) << ", " << fmt(nri.upper) << "]\n";
      emitter.emit(t_c.output, in.sha256, payload, in.warnings, summary.str());
      return kExitOk;
    }

    if (*simulate) {
      json cfg = json::object();
      std::optional<std::string> digest;
      if (!config_path.empty()) {
        const std::string text = read_all(config_path);
        digest = sha256_hex(text);
        try {
          cfg = json::parse(text);
        } catch (const json::parse_error& e) {
          throw sim::ConfigError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!cfg.is_object()) throw sim::ConfigError("config file must hold a JSON object");
        if (cfg.contains("study") && cfg["study"] != study) {
          throw UsageError("config study '" + cfg["study"].get<std::string>() +
                           "' does not match '" + study + "'");
        }
      }
      try {
        sim::parse_study_id(study);
      } catch (const sim::ConfigError& e) {
        throw UsageError(e.what());
      }
      cfg["study"] = study;
      if (full_scale) cfg["full_scale"] = true;
      if (replicates) cfg["replicates"] = *replicates;
      if (seed) cfg["seed"] = *seed;
      if (threads) cfg["threads"] = *threads;
      if (external_pvalues) cfg["external_pvalues"] = *external_pvalues;
      if (export_samples) cfg["export_samples"] = *export_samples;
      const sim::StudyConfig config = sim::config_from_json(cfg);
      const sim::StudyReport report = sim::run_study(config);

      json env = make_envelope(args, digest, sim::to_json(report, false), report.notes);
      env["runtime_seconds"] = report.runtime_seconds;
      const std::string text = env.dump(2) + "\n";
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file((std::filesystem::path(out_dir) / "report.json").string(), text);
        for (const auto& fig : report.figures) {
          write_file((std::filesystem::path(out_dir) / (fig.name + ".csv")).string(),
                     sim::to_csv(fig));
        }
      }
      if (!sim_output.empty()) write_file(sim_output, text);
      if (out_dir.empty() && sim_output.empty()) {
        out << text;
      } else {
        out << sim::to_string(config.study) << ": " << report.cells.size() << " cells, "
            << config.replicates << " replicates, " << std::fixed << std::setprecision(1)
            << report.runtime_seconds << "s\n";
        out.unsetf(std::ios::fixed);
        for (const auto& c : report.comparisons) {
          out << "  " << (c.pass ? "ok  " : "MISS") << ' ' << c.name << ": " << fmt(c.value);
          if (c.target) out << " (target " << fmt(*c.target) << ")";
          out << '\n';
        }
      }
      if (strict && !report.all_pass()) {
        err << "qqtool: reference comparisons failed (--strict)\n";
        return kExitStrict;
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "qqtool: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "qqtool: input " << e.what() << '\n';
    return kExitData;
  } catch (const ValueDomainError& e) {
    err << "qqtool: " << e.what() << " (value index " << e.index() << ")\n";
    return kExitData;
  } catch (const sim::ConfigError& e) {
    err << "qqtool: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "qqtool: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace qq::cli
