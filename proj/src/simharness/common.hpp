#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qq/simharness.hpp"

namespace qq::sim::detail {

// Runs body(i) for i in [0, count) on `threads` workers. Each index is handled
// exactly once; callers write into per-index slots so the result does not
// depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Sample variance with divisor n - 1.
inline double variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

inline double mse_about(std::span<const double> v, double truth) {
  double s = 0.0;
  for (double x : v) s += (x - truth) * (x - truth);
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + mid));
}

inline double correlation(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Evaluates stat(begin, end) on all replicates and on `batches` contiguous
// batches; the spread of the batch values gives the Monte Carlo standard
// error of the full-sample value.
template <typename Stat>
Estimate batch_estimate(std::size_t replicates, std::size_t batches, Stat&& stat) {
  Estimate e;
  e.value = stat(std::size_t{0}, replicates);
  batches = std::min(batches, replicates / 2);
  if (batches < 2) return e;
  std::vector<double> values;
  values.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * replicates / batches;
    const std::size_t hi = (b + 1) * replicates / batches;
    values.push_back(stat(lo, hi));
  }
  e.mcse = std::sqrt(variance(values) / static_cast<double>(batches));
  return e;
}

inline std::span<const double> slice(const std::vector<double>& v, std::size_t lo,
                                     std::size_t hi) {
  return std::span<const double>(v).subspan(lo, hi - lo);
}

// Ordinary least squares for a handful of regressors; rows of `x` hold the
// regressor values (include a 1 for the intercept).
struct OlsResult {
  std::vector<double> coef;
  double r_squared = 0.0;
  double residual_sd = 0.0;
};
OlsResult ols(const std::vector<std::vector<double>>& x, const std::vector<double>& y);

// Slope of y on x with intercept.
double simple_slope(std::span<const double> x, std::span<const double> y);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Stream of replicate r within cell `cell`. Cells that share a cell index
// share their samples (common random numbers).
inline RngStream replicate_stream(const StudyConfig& c, std::uint64_t cell, std::uint64_t r) {
  return c.seed.substream(cell).substream(r);
}

// Binomial proportion with its standard error.
inline Estimate proportion(std::span<const double> hits) {
  Estimate e;
  e.value = mean(hits);
  e.mcse = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(hits.size()));
  return e;
}

// Shortest decimal form for cell labels: 0.5 -> "0.5", 2 -> "2".
inline std::string label_number(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

// Sorted standard normal sample of size n.
std::vector<double> sorted_normal(Generator& gen, std::size_t n);

}  // namespace qq::sim::detail
