#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qq {

// Identifies a reproducible stream of random draws. Equal streams produce
// bit-identical sequences on every platform: the engine (mt19937_64), its
// seeding (std::seed_seq) and the transforms below are all fully specified.
struct RngStream {
  static constexpr const char* kAlgorithm = "mt19937_64+seed_seq+polar";

  std::string algorithm_id = kAlgorithm;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  // Independent child stream, e.g. one per simulation replicate.
  RngStream substream(std::uint64_t index) const;

  bool operator==(const RngStream&) const = default;
};

class Generator {
 public:
  explicit Generator(const RngStream& stream);

  // Uniform on (0, 1) with 53 random bits; never returns 0.
  double uniform();
  // Standard normal by the Marsaglia polar method.
  double normal();
  // Chi-square with integer degrees of freedom (sum of squared normals).
  double chi_square(int df);
  // Student t with integer degrees of freedom.
  double student_t(int df);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::vector<double> rng_standard_normal(const RngStream& stream, std::size_t count);

}  // namespace qq
