#include "qq/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "qq/errors.hpp"

namespace qq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(const RngStream& s) {
  if (s.algorithm_id != RngStream::kAlgorithm) {
    throw std::invalid_argument("unsupported RNG algorithm: " + s.algorithm_id);
  }
  std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                    static_cast<std::uint32_t>(s.stream_index),
                    static_cast<std::uint32_t>(s.stream_index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream RngStream::substream(std::uint64_t index) const {
  RngStream child = *this;
  child.stream_index = splitmix64(splitmix64(stream_index) ^ (index + 0x632be59bd9b4e019ULL));
  return child;
}

Generator::Generator(const RngStream& stream) : engine_(make_engine(stream)) {}

double Generator::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Generator::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

double Generator::chi_square(int df) {
  if (df < 1) throw DomainError("chi_square: degrees of freedom must be >= 1");
  double sum = 0.0;
  for (int i = 0; i < df; ++i) {
    const double z = normal();
    sum += z * z;
  }
  return sum;
}

double Generator::student_t(int df) {
  const double z = normal();
  return z / std::sqrt(chi_square(df) / df);
}

std::vector<double> rng_standard_normal(const RngStream& stream, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  Generator gen(stream);
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen.normal());
  return out;
}

}  // namespace qq
