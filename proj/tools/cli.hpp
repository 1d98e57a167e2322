#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qq/qqfit.hpp"

namespace qq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitStrict = 4;

// Input file problems, reported with the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputOptions {
  // Named column of a CSV file; plain one-value-per-line input when empty.
  std::string column;
  // Values below this threshold are treated as left-censored.
  std::optional<double> censor_below;
};

struct ParsedInput {
  Sample sample;
  std::string sha256;  // of the raw bytes
  std::size_t bytes = 0;
  std::vector<std::string> warnings;
};

// Parses text holding one value per line (or a CSV column). Entries written
// "<L" are left-censored below L; their values are discarded and the largest
// such L is kept as the detection limit.
ParsedInput parse_input(std::string_view text, const InputOptions& options);

std::string sha256_hex(std::string_view bytes);

// Replaces non-finite numbers by null and records "pointer: reason" pairs.
nlohmann::json sanitize(const nlohmann::json& payload, nlohmann::json& null_reasons);

nlohmann::json make_envelope(const std::vector<std::string>& command,
                             const std::optional<std::string>& input_digest,
                             nlohmann::json payload, const std::vector<std::string>& warnings);

// Runs the command line; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qq::cli
