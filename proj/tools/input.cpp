#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <sstream>

#include "cli.hpp"
#include "qq/errors.hpp"

namespace qq::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return trim(s);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == ',' && !quoted) {
      out.push_back(unquote(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(unquote(line.substr(start)));
  return out;
}

double parse_number(std::string_view token, std::size_t line) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || end != token.data() + token.size()) {
    throw ParseError("cannot parse '" + std::string(token) + "' as a number", line);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(token) + "'", line);
  return v;
}

}  // namespace

ParsedInput parse_input(std::string_view text, const InputOptions& options) {
  ParsedInput in;
  in.sha256 = sha256_hex(text);
  in.bytes = text.size();

  std::vector<double> observed;
  std::size_t k = 0;
  std::optional<double> limit = options.censor_below;
  std::optional<std::size_t> column_index;
  bool header_seen = options.column.empty();

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    std::string_view token = line;
    if (!options.column.empty()) {
      const auto fields = split_csv(line);
      if (!header_seen) {
        const auto it = std::find(fields.begin(), fields.end(), options.column);
        if (it == fields.end()) {
          throw ParseError("CSV header has no column '" + options.column + "'", line_no);
        }
        column_index = static_cast<std::size_t>(it - fields.begin());
        header_seen = true;
        continue;
      }
      if (*column_index >= fields.size()) throw ParseError("row has too few fields", line_no);
      token = fields[*column_index];
      if (token.empty()) {
        in.warnings.push_back("line " + std::to_string(line_no) + ": empty field skipped");
        continue;
      }
    }

    if (token.front() == '<') {
      const double l = parse_number(trim(token.substr(1)), line_no);
      limit = limit ? std::max(*limit, l) : l;
      ++k;
      continue;
    }
    const double v = parse_number(token, line_no);
    if (options.censor_below && v < *options.censor_below) {
      ++k;
      continue;
    }
    observed.push_back(v);
  }
  if (!header_seen) throw ParseError("input is empty; expected a CSV header", line_no);

  std::sort(observed.begin(), observed.end());
  if (k > 0 && !observed.empty() && observed.front() < *limit) {
    std::ostringstream msg;
    msg << "observed value " << observed.front() << " lies below the censoring limit " << *limit
        << "; left-censoring needs every censored entry below every observed one";
    throw DomainError(msg.str());
  }
  in.sample = Sample::left_censored(std::move(observed), k, k > 0 ? limit : std::nullopt);
  return in;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {

void sanitize_into(nlohmann::json& j, const std::string& pointer, nlohmann::json& reasons) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      reasons[pointer] = std::isnan(v) ? "not a number" : "infinite";
      j = nullptr;
    }
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      sanitize_into(it.value(), pointer + "/" + it.key(), reasons);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      sanitize_into(j[i], pointer + "/" + std::to_string(i), reasons);
    }
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

nlohmann::json sanitize(const nlohmann::json& payload, nlohmann::json& null_reasons) {
  nlohmann::json copy = payload;
  if (!null_reasons.is_object()) null_reasons = nlohmann::json::object();
  sanitize_into(copy, "", null_reasons);
  return copy;
}

nlohmann::json make_envelope(const std::vector<std::string>& command,
                             const std::optional<std::string>& input_digest,
                             nlohmann::json payload, const std::vector<std::string>& warnings) {
  nlohmann::json reasons = nlohmann::json::object();
  // Reasons recorded by the command itself (e.g. undefined back-transforms).
  if (payload.contains("null_reasons")) {
    reasons = payload["null_reasons"];
    payload.erase("null_reasons");
  }
  nlohmann::json clean = sanitize(payload, reasons);
  nlohmann::json j;
  j["tool"] = "qqtool";
  j["version"] = QQ_VERSION;
  j["command"] = command;
  j["input_digest"] = input_digest ? nlohmann::json("sha256:" + *input_digest) : nullptr;
  j["timestamp"] = utc_timestamp();
  j["payload"] = std::move(clean);
  j["warnings"] = warnings;
  j["null_reasons"] = reasons;
  return j;
}

}  // namespace qq::cli
