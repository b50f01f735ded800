#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "critkerr/cli.hpp"
#include "critkerr/error.hpp"

namespace critkerr::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view what, std::string_view text) {
  throw Error(ErrorKind::ConfigError, std::string(what) + " '" + std::string(text) + "'");
}

/// Leading number and the remaining suffix.
std::pair<double, std::string_view> split_number(std::string_view text) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{}) bad("not a number", text);
  const std::size_t used = static_cast<std::size_t>(res.ptr - s.data());
  return {value, trim(s.substr(used))};
}

}  // namespace

double unit_hz(std::string_view unit) {
  if (unit == "Hz") return 1.0;
  if (unit == "kHz") return 1.0e3;
  if (unit == "MHz") return 1.0e6;
  if (unit == "wb" || unit.empty()) return 0.0;
  bad("unknown or ambiguous frequency unit", unit);
}

double parse_frequency(std::string_view text, double omega_b_hz) {
  const auto [value, unit] = split_number(text);
  if (!std::isfinite(value)) bad("non-finite frequency", text);
  const double hz = unit_hz(unit);
  if (hz == 0.0) return value;
  if (!(omega_b_hz > 0.0)) bad("no reference frequency for", text);
  return value * hz / omega_b_hz;
}

double parse_reference(std::string_view text) {
  const auto [value, unit] = split_number(text);
  const double hz = unit_hz(unit);
  if (hz == 0.0) bad("reference frequency needs Hz, kHz or MHz", text);
  if (!(value > 0.0) || !std::isfinite(value)) bad("reference frequency must be positive", text);
  return value * hz;
}

double parse_phase(std::string_view text) {
  std::string s;
  for (char c : trim(text))
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '*') s.push_back(c);
  if (s.empty()) bad("empty phase", text);
  const std::size_t slash = s.find('/');
  const std::string num = s.substr(0, slash);
  double denom = 1.0;
  if (slash != std::string::npos) {
    const auto [d, rest] = split_number(std::string_view(s).substr(slash + 1));
    if (!rest.empty() || d == 0.0) bad("bad phase denominator", text);
    denom = d;
  }
  double value = 0.0;
  const std::size_t pi = num.find("pi");
  if (pi != std::string::npos) {
    if (pi + 2 != num.size()) bad("bad phase", text);
    double coef = 1.0;
    if (pi == 1 && num[0] == '-') {
      coef = -1.0;
    } else if (pi > 0) {
      const auto [c, rest] = split_number(std::string_view(num).substr(0, pi));
      if (!rest.empty()) bad("bad phase coefficient", text);
      coef = c;
    }
    value = coef * std::numbers::pi;
  } else {
    const auto [v, rest] = split_number(num);
    if (!rest.empty()) bad("bad phase", text);
    value = v;
  }
  return value / denom;
}

std::vector<double> SweepAxis::values() const {
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double u = static_cast<double>(i) / (steps - 1);
    v[static_cast<std::size_t>(i)] =
        log ? std::exp(std::log(start) + u * (std::log(stop) - std::log(start))) : start + u * (stop - start);
  }
  v.back() = stop;
  return v;
}

}  // namespace critkerr::cli
