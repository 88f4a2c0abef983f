#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "vrl/errors.hpp"

namespace vrl {

// Probabilities and rewards are computed either in plain doubles or in
// arbitrary-precision rationals. Expression templates are disabled so the
// rational type behaves like an ordinary value type in generic code.
using Rational =
    boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                  boost::multiprecision::et_off>;

using json = nlohmann::ordered_json;

// Exact parse of "p/q", integer, or decimal text (optional exponent).
Rational rational_from_string(const std::string& text);

std::string rational_to_string(const Rational& x);

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static const char* mode_name() { return "float"; }

  static double from_long(long long n) { return static_cast<double>(n); }
  static double ratio(long long num, long long den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double to_double(double x) { return x; }
  static double abs(double x) { return std::fabs(x); }

  // Default comparison tolerance for CP / consistency checks.
  static double default_tol() { return 1e-9; }
  // Distribution sums are validated at this tolerance.
  static double sum_tol() { return 1e-12; }
  // extract_prior validation (negative entries, sum deviation).
  static double extraction_tol() { return 1e-6; }

  static double parse(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string())
      return rational_from_string(j.get<std::string>()).convert_to<double>();
    throw DomainError("expected a number or a numeric string");
  }
  static json format(double x) { return x; }
  static std::string to_string(double x) { return json(x).dump(); }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static const char* mode_name() { return "exact"; }

  static Rational from_long(long long n) { return Rational(n); }
  static Rational ratio(long long num, long long den) {
    return Rational(num) / Rational(den);
  }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static Rational abs(const Rational& x) {
    return x < 0 ? Rational(-x) : x;
  }

  static Rational default_tol() { return Rational(0); }
  static Rational sum_tol() { return Rational(0); }
  static Rational extraction_tol() { return Rational(0); }

  static Rational parse(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return Rational(j.get<double>());
    if (j.is_string()) return rational_from_string(j.get<std::string>());
    throw DomainError("expected a number or a numeric string");
  }
  static json format(const Rational& x);
  static std::string to_string(const Rational& x) { return rational_to_string(x); }
};

}  // namespace vrl
