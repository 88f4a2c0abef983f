#include "vrl/numeric.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdlib>

namespace vrl {

namespace {

using BigInt = boost::multiprecision::cpp_int;

BigInt parse_integer(const std::string& text, const std::string& original) {
  if (text.empty()) throw DomainError("malformed number: '" + original + "'");
  std::size_t i = (text[0] == '+' || text[0] == '-') ? 1 : 0;
  if (i == text.size()) throw DomainError("malformed number: '" + original + "'");
  for (; i < text.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      throw DomainError("malformed number: '" + original + "'");
  return BigInt(text);
}

BigInt pow10(long exp) {
  BigInt out = 1;
  for (long i = 0; i < exp; ++i) out *= 10;
  return out;
}

}  // namespace

Rational rational_from_string(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    BigInt num = parse_integer(text.substr(0, slash), text);
    BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw DomainError("zero denominator in '" + text + "'");
    return Rational(num) / Rational(den);
  }

  // Decimal with optional exponent, parsed exactly.
  std::string mantissa = text;
  long exponent = 0;
  auto e = text.find_first_of("eE");
  if (e != std::string::npos) {
    mantissa = text.substr(0, e);
    exponent = std::strtol(text.c_str() + e + 1, nullptr, 10);
  }
  long frac_digits = 0;
  auto dot = mantissa.find('.');
  if (dot != std::string::npos) {
    frac_digits = static_cast<long>(mantissa.size() - dot - 1);
    mantissa.erase(dot, 1);
  }
  BigInt units = parse_integer(mantissa, text);
  Rational out(units);
  long scale = exponent - frac_digits;
  if (scale > 0)
    out *= Rational(pow10(scale));
  else if (scale < 0)
    out /= Rational(pow10(-scale));
  return out;
}

std::string rational_to_string(const Rational& x) {
  BigInt num = boost::multiprecision::numerator(x);
  BigInt den = boost::multiprecision::denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

json ScalarTraits<Rational>::format(const Rational& x) {
  BigInt den = boost::multiprecision::denominator(x);
  if (den == 1) {
    BigInt num = boost::multiprecision::numerator(x);
    if (num >= std::numeric_limits<std::int64_t>::min() &&
        num <= std::numeric_limits<std::int64_t>::max())
      return num.convert_to<std::int64_t>();
  }
  return rational_to_string(x);
}

}  // namespace vrl
