#include "perc/rational.hpp"

#include <stdexcept>

namespace perc {

Rational rational_from_string(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(text));
        const BigInt num(text.substr(0, slash));
        const BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational '" + text + "'");
    }
}

std::string to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

Rational rational_pow(const Rational& base, std::uint64_t exponent) {
    Rational acc(1), b = base;
    while (exponent) {
        if (exponent & 1) acc *= b;
        b *= b;
        exponent >>= 1;
    }
    return acc;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

bool is_integer(const Rational& q) { return denominator(q) == 1; }

BigInt floor_int(const Rational& q) {
    BigInt n = numerator(q), d = denominator(q);
    BigInt quo = n / d;
    if (n % d != 0 && n < 0) --quo;
    return quo;
}

BigInt strict_integer_above(const Rational& q) { return floor_int(q) + 1; }

}  // namespace perc
