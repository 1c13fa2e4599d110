#include "perc/exponents.hpp"

#include <stdexcept>

namespace perc {

namespace {

void check_dim(int d) {
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");
}

}  // namespace

Rational gamma_step(const Rational& gamma, int d) {
    check_dim(d);
    return Rational(1, 2) + rational(d - 1, 4 * std::int64_t{d} * d + 6 * d - 6) * gamma;
}

Rational gamma_sequence(int d, int i) {
    check_dim(d);
    if (i < 0) throw std::invalid_argument("iteration count must be >= 0");
    Rational g(1, 2);
    for (int k = 0; k < i; ++k) g = gamma_step(g, d);
    return g;
}

Rational gamma_limit(int d) {
    check_dim(d);
    return rational(2 * std::int64_t{d} * d + 3 * d - 3, 4 * std::int64_t{d} * d + 5 * d - 5);
}

Rational gamma_ratio(int d) {
    check_dim(d);
    return rational(d - 1, 4 * std::int64_t{d} * d + 6 * d - 6);
}

Rational delta_choice(const Rational& gamma, int d) {
    check_dim(d);
    if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("gamma must lie strictly inside (0,1)");
    const Rational delta = gamma / rational(2 * std::int64_t{d} * d + 3 * d - 3);
    // substituting k = n^delta balances the two covering terms and yields the
    // recursion step again: 1/2 + delta (d-1)/2 == gamma_step(gamma, d)
    const Rational reproduced = Rational(1, 2) + delta * rational(d - 1, 2);
    if (reproduced != gamma_step(gamma, d)) throw std::logic_error("delta choice is inconsistent with the recursion");
    return delta;
}

std::int64_t smallest_integer_exponent(const Rational& threshold) {
    return strict_integer_above(threshold).convert_to<std::int64_t>();
}

ExponentTable exponent_table(int d) {
    check_dim(d);
    ExponentTable t{d,
                    gamma_limit(d),
                    rational(2 * std::int64_t{d} * d + 2 * d - 2) / rational(2 * std::int64_t{d} * d + 3 * d - 3) *
                        rational(4 * std::int64_t{d} * d + 5 * d - 5),
                    rational(3 * std::int64_t{d} - 1) / rational(2 * std::int64_t{d} * d + 3 * d - 3) *
                        rational(4 * std::int64_t{d} * d + 5 * d - 5),
                    rational(4 * std::int64_t{d} * d + 4 * d - 3),
                    rational(2 * (std::int64_t{d} - 1) * d),
                    0,
                    0};
    t.sm_alpha = smallest_integer_exponent(t.sm_threshold);
    t.tm_alpha = smallest_integer_exponent(t.tm_threshold);
    return t;
}

}  // namespace perc
