#pragma once

#include <cstdint>
#include <vector>

#include "perc/rational.hpp"

namespace perc {

// Exact arithmetic for the two-arms exponent recursion and the derived
// thresholds, all functions of the dimension alone.

// One step of the exponent recursion: g' = 1/2 + (d-1) g / (4d^2 + 6d - 6).
Rational gamma_step(const Rational& gamma, int d);

// i-fold iteration of gamma_step starting from 1/2; strictly increasing in i
// and bounded by gamma_limit(d).
Rational gamma_sequence(int d, int i);

// Fixed point of the recursion: (2d^2 + 3d - 3) / (4d^2 + 5d - 5).
Rational gamma_limit(int d);

// Contraction ratio of the recursion: (d-1) / (4d^2 + 6d - 6).
Rational gamma_ratio(int d);

// Covering-scale choice k = n^delta with delta = gamma / (2d^2 + 3d - 3).
// Substituting it back reproduces gamma_step exactly (asserted).
Rational delta_choice(const Rational& gamma, int d);

// The strict thresholds printed by the main results, with the smallest
// integer exponents that satisfy them (ceil for fractional thresholds,
// threshold+1 for integral ones, since both inequalities are strict).
struct ExponentTable {
    int d;
    Rational gamma_limit;          // limiting two-arms exponent lower bound
    Rational sm_threshold;         // box two-arms vanishing: alpha > this
    Rational tm_threshold;         // finite-box long-range order: alpha > this
    Rational ftwoarms_exponent;    // 4d^2 + 4d - 3
    Rational connect_exponent;     // 2(d-1)d
    std::int64_t sm_alpha;         // smallest valid integer above sm_threshold
    std::int64_t tm_alpha;         // smallest valid integer above tm_threshold
};

ExponentTable exponent_table(int d);

// Helper shared with the table: smallest integer strictly above a threshold.
std::int64_t smallest_integer_exponent(const Rational& threshold);

}  // namespace perc
