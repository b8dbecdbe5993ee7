#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>

#include "expander/arith.hpp"
#include "expander/curves/isogeny_class.hpp"

namespace expander::curves {

// Largest prime dividing f, or 1 when f = 1.
std::int64_t conductor_gap(IsogenyClass const & cls);

struct FactoredGap
{
    arith::BigInt fundamental; // D0
    arith::BigInt conductor;   // f, largest with d = f^2 D0
    arith::Factorization conductor_factors;
    arith::BigInt gap;         // largest prime dividing f, or 1
};

// Throws DomainError when d is not a discriminant (d = 2, 3 mod 4).
FactoredGap gap_from_factored_discriminant(arith::Factorization const & d);

/*
 * Fixture format: the first non-comment line is the sign (+1, 1 or -1), then
 * one "prime exponent" pair per line. '#' starts a comment. Malformed input
 * raises IoError.
 */
arith::Factorization parse_factored_discriminant(std::istream & in, std::string const & source);
arith::Factorization load_factored_discriminant(std::filesystem::path const & path);

// 1 - prod over primes beta < p <= 2 sqrt(q) of (1 - p^-2). Primes are capped
// at 10^7, past which the tail changes the product by less than 1e-8.
double gap_probability_heuristic(double beta, double q);

} // namespace expander::curves
