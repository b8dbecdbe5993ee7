#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace expander::arith {

using BigInt = boost::multiprecision::cpp_int;
using u128 = unsigned __int128;

struct PrimePower
{
    BigInt prime;
    int exponent = 0;

    bool operator==(PrimePower const &) const = default;
};

/*
 * n = sign * prod p^e with primes strictly increasing. The factorization of
 * +-1 has an empty factor list.
 */
struct Factorization
{
    int sign = 1;
    std::vector<PrimePower> factors;

    BigInt value() const;
    std::string to_string() const;
    bool operator==(Factorization const &) const = default;
};

struct FactorOptions
{
    std::uint64_t trial_bound = 1'000'000;
    std::uint64_t rho_iterations = std::uint64_t{1} << 24;
};

// Logarithmic integral li(x) = int_2^x dt / log t, for x >= 2.
double li(double x);

bool is_prime(std::uint64_t n);
bool is_prime(BigInt const & n);

// |n| <= 2^127. Trial division, then Pollard rho (Brent) with Miller-Rabin
// certification of every reported prime.
Factorization factorize(BigInt const & n, FactorOptions const & options = {});
Factorization factorize(std::int64_t n, FactorOptions const & options = {});

// Kronecker symbol (d/n).
int kronecker(std::int64_t d, std::int64_t n);

// Both square roots of a modulo an odd prime p, smaller first. Throws
// NonResidue when a is a non-square.
std::pair<std::uint64_t, std::uint64_t> sqrt_mod(std::uint64_t a, std::uint64_t p);

std::vector<std::uint64_t> primes_up_to(std::uint64_t x);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m);
// Inverse of a modulo m; throws DomainError when gcd(a, m) != 1.
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m);
std::int64_t mod(std::int64_t a, std::int64_t m);
std::uint64_t isqrt(std::uint64_t n);
std::uint64_t euler_phi(std::uint64_t n);

// Small-integer convenience wrapper: (prime, exponent) pairs of |n|.
std::vector<std::pair<std::uint64_t, int>> factor_small(std::uint64_t n);
std::uint64_t largest_prime_factor(std::uint64_t n);

} // namespace expander::arith
