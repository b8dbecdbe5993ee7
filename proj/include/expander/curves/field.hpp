#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace expander::curves {

using u64 = std::uint64_t;

class PrimeField
{
  public:
    // p odd prime, p < 2^32.
    explicit PrimeField(u64 p);

    u64 p() const { return p_; }
    u64 reduce(std::int64_t v) const;
    u64 add(u64 a, u64 b) const { u64 s = a + b; return s >= p_ ? s - p_ : s; }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
    u64 neg(u64 a) const { return a == 0 ? 0 : p_ - a; }
    u64 mul(u64 a, u64 b) const { return a * b % p_; }
    u64 pow(u64 a, u64 e) const;
    u64 inv(u64 a) const;
    // Legendre symbol: 0, 1 or -1.
    int legendre(u64 a) const;
    std::optional<u64> sqrt(u64 a) const;
    u64 smallest_nonresidue() const;

  private:
    u64 p_;
};

// Dense polynomial over F_p, coefficient i of X^i; no trailing zeros (the zero
// polynomial is empty).
using Poly = std::vector<u64>;

namespace poly {

void trim(Poly & f);
int degree(Poly const & f);
Poly constant(u64 c);
Poly x_minus(PrimeField const & F, u64 root);
Poly add(PrimeField const & F, Poly const & f, Poly const & g);
Poly sub(PrimeField const & F, Poly const & f, Poly const & g);
Poly mul(PrimeField const & F, Poly const & f, Poly const & g);
Poly scale(PrimeField const & F, Poly const & f, u64 c);
// f = q g + r with deg r < deg g.
std::pair<Poly, Poly> divmod(PrimeField const & F, Poly const & f, Poly const & g);
Poly mod(PrimeField const & F, Poly const & f, Poly const & g);
Poly monic(PrimeField const & F, Poly const & f);
// Monic gcd (zero if both are zero).
Poly gcd(PrimeField const & F, Poly f, Poly g);
// Inverse of f modulo m; throws DomainError when not invertible.
Poly inv_mod(PrimeField const & F, Poly const & f, Poly const & m);
Poly mulmod(PrimeField const & F, Poly const & f, Poly const & g, Poly const & m);
Poly powmod(PrimeField const & F, Poly const & base, u64 e, Poly const & m);
Poly derivative(PrimeField const & F, Poly const & f);
u64 eval(PrimeField const & F, Poly const & f, u64 x);
// Composition f(g) modulo m.
Poly compose_mod(PrimeField const & F, Poly const & f, Poly const & g, Poly const & m);

} // namespace poly

struct Factor
{
    Poly factor; // monic irreducible
    int multiplicity = 1;
};

// Complete factorization into monic irreducibles, sorted by (degree, coefficients).
// Equal-degree splitting uses a fixed internal seed, so results are reproducible.
std::vector<Factor> factor(PrimeField const & F, Poly const & f);

// Roots in F_p with multiplicity, ascending.
std::vector<std::pair<u64, int>> roots(PrimeField const & F, Poly const & f);

} // namespace expander::curves
