#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "expander/arith.hpp"
#include "expander/curves/field.hpp"

namespace expander::curves {

// Classical modular polynomial Phi_ell(X, Y) with integer coefficients.
struct ModularPolynomial
{
    int ell = 0;
    // coeffs[i][j] is the coefficient of X^i Y^j; symmetric, (ell+2) x (ell+2).
    std::vector<std::vector<arith::BigInt>> coeffs;

    arith::BigInt evaluate(arith::BigInt const & x, arith::BigInt const & y) const;
    // sum coeff * 3^i * 5^j mod 2^61 - 1, over the full symmetric table
    std::uint64_t checksum() const;
};

// Phi_ell reduced modulo p.
class ModularPolynomialModP
{
  public:
    ModularPolynomialModP(ModularPolynomial const & phi, u64 p);

    int ell() const { return ell_; }
    PrimeField const & field() const { return F_; }
    u64 evaluate(u64 x, u64 y) const;
    // Phi_ell(j, Y) as a polynomial in Y.
    Poly specialize(u64 j) const;
    // F_p-roots of Phi_ell(j, Y) with multiplicity.
    std::vector<std::pair<u64, int>> neighbors(u64 j) const;

  private:
    int ell_;
    PrimeField F_;
    std::vector<std::vector<u64>> c_;
};

/*
 * File format: a header line "ell <l>", then one line "i j coeff" per monomial
 * X^i Y^j with i >= j (the mirror image is implied). '#' starts a comment.
 */
class ModularPolynomialDB
{
  public:
    static ModularPolynomialDB load(std::filesystem::path const & dir);
    // Directory from $EXPANDER_DATA_DIR, else the path configured at build time,
    // with "modular_polynomials" appended.
    static std::filesystem::path default_directory();
    static ModularPolynomialDB const & bundled();

    bool has(int ell) const { return polys_.count(ell) != 0; }
    std::vector<int> levels() const;
    ModularPolynomial const & get(int ell) const;
    ModularPolynomialModP mod_p(int ell, u64 p) const;

  private:
    std::map<int, ModularPolynomial> polys_;
};

ModularPolynomial parse_modular_polynomial(std::istream & in, std::string const & source);

} // namespace expander::curves
