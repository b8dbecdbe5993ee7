#pragma once

#include <vector>

#include "expander/curves/curve.hpp"

namespace expander::curves {

// x-only division polynomial: psi_n for odd n, psi_n / y for even n.
Poly division_polynomial(Curve const & E, int n);

/*
 * Separable isogeny given by Velu's formulas. For odd ell the kernel is
 * described by its kernel polynomial prod (X - x(Q)) over Q in K \ {O} up to
 * sign; for ell = 2 by the x-coordinate of the rational 2-torsion point.
 */
class Isogeny
{
  public:
    Curve const & domain() const { return domain_; }
    Curve const & codomain() const { return codomain_; }
    int degree() const { return degree_; }
    Poly const & kernel_polynomial() const { return kernel_; }

    Point operator()(Point const & P) const;

    friend Isogeny velu_isogeny(Curve const & E, int ell, Poly const & kernel_polynomial);

  private:
    Curve domain_;
    Curve codomain_;
    int degree_ = 1;
    Poly kernel_;
    u64 v_ = 0; // ell = 2 only
};

// ell = 1 gives the identity; ell = 2 needs a kernel polynomial X - x0 with
// x0 a root of x^3 + a x + b; odd ell needs a monic polynomial of degree
// (ell - 1)/2 dividing the ell-division polynomial.
Isogeny velu_isogeny(Curve const & E, int ell, Poly const & kernel_polynomial);

// Kernel generated by an F_p-rational point of exact order ell.
Isogeny velu_isogeny(Curve const & E, int ell, Point const & generator);

/*
 * Kernel generated by a point over F_p[t]/(modulus) (modulus irreducible) with
 * x-coordinate x. Throws DomainError when the point does not have order ell,
 * NotRational when the subgroup it generates is not Galois-stable.
 */
Isogeny velu_isogeny(Curve const & E, int ell, Poly const & modulus, Poly const & x);

// Kernel polynomials of all F_p-rational subgroups of order ell (ell prime),
// found by factoring the ell-division polynomial. Sorted.
std::vector<Poly> rational_kernels(Curve const & E, int ell);

} // namespace expander::curves
