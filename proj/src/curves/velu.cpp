#include "expander/curves/velu.hpp"

#include <algorithm>

#include "expander/arith.hpp"
#include "expander/errors.hpp"

namespace expander::curves {

using namespace poly;

namespace {

Poly cubic(Curve const & E)
{
    Poly f{E.b, E.a, 0, 1};
    trim(f);
    return f;
}

// Arithmetic in F_p[t]/(m).
struct Extension
{
    PrimeField const & F;
    Poly m;

    Poly mul(Poly const & x, Poly const & y) const { return mulmod(F, x, y, m); }
    Poly add(Poly const & x, Poly const & y) const { return poly::add(F, x, y); }
    Poly sub(Poly const & x, Poly const & y) const { return poly::sub(F, x, y); }
    Poly c(u64 v) const { return mod(F, constant(v % F.p()), m); }
    Poly div(Poly const & x, Poly const & y) const
    {
        if (mod(F, y, m).empty())
            throw DomainError("division by zero in extension field");
        return mul(x, inv_mod(F, y, m));
    }
};

// x([i]Q) for i = 1..d from x(Q), using x-only doubling and differential addition.
std::vector<Poly> x_multiples(Curve const & E, Extension const & K, Poly const & x1, int d)
{
    std::vector<Poly> xs{Poly{}, x1};
    if (d >= 2) {
        Poly const x1sq = K.mul(x1, x1);
        Poly const t = K.sub(x1sq, K.c(E.a));
        Poly const num = K.sub(K.mul(t, t), K.mul(K.c(8 * E.b % E.p), x1));
        Poly const fx = K.add(K.mul(K.add(x1sq, K.c(E.a)), x1), K.c(E.b));
        xs.push_back(K.div(num, K.mul(K.c(4), fx)));
    }
    for (int i = 2; i < d; ++i) {
        Poly const & xi = xs[static_cast<std::size_t>(i)];
        Poly const s = K.add(xi, x1);
        Poly const num = K.add(K.mul(K.mul(K.c(2), s), K.add(K.c(E.a), K.mul(xi, x1))), K.c(4 * E.b % E.p));
        Poly const diff = K.sub(xi, x1);
        xs.push_back(K.sub(K.div(num, K.mul(diff, diff)), xs[static_cast<std::size_t>(i - 1)]));
    }
    return xs;
}

// prod (X - x_i) over the extension; nullopt unless every coefficient lies in F_p.
std::optional<Poly> rational_product(Extension const & K, std::vector<Poly> const & xs)
{
    std::vector<Poly> coeffs{K.c(1)};
    for (std::size_t i = 1; i < xs.size(); ++i) {
        std::vector<Poly> next(coeffs.size() + 1);
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            next[k + 1] = K.add(next[k + 1], coeffs[k]);
            next[k] = K.sub(next[k], K.mul(coeffs[k], xs[i]));
        }
        coeffs = std::move(next);
    }
    Poly out;
    for (auto const & c : coeffs) {
        if (degree(c) > 0)
            return std::nullopt;
        out.push_back(c.empty() ? 0 : c[0]);
    }
    trim(out);
    return out;
}

} // namespace

Poly division_polynomial(Curve const & E, int n)
{
    if (n < 0)
        throw DomainError("division polynomial index must be non-negative");
    PrimeField const F(E.p);
    u64 const a = E.a, b = E.b;
    Poly const Fx = cubic(E);
    Poly const F2 = mul(F, Fx, Fx);
    std::vector<Poly> g(static_cast<std::size_t>(std::max(n, 4) + 1));
    g[0] = {};
    g[1] = constant(1);
    g[2] = constant(2);
    g[3] = {F.neg(F.mul(a, a)), F.mul(12, b), F.mul(6, a), 0, 3};
    g[4] = {F.mul(4, F.neg(F.add(F.mul(8, F.mul(b, b)), F.pow(a, 3)))),
            F.mul(4, F.neg(F.mul(4, F.mul(a, b)))),
            F.mul(4, F.neg(F.mul(5, F.mul(a, a)))),
            F.mul(80, b),
            F.mul(20, a),
            0,
            4};
    for (auto & gi : g)
        trim(gi);
    u64 const half = F.inv(2);
    for (int k = 5; k <= n; ++k) {
        auto G = [&](int i) -> Poly const & { return g[static_cast<std::size_t>(i)]; };
        Poly r;
        if (k % 2) {
            int const m = (k - 1) / 2;
            Poly const t1 = mul(F, G(m + 2), mul(F, G(m), mul(F, G(m), G(m))));
            Poly const t2 = mul(F, G(m - 1), mul(F, G(m + 1), mul(F, G(m + 1), G(m + 1))));
            r = m % 2 == 0 ? sub(F, mul(F, F2, t1), t2) : sub(F, t1, mul(F, F2, t2));
        } else {
            int const m = k / 2;
            Poly const t = sub(F, mul(F, G(m + 2), mul(F, G(m - 1), G(m - 1))), mul(F, G(m - 2), mul(F, G(m + 1), G(m + 1))));
            r = mul(F, scale(F, G(m), half), t);
        }
        g[static_cast<std::size_t>(k)] = r;
    }
    return g[static_cast<std::size_t>(n)];
}

Isogeny velu_isogeny(Curve const & E, int ell, Poly const & kernel_polynomial)
{
    PrimeField const F(E.p);
    Isogeny phi;
    phi.domain_ = E;
    phi.degree_ = ell;
    if (ell == 1) {
        phi.codomain_ = E;
        return phi;
    }
    Poly const psi = monic(F, kernel_polynomial);
    if (ell == 2) {
        if (degree(psi) != 1)
            throw DomainError("a 2-isogeny kernel polynomial has degree 1");
        u64 const x0 = F.neg(psi[0]);
        if (eval(F, cubic(E), x0) != 0)
            throw DomainError("x0 is not the abscissa of a 2-torsion point");
        u64 const v = F.add(F.mul(3, F.mul(x0, x0)), E.a);
        u64 const w = F.mul(x0, v);
        phi.kernel_ = psi;
        phi.v_ = v;
        phi.codomain_ = Curve{E.p, F.sub(E.a, F.mul(5, v)), F.sub(E.b, F.mul(7, w))};
        return phi;
    }
    if (ell < 3 || ell % 2 == 0 || !arith::is_prime(static_cast<std::uint64_t>(ell)))
        throw DomainError("isogeny degree must be 1, 2 or an odd prime");
    int const d = (ell - 1) / 2;
    if (degree(psi) != d)
        throw DomainError("kernel polynomial has the wrong degree for ell=" + std::to_string(ell));
    if (!mod(F, division_polynomial(E, ell), psi).empty())
        throw DomainError("kernel polynomial does not divide the division polynomial");
    auto coef = [&](int k) -> u64 { return k >= 0 ? psi[static_cast<std::size_t>(k)] : 0; };
    u64 const s1 = F.neg(coef(d - 1));
    u64 const s2 = coef(d - 2);
    u64 const s3 = F.neg(coef(d - 3));
    u64 const dd = static_cast<u64>(d) % E.p;
    u64 const power2 = F.sub(F.mul(s1, s1), F.mul(2, s2));
    u64 const power3 = F.add(F.sub(F.pow(s1, 3), F.mul(3, F.mul(s1, s2))), F.mul(3, s3));
    u64 const v = F.add(F.mul(6, power2), F.mul(2, F.mul(E.a, dd)));
    u64 const w = F.add(F.add(F.mul(10, power3), F.mul(6, F.mul(E.a, s1))), F.mul(4, F.mul(E.b, dd)));
    phi.kernel_ = psi;
    phi.codomain_ = Curve{E.p, F.sub(E.a, F.mul(5, v)), F.sub(E.b, F.mul(7, w))};
    return phi;
}

Point Isogeny::operator()(Point const & P) const
{
    if (P.infinity)
        return P;
    if (!on_curve(domain_, P))
        throw DomainError("point " + to_string(P) + " is not on the domain curve");
    if (degree_ == 1)
        return P;
    PrimeField const F(domain_.p);
    u64 const x = P.x, y = P.y;
    if (eval(F, kernel_, x) == 0)
        return Point::at_infinity();
    if (degree_ == 2) {
        u64 const x0 = F.neg(kernel_[0]);
        u64 const inv = F.inv(F.sub(x, x0));
        u64 const X = F.add(x, F.mul(v_, inv));
        u64 const dX = F.sub(1, F.mul(v_, F.mul(inv, inv)));
        return Point::affine(X, F.mul(y, dX));
    }
    Poly const d1 = derivative(F, kernel_);
    Poly const d2 = derivative(F, d1);
    Poly const d3 = derivative(F, d2);
    u64 const psi_inv = F.inv(eval(F, kernel_, x));
    u64 const r = F.mul(eval(F, d1, x), psi_inv);
    u64 const q2 = F.mul(eval(F, d2, x), psi_inv);
    u64 const q3 = F.mul(eval(F, d3, x), psi_inv);
    u64 const r1 = F.sub(q2, F.mul(r, r));
    u64 const r2 = F.sub(F.sub(q3, F.mul(q2, r)), F.mul(2, F.mul(r, r1)));
    u64 const fx = F.add(F.mul(F.add(F.mul(x, x), domain_.a), x), domain_.b);
    u64 const f1 = F.add(F.mul(3, F.mul(x, x)), domain_.a);
    u64 const f2 = F.mul(6, x);
    u64 const ell = static_cast<u64>(degree_) % domain_.p;
    u64 const s1 = F.neg(kernel_[kernel_.size() - 2]);
    u64 const X = F.sub(F.sub(F.sub(F.mul(ell, x), F.mul(2, s1)), F.mul(2, F.mul(f1, r))), F.mul(4, F.mul(fx, r1)));
    u64 const dX = F.sub(F.sub(F.sub(ell, F.mul(2, F.mul(f2, r))), F.mul(6, F.mul(f1, r1))), F.mul(4, F.mul(fx, r2)));
    return Point::affine(X, F.mul(y, dX));
}

Isogeny velu_isogeny(Curve const & E, int ell, Point const & generator)
{
    if (ell == 1) {
        if (!generator.infinity)
            throw DomainError("kernel generator does not have order 1");
        return velu_isogeny(E, 1, Poly{});
    }
    if (generator.infinity || !multiply(E, generator, ell).infinity || !on_curve(E, generator))
        throw DomainError("kernel generator does not have order " + std::to_string(ell));
    PrimeField const F(E.p);
    if (ell == 2)
        return velu_isogeny(E, 2, x_minus(F, generator.x));
    Poly psi = constant(1);
    Point Q = generator;
    for (int i = 1; i <= (ell - 1) / 2; ++i) {
        psi = mul(F, psi, x_minus(F, Q.x));
        Q = add(E, Q, generator);
    }
    return velu_isogeny(E, ell, psi);
}

Isogeny velu_isogeny(Curve const & E, int ell, Poly const & modulus, Poly const & x)
{
    PrimeField const F(E.p);
    Extension const K{F, monic(F, modulus)};
    if (degree(K.m) < 1)
        throw DomainError("extension modulus must have positive degree");
    Poly const x1 = mod(F, x, K.m);
    if (ell == 2) {
        if (!compose_mod(F, cubic(E), x1, K.m).empty())
            throw DomainError("kernel generator does not have order 2");
        if (degree(x1) > 0)
            throw NotRational("2-torsion point is not defined over F_p");
        return velu_isogeny(E, 2, x_minus(F, x1.empty() ? 0 : x1[0]));
    }
    if (ell < 3 || ell % 2 == 0 || !arith::is_prime(static_cast<std::uint64_t>(ell)))
        throw DomainError("isogeny degree must be 2 or an odd prime");
    if (!compose_mod(F, division_polynomial(E, ell), x1, K.m).empty())
        throw DomainError("kernel generator does not have order " + std::to_string(ell));
    auto const xs = x_multiples(E, K, x1, (ell - 1) / 2);
    auto const psi = rational_product(K, xs);
    if (!psi)
        throw NotRational("kernel subgroup is not Galois-stable over F_" + std::to_string(E.p));
    return velu_isogeny(E, ell, *psi);
}

std::vector<Poly> rational_kernels(Curve const & E, int ell)
{
    PrimeField const F(E.p);
    std::vector<Poly> out;
    if (ell == 2) {
        for (auto [x0, m] : roots(F, cubic(E)))
            out.push_back(x_minus(F, x0));
        return out;
    }
    if (ell < 3 || ell % 2 == 0 || !arith::is_prime(static_cast<std::uint64_t>(ell)))
        throw DomainError("rational_kernels needs a prime degree");
    if (static_cast<u64>(ell) == E.p)
        throw DomainError("isogeny degree equals the characteristic");
    int const d = (ell - 1) / 2;
    for (auto const & [g, m] : factor(F, division_polynomial(E, ell))) {
        if (degree(g) > d)
            continue;
        Extension const K{F, g};
        auto const xs = x_multiples(E, K, mod(F, Poly{0, 1}, g), d);
        if (auto psi = rational_product(K, xs))
            out.push_back(*psi);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace expander::curves
