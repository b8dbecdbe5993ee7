#include "expander/curves/curve.hpp"

#include <sstream>

#include "expander/arith.hpp"
#include "expander/errors.hpp"

namespace expander::curves {

namespace {

u64 rhs(PrimeField const & F, Curve const & E, u64 x)
{
    return F.add(F.mul(F.add(F.mul(x, x), E.a), x), E.b);
}

} // namespace

Curve make_curve(u64 p, std::int64_t a, std::int64_t b)
{
    if (p < 5 || !arith::is_prime(p))
        throw DomainError("curves are supported over prime fields F_p with p >= 5, got p=" + std::to_string(p));
    PrimeField const F(p);
    Curve E{p, F.reduce(a), F.reduce(b)};
    if (is_singular(E))
        throw DomainError("singular curve " + to_string(E));
    return E;
}

bool is_singular(Curve const & E)
{
    PrimeField const F(E.p);
    u64 const disc = F.add(F.mul(4, F.pow(E.a, 3)), F.mul(27, F.mul(E.b, E.b)));
    return disc == 0;
}

u64 j_invariant(Curve const & E)
{
    PrimeField const F(E.p);
    u64 const a3 = F.mul(4, F.pow(E.a, 3));
    u64 const den = F.add(a3, F.mul(27, F.mul(E.b, E.b)));
    return F.mul(F.mul(1728 % E.p, a3), F.inv(den));
}

std::string to_string(Curve const & E)
{
    std::ostringstream os;
    os << "y^2 = x^3 + " << E.a << "x + " << E.b << " over F_" << E.p;
    return os.str();
}

Curve curve_with_j(u64 p, u64 j)
{
    PrimeField const F(p);
    j %= p;
    if (j == 0)
        return make_curve(p, 0, 1);
    if (j == 1728 % p)
        return make_curve(p, 1, 0);
    u64 const k = F.sub(1728 % p, j);
    return Curve{p, F.mul(3, F.mul(j, k)), F.mul(2, F.mul(j, F.mul(k, k)))};
}

Curve quadratic_twist(Curve const & E)
{
    PrimeField const F(E.p);
    u64 const u = F.smallest_nonresidue();
    return Curve{E.p, F.mul(F.mul(u, u), E.a), F.mul(F.pow(u, 3), E.b)};
}

std::string to_string(Point const & P)
{
    if (P.infinity)
        return "O";
    return "(" + std::to_string(P.x) + "," + std::to_string(P.y) + ")";
}

bool on_curve(Curve const & E, Point const & P)
{
    if (P.infinity)
        return true;
    PrimeField const F(E.p);
    return P.x < E.p && P.y < E.p && F.mul(P.y, P.y) == rhs(F, E, P.x);
}

Point negate(Curve const & E, Point const & P)
{
    if (P.infinity)
        return P;
    return Point::affine(P.x, P.y == 0 ? 0 : E.p - P.y);
}

Point add(Curve const & E, Point const & P, Point const & Q)
{
    if (P.infinity)
        return Q;
    if (Q.infinity)
        return P;
    PrimeField const F(E.p);
    u64 lambda;
    if (P.x == Q.x) {
        if (F.add(P.y, Q.y) == 0)
            return Point::at_infinity();
        lambda = F.mul(F.add(F.mul(3, F.mul(P.x, P.x)), E.a), F.inv(F.mul(2, P.y)));
    } else {
        lambda = F.mul(F.sub(Q.y, P.y), F.inv(F.sub(Q.x, P.x)));
    }
    u64 const x3 = F.sub(F.sub(F.mul(lambda, lambda), P.x), Q.x);
    u64 const y3 = F.sub(F.mul(lambda, F.sub(P.x, x3)), P.y);
    return Point::affine(x3, y3);
}

Point multiply(Curve const & E, Point const & P, std::int64_t k)
{
    Point base = k < 0 ? negate(E, P) : P;
    u64 n = k < 0 ? static_cast<u64>(-(k + 1)) + 1 : static_cast<u64>(k);
    Point acc = Point::at_infinity();
    while (n) {
        if (n & 1)
            acc = add(E, acc, base);
        base = add(E, base, base);
        n >>= 1;
    }
    return acc;
}

std::vector<Point> points(Curve const & E)
{
    if (E.p > count_points_cap)
        throw DomainError("point enumeration is capped at p <= 10^5");
    PrimeField const F(E.p);
    std::vector<Point> out{Point::at_infinity()};
    for (u64 x = 0; x < E.p; ++x) {
        u64 const r = rhs(F, E, x);
        auto const s = F.sqrt(r);
        if (!s)
            continue;
        out.push_back(Point::affine(x, *s));
        if (*s != 0)
            out.push_back(Point::affine(x, E.p - *s));
    }
    return out;
}

std::vector<signed char> legendre_table(u64 p)
{
    std::vector<signed char> chi(p, -1);
    chi[0] = 0;
    for (u64 y = 1; y <= p / 2; ++y)
        chi[y * y % p] = 1;
    return chi;
}

u64 count_points(Curve const & E, std::vector<signed char> const & chi)
{
    PrimeField const F(E.p);
    std::int64_t total = 1 + static_cast<std::int64_t>(E.p);
    for (u64 x = 0; x < E.p; ++x)
        total += chi[rhs(F, E, x)];
    return static_cast<u64>(total);
}

u64 count_points(Curve const & E)
{
    if (E.p > count_points_cap)
        throw DomainError("exhaustive point counting is capped at p <= 10^5");
    if (is_singular(E))
        throw DomainError("singular curve " + to_string(E));
    return count_points(E, legendre_table(E.p));
}

u64 point_order(Curve const & E, Point const & P, u64 n)
{
    if (!multiply(E, P, static_cast<std::int64_t>(n)).infinity)
        throw DomainError("point order does not divide the supplied multiple");
    u64 order = n;
    for (auto [q, e] : arith::factor_small(n)) {
        for (int i = 0; i < e; ++i) {
            if (multiply(E, P, static_cast<std::int64_t>(order / q)).infinity)
                order /= q;
            else
                break;
        }
    }
    return order;
}

std::optional<Point> point_of_order(Curve const & E, u64 order, u64 N)
{
    if (order == 0 || N % order != 0)
        return std::nullopt;
    PrimeField const F(E.p);
    for (u64 x = 0; x < E.p; ++x) {
        auto const s = F.sqrt(rhs(F, E, x));
        if (!s)
            continue;
        Point const Q = multiply(E, Point::affine(x, *s), static_cast<std::int64_t>(N / order));
        if (point_order(E, Q, order) == order)
            return Q;
    }
    return std::nullopt;
}

} // namespace expander::curves
