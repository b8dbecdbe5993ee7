#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expander/curves/field.hpp"

namespace expander::curves {

// y^2 = x^3 + a x + b over F_p, p >= 5.
struct Curve
{
    u64 p = 0;
    u64 a = 0;
    u64 b = 0;

    bool operator==(Curve const &) const = default;
};

// Validates primality of p, p >= 5, and 4a^3 + 27b^2 != 0.
Curve make_curve(u64 p, std::int64_t a, std::int64_t b);
bool is_singular(Curve const & E);
u64 j_invariant(Curve const & E);
std::string to_string(Curve const & E);

// y^2 = x^3 + a x + b with j(E) = j: a = 3j(1728 - j), b = 2j(1728 - j)^2 for
// j != 0, 1728; y^2 = x^3 + 1 and y^2 = x^3 + x otherwise.
Curve curve_with_j(u64 p, u64 j);
// Quadratic twist by a non-residue u: (u^2 a, u^3 b).
Curve quadratic_twist(Curve const & E);

struct Point
{
    u64 x = 0;
    u64 y = 0;
    bool infinity = true;

    static Point at_infinity() { return {}; }
    static Point affine(u64 x, u64 y) { return {x, y, false}; }
    bool operator==(Point const &) const = default;
};

std::string to_string(Point const & P);

bool on_curve(Curve const & E, Point const & P);
Point negate(Curve const & E, Point const & P);
Point add(Curve const & E, Point const & P, Point const & Q);
Point multiply(Curve const & E, Point const & P, std::int64_t k);

// All F_p-points, point at infinity first. p <= 10^5.
std::vector<Point> points(Curve const & E);

/*
 * #E(F_p) = 1 + sum_x (1 + (x^3 + a x + b / p)). The table overload takes a
 * precomputed Legendre table chi[0..p) so enumeration can reuse it.
 */
u64 count_points(Curve const & E);
u64 count_points(Curve const & E, std::vector<signed char> const & chi);
std::vector<signed char> legendre_table(u64 p);

constexpr u64 count_points_cap = 100'000;

// Order of P, given a multiple n of it (e.g. the group order).
u64 point_order(Curve const & E, Point const & P, u64 n);

// Deterministic point of exactly the given order, if one exists. order | N.
std::optional<Point> point_of_order(Curve const & E, u64 order, u64 N);

} // namespace expander::curves
