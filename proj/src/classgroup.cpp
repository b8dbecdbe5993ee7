#include "expander/classgroup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>
#include <sstream>

#include "expander/arith.hpp"
#include "expander/errors.hpp"

namespace expander::classgroup {

namespace {

using i128 = __int128;

struct Egcd
{
    i128 u, v, d;
};

// u a + v b = d = gcd(a, b), d >= 0
Egcd extended_gcd(i128 a, i128 b)
{
    i128 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        i128 const q = old_r / r;
        old_r = std::exchange(r, old_r - q * r);
        old_s = std::exchange(s, old_s - q * s);
        old_t = std::exchange(t, old_t - q * t);
    }
    if (old_r < 0)
        return {-old_s, -old_t, -old_r};
    return {old_s, old_t, old_r};
}

i128 floor_mod(i128 a, i128 m)
{
    i128 r = a % m;
    return r < 0 ? r + m : r;
}

i128 floor_div(i128 a, i128 b)
{
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

std::int64_t narrow(i128 v)
{
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw DomainError("quadratic form coefficient overflow");
    return static_cast<std::int64_t>(v);
}

} // namespace

bool QuadForm::is_reduced() const
{
    if (a <= 0)
        return false;
    if (!(-a < b && b <= a && a <= c))
        return false;
    if (a == c && b < 0)
        return false;
    return true;
}

bool QuadForm::is_primitive() const
{
    return std::gcd(std::gcd(a, b), c) == 1;
}

std::string QuadForm::to_string() const
{
    std::ostringstream os;
    os << '(' << a << ',' << b << ',' << c << ')';
    return os.str();
}

QuadForm parse_form(std::string const & text)
{
    static std::regex const pattern(R"(\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern))
        throw DomainError("malformed form '" + text + "', expected (a,b,c)");
    return {std::stoll(m[1]), std::stoll(m[2]), std::stoll(m[3])};
}

QuadForm reduce(QuadForm f)
{
    if (f.discriminant() >= 0 || f.a <= 0)
        throw DomainError("form " + f.to_string() + " is not positive definite");
    if (!f.is_primitive())
        throw DomainError("form " + f.to_string() + " is not primitive");
    i128 a = f.a, b = f.b, c = f.c;
    for (;;) {
        if (!(-a < b && b <= a)) {
            // b = 2aq + r with -a < r <= a
            i128 q = floor_div(b, 2 * a);
            i128 r = b - 2 * a * q;
            if (r > a) {
                r -= 2 * a;
                ++q;
            }
            c -= (b + r) / 2 * q;
            b = r;
        }
        if (a > c) {
            b = -b;
            std::swap(a, c);
            continue;
        }
        if (a == c && b < 0)
            b = -b;
        break;
    }
    return {narrow(a), narrow(b), narrow(c)};
}

QuadForm compose(QuadForm const & f, QuadForm const & g)
{
    std::int64_t const D = f.discriminant();
    if (g.discriminant() != D)
        throw DomainError("cannot compose forms of discriminants " + std::to_string(D) + " and "
                          + std::to_string(g.discriminant()));
    QuadForm f1 = f, f2 = g;
    if (f1.a > f2.a)
        std::swap(f1, f2);
    i128 const a1 = f1.a, b1 = f1.b;
    i128 const a2 = f2.a, b2 = f2.b, c2 = f2.c;
    i128 const s = (b1 + b2) / 2;
    i128 const n = b2 - s;
    i128 y1, d;
    if (a2 % a1 == 0) {
        y1 = 0;
        d = a1;
    } else {
        auto const e = extended_gcd(a2, a1);
        y1 = e.u;
        d = e.d;
    }
    i128 x2, y2, d1;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        auto const e = extended_gcd(s, d);
        x2 = e.u;
        y2 = -e.v;
        d1 = e.d;
    }
    i128 const v1 = a1 / d1;
    i128 const v2 = a2 / d1;
    i128 const r = floor_mod(y1 * y2 * n - x2 * c2, v1);
    i128 const b3 = b2 + 2 * v2 * r;
    i128 const a3 = v1 * v2;
    i128 const c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
    return reduce({narrow(a3), narrow(b3), narrow(c3)});
}

QuadForm inverse(QuadForm const & f)
{
    return reduce({f.a, -f.b, f.c});
}

QuadForm principal_form(std::int64_t D)
{
    if (!is_discriminant(D))
        throw DomainError(std::to_string(D) + " is not a negative discriminant");
    if (arith::mod(D, 4) == 0)
        return {1, 0, -D / 4};
    return {1, 1, (1 - D) / 4};
}

bool is_discriminant(std::int64_t D)
{
    if (D >= 0)
        return false;
    std::int64_t const r = arith::mod(D, 4);
    return r == 0 || r == 1;
}

DiscriminantParts split_discriminant(std::int64_t D)
{
    if (!is_discriminant(D))
        throw DomainError(std::to_string(D) + " is not a negative discriminant");
    std::int64_t kernel = -1;
    std::int64_t root = 1;
    for (auto [p, e] : arith::factor_small(static_cast<std::uint64_t>(-D))) {
        auto const pi = static_cast<std::int64_t>(p);
        for (int i = 0; i < e / 2; ++i)
            root *= pi;
        if (e % 2)
            kernel *= pi;
    }
    if (arith::mod(kernel, 4) == 1)
        return {kernel, root};
    return {4 * kernel, root / 2};
}

ClassGroup::ClassGroup(std::int64_t D)
    : D_(D)
{
    if (!is_discriminant(D))
        throw DomainError(std::to_string(D) + " is not a negative discriminant (need D < 0, D = 0 or 1 mod 4)");
    if (-D > class_group_cap)
        throw DomainError("class group enumeration is capped at |D| <= 10^8");
    std::int64_t const absD = -D;
    for (std::int64_t a = 1; 3 * a * a <= absD; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            if (((b - D) & 1) != 0)
                continue;
            std::int64_t const num = b * b - D;
            if (num % (4 * a) != 0)
                continue;
            std::int64_t const c = num / (4 * a);
            if (c < a || (c == a && b < 0))
                continue;
            QuadForm const f{a, b, c};
            if (!f.is_primitive())
                continue;
            forms_.push_back(f);
        }
    }
    std::sort(forms_.begin(), forms_.end());
    for (std::size_t i = 0; i < forms_.size(); ++i)
        by_ab_.emplace(forms_[i].a * (2 * absD + 1) + forms_[i].b + absD, i);
    identity_ = index_of(principal_form(D));
    structure_ = abelian::decompose(forms_.size(), identity_, [this](std::size_t i, std::size_t j) {
        return index_of(compose(forms_[i], forms_[j]));
    });
    by_element_.resize(forms_.size());
    for (std::size_t i = 0; i < forms_.size(); ++i)
        by_element_[structure_.group.index_of(structure_.coordinates[i])] = i;
}

std::size_t ClassGroup::index_of(QuadForm const & reduced) const
{
    std::int64_t const absD = -D_;
    auto it = by_ab_.find(reduced.a * (2 * absD + 1) + reduced.b + absD);
    if (it == by_ab_.end() || reduced.discriminant() != D_)
        throw DomainError("form " + reduced.to_string() + " is not a reduced form of discriminant " + std::to_string(D_));
    return it->second;
}

abelian::Element const & ClassGroup::element_of(QuadForm const & reduced) const
{
    return structure_.coordinates[index_of(reduced)];
}

QuadForm const & ClassGroup::form_of(abelian::Element const & x) const
{
    return forms_[by_element_[structure_.group.index_of(x)]];
}

std::int64_t ClassGroup::form_order(QuadForm const & f) const
{
    return structure_.group.element_order(element_of(f));
}

ClassGroup class_group(std::int64_t D)
{
    return ClassGroup(D);
}

std::optional<QuadForm> prime_form(std::int64_t D, std::int64_t ell)
{
    if (!is_discriminant(D))
        throw DomainError(std::to_string(D) + " is not a negative discriminant");
    if (ell < 2 || !arith::is_prime(static_cast<std::uint64_t>(ell)))
        throw DomainError(std::to_string(ell) + " is not prime");
    auto const parts = split_discriminant(D);
    if (parts.conductor % ell == 0)
        throw DomainError("prime " + std::to_string(ell) + " divides the conductor of " + std::to_string(D)
                          + " (non-invertible ideal)");
    if (arith::kronecker(D, ell) == -1)
        return std::nullopt;
    std::int64_t b = -1;
    if (ell == 2) {
        for (std::int64_t cand = 0; cand < 4; ++cand) {
            if (((cand - D) & 1) == 0 && arith::mod(cand * cand - D, 8) == 0) {
                b = cand;
                break;
            }
        }
    } else {
        auto const [r1, r2] = arith::sqrt_mod(static_cast<std::uint64_t>(arith::mod(D, ell)), static_cast<std::uint64_t>(ell));
        std::vector<std::int64_t> candidates{static_cast<std::int64_t>(r1), static_cast<std::int64_t>(r2),
                                             static_cast<std::int64_t>(r1) + ell, static_cast<std::int64_t>(r2) + ell};
        std::sort(candidates.begin(), candidates.end());
        for (auto cand : candidates) {
            if (((cand - D) & 1) == 0) {
                b = cand;
                break;
            }
        }
    }
    if (b < 0)
        throw std::logic_error("prime_form: no square root of D mod 4 ell");
    std::int64_t const c = (b * b - D) / (4 * ell);
    return reduce({ell, b, c});
}

ClassCayleyGraph class_cayley_graph(std::int64_t D, std::span<std::int64_t const> primes)
{
    ClassGroup classes(D);
    auto const parts = split_discriminant(D);
    std::vector<PrimeGenerator> generators;
    std::vector<abelian::Element> elements;
    for (auto ell : primes) {
        if (parts.conductor % ell == 0)
            continue;
        auto const pf = prime_form(D, ell);
        if (!pf)
            continue;
        PrimeGenerator gen{ell, *pf, arith::kronecker(D, ell) == 0, *pf == classes.identity()};
        elements.push_back(classes.element_of(*pf));
        elements.push_back(classes.element_of(inverse(*pf)));
        generators.push_back(gen);
    }
    if (elements.empty())
        throw DomainError("no non-inert primes available for D=" + std::to_string(D));
    abelian::CayleyGraph graph(classes.structure(), std::move(elements), true);
    return ClassCayleyGraph{std::move(classes), std::move(graph), std::move(generators)};
}

ClassCayleyGraph class_cayley_graph(std::int64_t D, std::int64_t M)
{
    if (M < 2)
        throw DomainError("prime bound M must be >= 2");
    if (!is_discriminant(D))
        throw DomainError(std::to_string(D) + " is not a negative discriminant");
    std::vector<std::int64_t> primes;
    for (auto p : arith::primes_up_to(static_cast<std::uint64_t>(M - 1)))
        primes.push_back(static_cast<std::int64_t>(p));
    auto const parts = split_discriminant(D);
    bool any = false;
    for (auto ell : primes)
        any = any || (parts.conductor % ell != 0 && arith::kronecker(D, ell) != -1);
    if (!any) {
        std::int64_t ell = 2;
        while (!arith::is_prime(static_cast<std::uint64_t>(ell)) || parts.conductor % ell == 0
               || arith::kronecker(D, ell) == -1)
            ++ell;
        throw DomainError("all primes below M=" + std::to_string(M) + " are inert or divide the conductor of D="
                          + std::to_string(D) + "; smallest admissible M is " + std::to_string(ell + 1));
    }
    return class_cayley_graph(D, std::span<std::int64_t const>(primes));
}

std::int64_t default_prime_bound(std::int64_t D, double B)
{
    return static_cast<std::int64_t>(std::ceil(std::pow(std::log(static_cast<double>(-D)), B)));
}

} // namespace expander::classgroup
