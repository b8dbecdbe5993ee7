#include "expander/curves/field.hpp"

#include <algorithm>
#include <random>

#include "expander/arith.hpp"
#include "expander/errors.hpp"

namespace expander::curves {

PrimeField::PrimeField(u64 p)
    : p_(p)
{
    if (p < 3 || p >= (u64{1} << 32) || !arith::is_prime(p))
        throw DomainError("field characteristic must be an odd prime below 2^32, got " + std::to_string(p));
}

u64 PrimeField::reduce(std::int64_t v) const
{
    std::int64_t const m = static_cast<std::int64_t>(p_);
    std::int64_t r = v % m;
    return static_cast<u64>(r < 0 ? r + m : r);
}

u64 PrimeField::pow(u64 a, u64 e) const
{
    u64 result = 1 % p_, base = a % p_;
    while (e) {
        if (e & 1)
            result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

u64 PrimeField::inv(u64 a) const
{
    if (a % p_ == 0)
        throw DomainError("division by zero in F_" + std::to_string(p_));
    return pow(a, p_ - 2);
}

int PrimeField::legendre(u64 a) const
{
    a %= p_;
    if (a == 0)
        return 0;
    return pow(a, (p_ - 1) / 2) == 1 ? 1 : -1;
}

std::optional<u64> PrimeField::sqrt(u64 a) const
{
    a %= p_;
    if (a == 0)
        return u64{0};
    if (legendre(a) != 1)
        return std::nullopt;
    return arith::sqrt_mod(a, p_).first;
}

u64 PrimeField::smallest_nonresidue() const
{
    for (u64 u = 2;; ++u)
        if (legendre(u) == -1)
            return u;
}

namespace poly {

void trim(Poly & f)
{
    while (!f.empty() && f.back() == 0)
        f.pop_back();
}

int degree(Poly const & f)
{
    return static_cast<int>(f.size()) - 1;
}

Poly constant(u64 c)
{
    return c == 0 ? Poly{} : Poly{c};
}

Poly x_minus(PrimeField const & F, u64 root)
{
    return {F.neg(root % F.p()), 1};
}

Poly add(PrimeField const & F, Poly const & f, Poly const & g)
{
    Poly r(std::max(f.size(), g.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = F.add(i < f.size() ? f[i] : 0, i < g.size() ? g[i] : 0);
    trim(r);
    return r;
}

Poly sub(PrimeField const & F, Poly const & f, Poly const & g)
{
    Poly r(std::max(f.size(), g.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = F.sub(i < f.size() ? f[i] : 0, i < g.size() ? g[i] : 0);
    trim(r);
    return r;
}

Poly mul(PrimeField const & F, Poly const & f, Poly const & g)
{
    if (f.empty() || g.empty())
        return {};
    Poly r(f.size() + g.size() - 1, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0)
            continue;
        for (std::size_t j = 0; j < g.size(); ++j)
            r[i + j] = F.add(r[i + j], F.mul(f[i], g[j]));
    }
    trim(r);
    return r;
}

Poly scale(PrimeField const & F, Poly const & f, u64 c)
{
    Poly r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        r[i] = F.mul(f[i], c);
    trim(r);
    return r;
}

std::pair<Poly, Poly> divmod(PrimeField const & F, Poly const & f, Poly const & g)
{
    if (g.empty())
        throw DomainError("polynomial division by zero");
    if (f.size() < g.size())
        return {{}, f};
    Poly r = f;
    Poly q(f.size() - g.size() + 1, 0);
    u64 const lead_inv = F.inv(g.back());
    for (std::size_t k = q.size(); k-- > 0;) {
        u64 const c = F.mul(r[k + g.size() - 1], lead_inv);
        q[k] = c;
        if (c == 0)
            continue;
        for (std::size_t j = 0; j < g.size(); ++j)
            r[k + j] = F.sub(r[k + j], F.mul(c, g[j]));
    }
    r.resize(g.size() - 1);
    trim(r);
    trim(q);
    return {q, r};
}

Poly mod(PrimeField const & F, Poly const & f, Poly const & g)
{
    return divmod(F, f, g).second;
}

Poly monic(PrimeField const & F, Poly const & f)
{
    if (f.empty())
        return f;
    return scale(F, f, F.inv(f.back()));
}

Poly gcd(PrimeField const & F, Poly f, Poly g)
{
    while (!g.empty()) {
        Poly r = mod(F, f, g);
        f = std::move(g);
        g = std::move(r);
    }
    return monic(F, f);
}

Poly inv_mod(PrimeField const & F, Poly const & f, Poly const & m)
{
    Poly old_r = m, r = mod(F, f, m);
    Poly old_s{}, s = constant(1);
    while (!r.empty()) {
        auto [q, rem] = divmod(F, old_r, r);
        old_r = std::exchange(r, rem);
        old_s = std::exchange(s, sub(F, old_s, mul(F, q, s)));
    }
    if (degree(old_r) != 0)
        throw DomainError("polynomial is not invertible modulo the given modulus");
    return mod(F, scale(F, old_s, F.inv(old_r[0])), m);
}

Poly mulmod(PrimeField const & F, Poly const & f, Poly const & g, Poly const & m)
{
    return mod(F, mul(F, f, g), m);
}

Poly powmod(PrimeField const & F, Poly const & base, u64 e, Poly const & m)
{
    Poly result = mod(F, constant(1), m);
    Poly b = mod(F, base, m);
    while (e) {
        if (e & 1)
            result = mulmod(F, result, b, m);
        e >>= 1;
        if (e)
            b = mulmod(F, b, b, m);
    }
    return result;
}

Poly derivative(PrimeField const & F, Poly const & f)
{
    if (f.size() <= 1)
        return {};
    Poly r(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i)
        r[i - 1] = F.mul(f[i], i % F.p());
    trim(r);
    return r;
}

u64 eval(PrimeField const & F, Poly const & f, u64 x)
{
    u64 acc = 0;
    for (std::size_t i = f.size(); i-- > 0;)
        acc = F.add(F.mul(acc, x), f[i]);
    return acc;
}

Poly compose_mod(PrimeField const & F, Poly const & f, Poly const & g, Poly const & m)
{
    Poly acc;
    for (std::size_t i = f.size(); i-- > 0;)
        acc = mod(F, add(F, mul(F, acc, g), constant(f[i])), m);
    return acc;
}

} // namespace poly

namespace {

using namespace poly;

// p-th root of a polynomial whose derivative vanishes: f(X) = g(X^p) = g(X)^p.
Poly pth_root(PrimeField const & F, Poly const & f)
{
    Poly g;
    for (std::size_t i = 0; i < f.size(); i += F.p())
        g.push_back(f[i]);
    trim(g);
    return g;
}

void squarefree(PrimeField const & F, Poly f, int mult, std::vector<Factor> & out)
{
    f = monic(F, f);
    if (degree(f) <= 0)
        return;
    Poly const df = derivative(F, f);
    if (df.empty()) {
        squarefree(F, pth_root(F, f), mult * static_cast<int>(F.p()), out);
        return;
    }
    Poly c = gcd(F, f, df);
    Poly w = divmod(F, f, c).first;
    int i = 1;
    while (degree(w) > 0) {
        Poly y = gcd(F, w, c);
        Poly fac = divmod(F, w, y).first;
        if (degree(fac) > 0)
            out.push_back({monic(F, fac), i * mult});
        ++i;
        w = y;
        c = divmod(F, c, y).first;
    }
    if (degree(c) > 0)
        squarefree(F, pth_root(F, c), mult * static_cast<int>(F.p()), out);
}

void equal_degree(PrimeField const & F, Poly const & g, int d, std::mt19937_64 & rng, std::vector<Poly> & out)
{
    if (degree(g) == d) {
        out.push_back(g);
        return;
    }
    std::uniform_int_distribution<u64> coef(0, F.p() - 1);
    for (;;) {
        Poly a(static_cast<std::size_t>(degree(g)));
        for (auto & c : a)
            c = coef(rng);
        trim(a);
        if (degree(a) <= 0)
            continue;
        // a^((p^d - 1)/2) = (a^(1 + p + ... + p^(d-1)))^((p-1)/2)
        Poly t = a, acc = a;
        for (int i = 1; i < d; ++i) {
            t = powmod(F, t, F.p(), g);
            acc = mulmod(F, acc, t, g);
        }
        Poly b = powmod(F, acc, (F.p() - 1) / 2, g);
        Poly h = gcd(F, sub(F, b, constant(1)), g);
        if (degree(h) > 0 && degree(h) < degree(g)) {
            equal_degree(F, h, d, rng, out);
            equal_degree(F, divmod(F, g, h).first, d, rng, out);
            return;
        }
    }
}

} // namespace

std::vector<Factor> factor(PrimeField const & F, Poly const & f0)
{
    Poly f = f0;
    trim(f);
    if (f.empty())
        throw DomainError("cannot factor the zero polynomial");
    std::vector<Factor> sf;
    squarefree(F, f, 1, sf);
    std::mt19937_64 rng(0x5eed);
    std::vector<Factor> out;
    Poly const X{0, 1};
    for (auto const & [part, mult] : sf) {
        Poly rest = part;
        Poly h = mod(F, X, rest);
        for (int i = 1; 2 * i <= degree(rest); ++i) {
            h = powmod(F, h, F.p(), rest);
            Poly g = gcd(F, sub(F, h, X), rest);
            if (degree(g) > 0) {
                std::vector<Poly> pieces;
                equal_degree(F, g, i, rng, pieces);
                for (auto & piece : pieces)
                    out.push_back({piece, mult});
                rest = divmod(F, rest, g).first;
                h = mod(F, h, rest);
            }
        }
        if (degree(rest) > 0)
            out.push_back({monic(F, rest), mult});
    }
    std::sort(out.begin(), out.end(), [](Factor const & x, Factor const & y) {
        if (x.factor.size() != y.factor.size())
            return x.factor.size() < y.factor.size();
        return x.factor < y.factor;
    });
    return out;
}

std::vector<std::pair<u64, int>> roots(PrimeField const & F, Poly const & f)
{
    std::vector<std::pair<u64, int>> out;
    for (auto const & [g, m] : factor(F, f))
        if (degree(g) == 1)
            out.emplace_back(F.neg(g[0]), m);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace expander::curves
