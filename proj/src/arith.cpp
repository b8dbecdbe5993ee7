#include "expander/arith.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/multiprecision/miller_rabin.hpp>

#include "expander/errors.hpp"

namespace expander::arith {

namespace {

double simpson(double fa, double fm, double fb, double a, double b)
{
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(std::function<double(double)> const & f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol, int depth)
{
    double const m = 0.5 * (a + b);
    double const lm = 0.5 * (a + m);
    double const rm = 0.5 * (m + b);
    double const flm = f(lm);
    double const frm = f(rm);
    double const left = simpson(fa, flm, fm, a, m);
    double const right = simpson(fm, frm, fb, m, b);
    double const diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol)
        return left + right + diff / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1)
         + adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(std::function<double(double)> const & f, double a, double b, double tol)
{
    if (b <= a)
        return 0.0;
    double const fa = f(a);
    double const fb = f(b);
    double const fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 60);
}

u128 mul_mod128(u128 a, u128 b, u128 m)
{
    if (a >> 64 == 0 && b >> 64 == 0 && m >> 64 == 0)
        return (a * b) % m;
    // m < 2^127 keeps every partial sum below 2^128.
    u128 result = 0;
    a %= m;
    while (b) {
        if (b & 1) {
            result += a;
            if (result >= m)
                result -= m;
        }
        a += a;
        if (a >= m)
            a -= m;
        b >>= 1;
    }
    return result;
}

u128 pow_mod128(u128 base, u128 e, u128 m)
{
    u128 result = 1 % m;
    base %= m;
    while (e) {
        if (e & 1)
            result = mul_mod128(result, base, m);
        base = mul_mod128(base, base, m);
        e >>= 1;
    }
    return result;
}

u128 gcd128(u128 a, u128 b)
{
    while (b) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool miller_rabin_round(u128 n, u128 d, int s, u128 a)
{
    u128 x = pow_mod128(a % n, d, n);
    if (x == 1 || x == n - 1 || x == 0)
        return true;
    for (int r = 1; r < s; ++r) {
        x = mul_mod128(x, x, n);
        if (x == n - 1)
            return true;
    }
    return false;
}

bool is_prime128(u128 n)
{
    if (n < 2)
        return false;
    static constexpr std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (auto p : small) {
        if (n % p == 0)
            return n == p;
    }
    u128 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    if (n >> 64 == 0) {
        // This witness set is deterministic for every n < 2^64.
        for (auto a : small) {
            if (!miller_rabin_round(n, d, s, a))
                return false;
        }
        return true;
    }
    std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
    for (int round = 0; round < 64; ++round) {
        u128 a = (static_cast<u128>(gen()) << 64 | gen()) % (n - 3) + 2;
        if (!miller_rabin_round(n, d, s, a))
            return false;
    }
    return true;
}

u128 to_u128(BigInt const & n)
{
    return static_cast<u128>(static_cast<std::uint64_t>(n >> 64)) << 64
         | static_cast<std::uint64_t>(n & std::numeric_limits<std::uint64_t>::max());
}

BigInt from_u128(u128 n)
{
    BigInt hi = static_cast<std::uint64_t>(n >> 64);
    return (hi << 64) | BigInt(static_cast<std::uint64_t>(n));
}

u128 abs_diff(u128 a, u128 b) { return a > b ? a - b : b - a; }

// Brent's variant of Pollard rho. Returns a nontrivial factor of composite n.
u128 pollard_brent(u128 n, std::uint64_t budget)
{
    if (n % 2 == 0)
        return 2;
    std::uint64_t spent = 0;
    for (u128 c = 1; c < 64; ++c) {
        auto step = [&](u128 v) {
            u128 s = mul_mod128(v, v, n) + c;
            return s >= n ? s - n : s;
        };
        u128 y = 2, x = 2, ys = 2, q = 1, g = 1;
        std::uint64_t r = 1;
        constexpr std::uint64_t batch = 128;
        while (g == 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i)
                y = step(y);
            std::uint64_t k = 0;
            while (k < r && g == 1) {
                ys = y;
                std::uint64_t const lim = std::min(batch, r - k);
                for (std::uint64_t i = 0; i < lim; ++i) {
                    y = step(y);
                    q = mul_mod128(q, abs_diff(x, y), n);
                }
                g = gcd128(q, n);
                k += batch;
            }
            spent += r;
            r *= 2;
            if (spent > budget)
                throw FactorizationFailed("Pollard rho exceeded its iteration budget");
        }
        if (g == n) {
            do {
                ys = step(ys);
                g = gcd128(abs_diff(x, ys), n);
            } while (g == 1);
        }
        if (g != n)
            return g;
    }
    throw FactorizationFailed("Pollard rho found no factor");
}

void split(u128 n, std::vector<u128> & out, FactorOptions const & options)
{
    if (n == 1)
        return;
    if (is_prime128(n)) {
        out.push_back(n);
        return;
    }
    u128 d = pollard_brent(n, options.rho_iterations);
    split(d, out, options);
    split(n / d, out, options);
}

} // namespace

BigInt Factorization::value() const
{
    BigInt v = sign;
    for (auto const & pp : factors)
        v *= boost::multiprecision::pow(pp.prime, static_cast<unsigned>(pp.exponent));
    return v;
}

std::string Factorization::to_string() const
{
    std::ostringstream os;
    os << (sign < 0 ? "-" : "");
    if (factors.empty())
        os << "1";
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i)
            os << " * ";
        os << factors[i].prime;
        if (factors[i].exponent > 1)
            os << "^" << factors[i].exponent;
    }
    return os.str();
}

double li(double x)
{
    if (!(x >= 2.0))
        throw DomainError("li(x) requires x >= 2");
    auto f = [](double t) { return 1.0 / std::log(t); };
    constexpr double tol = 1e-10;
    constexpr double split_at = 10.0;
    if (x <= split_at)
        return integrate(f, 2.0, x, tol);
    return integrate(f, 2.0, split_at, tol / 2) + integrate(f, split_at, x, tol / 2);
}

bool is_prime(std::uint64_t n) { return is_prime128(n); }

bool is_prime(BigInt const & n)
{
    if (n < 2)
        return false;
    if (boost::multiprecision::msb(n) < 127)
        return is_prime128(to_u128(n));
    std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
    return boost::multiprecision::miller_rabin_test(n, 64, gen);
}

Factorization factorize(BigInt const & n, FactorOptions const & options)
{
    if (n == 0)
        throw DomainError("cannot factor zero");
    BigInt m = boost::multiprecision::abs(n);
    if (boost::multiprecision::msb(m) >= 127)
        throw DomainError("factorize: |n| exceeds 2^127");
    Factorization result;
    result.sign = n < 0 ? -1 : 1;
    u128 rest = to_u128(m);
    std::vector<u128> primes;
    for (std::uint64_t p = 2; p <= options.trial_bound; p += (p == 2 ? 1 : 2)) {
        if (static_cast<u128>(p) * p > rest)
            break;
        while (rest % p == 0) {
            primes.push_back(p);
            rest /= p;
        }
    }
    split(rest, primes, options);
    std::sort(primes.begin(), primes.end());
    for (u128 p : primes) {
        BigInt bp = from_u128(p);
        if (!result.factors.empty() && result.factors.back().prime == bp)
            ++result.factors.back().exponent;
        else
            result.factors.push_back({bp, 1});
    }
    return result;
}

Factorization factorize(std::int64_t n, FactorOptions const & options)
{
    return factorize(BigInt(n), options);
}

int kronecker(std::int64_t d, std::int64_t n)
{
    if (n == 0)
        return (d == 1 || d == -1) ? 1 : 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (d < 0)
            result = -result;
    }
    int v = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++v;
    }
    if (v > 0) {
        if ((d & 1) == 0)
            return 0;
        std::int64_t const r8 = mod(d, 8);
        if ((v & 1) && (r8 == 3 || r8 == 5))
            result = -result;
    }
    // Jacobi symbol (d/n) for odd positive n.
    std::int64_t a = mod(d, n);
    std::int64_t m = n;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            std::int64_t const r = m & 7;
            if (r == 3 || r == 5)
                result = -result;
        }
        std::swap(a, m);
        if ((a & 3) == 3 && (m & 3) == 3)
            result = -result;
        a %= m;
    }
    return m == 1 ? result : 0;
}

std::pair<std::uint64_t, std::uint64_t> sqrt_mod(std::uint64_t a, std::uint64_t p)
{
    if (p < 3 || (p & 1) == 0)
        throw DomainError("sqrt_mod requires an odd prime modulus");
    a %= p;
    if (a == 0)
        return {0, 0};
    if (pow_mod(a, (p - 1) / 2, p) != 1)
        throw NonResidue("sqrt_mod: " + std::to_string(a) + " is not a square mod " + std::to_string(p));
    std::uint64_t r;
    if (p % 4 == 3) {
        r = pow_mod(a, (p + 1) / 4, p);
    } else {
        // Tonelli-Shanks
        std::uint64_t q = p - 1;
        int s = 0;
        while ((q & 1) == 0) {
            q >>= 1;
            ++s;
        }
        std::uint64_t z = 2;
        while (pow_mod(z, (p - 1) / 2, p) != p - 1)
            ++z;
        std::uint64_t c = pow_mod(z, q, p);
        std::uint64_t t = pow_mod(a, q, p);
        r = pow_mod(a, (q + 1) / 2, p);
        int m = s;
        while (t != 1) {
            int i = 0;
            std::uint64_t t2 = t;
            while (t2 != 1) {
                t2 = mul_mod(t2, t2, p);
                ++i;
            }
            std::uint64_t b = c;
            for (int k = 0; k < m - i - 1; ++k)
                b = mul_mod(b, b, p);
            r = mul_mod(r, b, p);
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            m = i;
        }
    }
    std::uint64_t const other = p - r;
    return {std::min(r, other), std::max(r, other)};
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t x)
{
    std::vector<std::uint64_t> primes;
    if (x < 2)
        return primes;
    std::vector<bool> composite(x + 1, false);
    for (std::uint64_t i = 2; i <= x; ++i) {
        if (composite[i])
            continue;
        primes.push_back(i);
        for (std::uint64_t j = i * i; j <= x; j += i)
            composite[j] = true;
    }
    return primes;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m)
{
    std::uint64_t result = 1 % m;
    base %= m;
    while (e) {
        if (e & 1)
            result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    return result;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m)
{
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
    while (new_r != 0) {
        std::int64_t const quot = r / new_r;
        t = std::exchange(new_t, t - quot * new_t);
        r = std::exchange(new_r, r - quot * new_r);
    }
    if (r != 1)
        throw DomainError(std::to_string(a) + " is not invertible mod " + std::to_string(m));
    return static_cast<std::uint64_t>(mod(t, static_cast<std::int64_t>(m)));
}

std::int64_t mod(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::uint64_t isqrt(std::uint64_t n)
{
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n)
        --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

std::uint64_t euler_phi(std::uint64_t n)
{
    std::uint64_t result = n;
    for (auto [p, e] : factor_small(n))
        result = result / p * (p - 1);
    return result;
}

std::vector<std::pair<std::uint64_t, int>> factor_small(std::uint64_t n)
{
    std::vector<std::pair<std::uint64_t, int>> out;
    if (n <= 1)
        return out;
    for (auto const & pp : factorize(BigInt(n)).factors)
        out.emplace_back(static_cast<std::uint64_t>(pp.prime), pp.exponent);
    return out;
}

std::uint64_t largest_prime_factor(std::uint64_t n)
{
    auto f = factor_small(n);
    return f.empty() ? 1 : f.back().first;
}

} // namespace expander::arith
