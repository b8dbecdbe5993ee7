#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "expander/arith.hpp"
#include "expander/errors.hpp"

using namespace expander;
using namespace expander::arith;

namespace {

// li(x) - li(2) from the power series li(x) = gamma + ln ln x + sum (ln x)^n / (n n!).
double li_series(double x)
{
    auto full = [](double y) {
        double const L = std::log(y);
        double term = 1, sum = 0;
        for (int n = 1; n < 400; ++n) {
            term *= L / n;
            sum += term / n;
        }
        return 0.57721566490153286 + std::log(L) + sum;
    };
    return full(x) - full(2.0);
}

std::uint64_t naive_prime_count(std::uint64_t n)
{
    std::uint64_t count = 0;
    for (std::uint64_t k = 2; k <= n; ++k) {
        bool prime = true;
        for (std::uint64_t d = 2; d * d <= k; ++d)
            if (k % d == 0) {
                prime = false;
                break;
            }
        count += prime;
    }
    return count;
}

int legendre_by_euler(std::int64_t a, std::int64_t p)
{
    std::int64_t const r = mod(a, p);
    if (r == 0)
        return 0;
    return pow_mod(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>((p - 1) / 2), static_cast<std::uint64_t>(p)) == 1 ? 1 : -1;
}

} // namespace

TEST(Li, ValueAtTwoIsZero)
{
    EXPECT_NEAR(li(2.0), 0.0, 1e-12);
}

TEST(Li, MatchesSeries)
{
    for (double x : {10.0, 100.0, 1000.0, 10000.0})
        EXPECT_NEAR(li(x), li_series(x), 1e-6) << x;
    EXPECT_NEAR(li(100.0), 29.0809778039621, 1e-9);
    EXPECT_NEAR(li(10000.0), 1245.09205211927, 1e-9);
}

TEST(Li, MonotoneAndAdditive)
{
    double prev = li(2.0);
    for (double x = 2.5; x < 2000; x *= 1.37) {
        double const v = li(x);
        EXPECT_GT(v, prev);
        prev = v;
    }
    // li(y) - li(x) against a composite Simpson rule on [x, y]
    double const x = 37.0, y = 512.0;
    int const n = 20000;
    double const h = (y - x) / n;
    double s = 1 / std::log(x) + 1 / std::log(y);
    for (int i = 1; i < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) / std::log(x + i * h);
    EXPECT_NEAR(li(y) - li(x), s * h / 3, 1e-9);
}

TEST(Li, RejectsBelowTwo)
{
    EXPECT_THROW(li(1.5), DomainError);
}

TEST(Factorize, SmallExamples)
{
    auto f = factorize(std::int64_t{12});
    EXPECT_EQ(f.sign, 1);
    ASSERT_EQ(f.factors.size(), 2u);
    EXPECT_EQ(f.factors[0], (PrimePower{2, 2}));
    EXPECT_EQ(f.factors[1], (PrimePower{3, 1}));

    auto g = factorize(std::int64_t{-12});
    EXPECT_EQ(g.sign, -1);
    EXPECT_EQ(g.factors, f.factors);
}

TEST(Factorize, MersennePrime)
{
    std::uint64_t const m61 = (std::uint64_t{1} << 61) - 1;
    EXPECT_TRUE(is_prime(m61));
    auto f = factorize(BigInt(m61));
    ASSERT_EQ(f.factors.size(), 1u);
    EXPECT_EQ(f.factors[0].prime, BigInt(m61));
}

TEST(Factorize, RejectsZero)
{
    EXPECT_THROW(factorize(std::int64_t{0}), DomainError);
}

TEST(Factorize, RandomProductsReconstruct)
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> dist(2, 1'000'000'000'000ULL);
    for (int i = 0; i < 200; ++i) {
        std::uint64_t const n = dist(rng);
        auto f = factorize(BigInt(n));
        EXPECT_EQ(f.value(), BigInt(n));
        for (std::size_t k = 0; k < f.factors.size(); ++k) {
            EXPECT_TRUE(is_prime(f.factors[k].prime));
            if (k)
                EXPECT_LT(f.factors[k - 1].prime, f.factors[k].prime);
        }
    }
}

TEST(Factorize, SemiprimeNeedsRho)
{
    // two primes above the trial-division bound
    BigInt const p("1000000007"), q("998244353");
    BigInt const r("18446744073709551557"); // largest 64-bit prime
    auto f = factorize(BigInt(p * q * r));
    ASSERT_EQ(f.factors.size(), 3u);
    EXPECT_EQ(f.value(), p * q * r);
}

TEST(Primality, AgreesWithTrialDivision)
{
    for (std::uint64_t n = 0; n < 5000; ++n) {
        bool naive = n >= 2;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) {
                naive = false;
                break;
            }
        EXPECT_EQ(is_prime(n), naive) << n;
    }
    // strong pseudoprimes to several small bases
    EXPECT_FALSE(is_prime(std::uint64_t{3215031751}));
    EXPECT_FALSE(is_prime(std::uint64_t{3825123056546413051ULL}));
}

TEST(Kronecker, Examples)
{
    EXPECT_EQ(kronecker(-4, 2), 0);
    EXPECT_EQ(kronecker(-23, 2), 1);
    EXPECT_EQ(kronecker(-3, 7), 1);
    EXPECT_EQ(kronecker(-3, 2), -1);
    EXPECT_EQ(kronecker(5, 1), 1);
}

TEST(Kronecker, AgreesWithEulerCriterion)
{
    for (std::int64_t p : {3, 5, 7, 11, 13, 101, 997})
        for (std::int64_t a = -50; a <= 50; ++a)
            EXPECT_EQ(kronecker(a, p), legendre_by_euler(a, p)) << a << " " << p;
}

TEST(Kronecker, MultiplicativeInDenominator)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> dd(-5000, 5000), nn(1, 2000);
    int checked = 0;
    while (checked < 500) {
        std::int64_t const D = dd(rng), m = 2 * nn(rng) + 1, n = 2 * nn(rng) + 1;
        if (std::gcd(m, n) != 1)
            continue;
        EXPECT_EQ(kronecker(D, m * n), kronecker(D, m) * kronecker(D, n));
        ++checked;
    }
}

TEST(SqrtMod, Examples)
{
    EXPECT_EQ(sqrt_mod(4, 7), (std::pair<std::uint64_t, std::uint64_t>{2, 5}));
    EXPECT_EQ(sqrt_mod(2, 7), (std::pair<std::uint64_t, std::uint64_t>{3, 4}));
    EXPECT_THROW(sqrt_mod(3, 7), NonResidue);
}

TEST(SqrtMod, RootsSquareBack)
{
    for (std::uint64_t p : {3ULL, 5ULL, 13ULL, 17ULL, 97ULL, 257ULL, 65537ULL, 1000000007ULL}) {
        for (std::uint64_t a = 0; a < 300; ++a) {
            std::uint64_t const r = a % p;
            if (kronecker(static_cast<std::int64_t>(r), static_cast<std::int64_t>(p)) == -1) {
                EXPECT_THROW(sqrt_mod(r, p), NonResidue);
                continue;
            }
            auto [x, y] = sqrt_mod(r, p);
            EXPECT_EQ(mul_mod(x, x, p), r);
            EXPECT_EQ(mul_mod(y, y, p), r);
            EXPECT_LE(x, y);
            EXPECT_EQ((x + y) % p, 0u);
        }
    }
}

TEST(Primes, Sieve)
{
    EXPECT_EQ(primes_up_to(10), (std::vector<std::uint64_t>{2, 3, 5, 7}));
    EXPECT_EQ(primes_up_to(2), (std::vector<std::uint64_t>{2}));
    EXPECT_EQ(primes_up_to(10000).size(), 1229u);
    EXPECT_EQ(primes_up_to(10000).size(), naive_prime_count(10000));
}

TEST(ModularHelpers, Inverse)
{
    for (std::uint64_t a = 1; a < 100; ++a)
        EXPECT_EQ(mul_mod(a, inv_mod(a, 101), 101), 1u);
    EXPECT_THROW(inv_mod(6, 9), DomainError);
    EXPECT_EQ(euler_phi(15), 8u);
    EXPECT_EQ(largest_prime_factor(2100), 7u);
}
