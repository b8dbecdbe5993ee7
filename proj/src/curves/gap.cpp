#include "expander/curves/gap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "expander/errors.hpp"

namespace expander::curves {

using arith::BigInt;

std::int64_t conductor_gap(IsogenyClass const & cls)
{
    if (cls.f <= 1)
        return 1;
    return static_cast<std::int64_t>(arith::largest_prime_factor(static_cast<u64>(cls.f)));
}

FactoredGap gap_from_factored_discriminant(arith::Factorization const & d)
{
    if (d.sign != 1 && d.sign != -1)
        throw DomainError("sign must be +1 or -1");
    BigInt kernel = d.sign;
    arith::Factorization f;
    for (auto const & pp : d.factors) {
        if (pp.exponent < 1)
            throw DomainError("exponents must be positive");
        if (pp.exponent % 2)
            kernel *= pp.prime;
        if (pp.exponent / 2)
            f.factors.push_back({pp.prime, pp.exponent / 2});
    }
    BigInt r = kernel % 4;
    if (r < 0)
        r += 4;
    FactoredGap out;
    if (r == 1) {
        out.fundamental = kernel;
    } else {
        // d = 4 k g'^2 with k = 2, 3 mod 4: one factor 2 of the square root goes to D0
        if (f.factors.empty() || f.factors.front().prime != 2)
            throw DomainError("not a discriminant: " + d.to_string() + " is 2 or 3 mod 4");
        out.fundamental = 4 * kernel;
        if (--f.factors.front().exponent == 0)
            f.factors.erase(f.factors.begin());
    }
    out.conductor = f.value();
    out.conductor_factors = f;
    out.gap = f.factors.empty() ? BigInt(1) : f.factors.back().prime;
    return out;
}

arith::Factorization parse_factored_discriminant(std::istream & in, std::string const & source)
{
    arith::Factorization out;
    bool have_sign = false;
    std::string line;
    int lineno = 0;
    auto fail = [&](std::string const & what) {
        throw IoError(source + ":" + std::to_string(lineno) + ": " + what);
    };
    static std::regex const sign_re(R"(\s*([+-]?1)\s*)");
    static std::regex const pair_re(R"(\s*(\d+)\s+(\d+)\s*)");
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::smatch m;
        if (!have_sign) {
            if (!std::regex_match(line, m, sign_re))
                fail("expected a sign line (+1 or -1)");
            out.sign = m[1].str().front() == '-' ? -1 : 1;
            have_sign = true;
            continue;
        }
        if (!std::regex_match(line, m, pair_re))
            fail("expected 'prime exponent'");
        BigInt const p(m[1].str());
        int const e = std::stoi(m[2].str());
        if (e < 1)
            fail("exponent must be positive");
        if (!arith::is_prime(p))
            fail(m[1].str() + " is not prime");
        if (!out.factors.empty() && out.factors.back().prime >= p)
            fail("primes must be strictly increasing");
        out.factors.push_back({p, e});
    }
    if (!have_sign)
        throw IoError(source + ": empty factorization fixture");
    return out;
}

arith::Factorization load_factored_discriminant(std::filesystem::path const & path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path.string());
    return parse_factored_discriminant(in, path.string());
}

double gap_probability_heuristic(double beta, double q)
{
    if (beta < 2)
        throw DomainError("beta must be >= 2");
    if (q <= 0)
        throw DomainError("q must be positive");
    double const top = std::min(2.0 * std::sqrt(q), 1e7);
    if (top <= beta)
        return 0.0;
    double prod = 1.0;
    for (auto p : arith::primes_up_to(static_cast<std::uint64_t>(top))) {
        auto const x = static_cast<double>(p);
        if (x > beta)
            prod *= 1.0 - 1.0 / (x * x);
    }
    return 1.0 - prod;
}

} // namespace expander::curves
