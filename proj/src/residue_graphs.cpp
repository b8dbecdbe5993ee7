#include "expander/residue_graphs.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "expander/arith.hpp"
#include "expander/errors.hpp"

namespace expander::residue {

namespace {

std::int64_t smallest_primitive_root(std::int64_t pe, std::int64_t phi)
{
    auto const factors = arith::factor_small(static_cast<std::uint64_t>(phi));
    for (std::int64_t g = 2; g < pe; ++g) {
        if (std::gcd(g, pe) != 1)
            continue;
        bool primitive = true;
        for (auto [r, e] : factors) {
            if (arith::pow_mod(static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(phi) / r, static_cast<std::uint64_t>(pe)) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive)
            return g;
    }
    throw std::logic_error("no primitive root found");
}

} // namespace

UnitGroup::UnitGroup(std::int64_t q)
    : q_(q)
{
    if (q < 3)
        throw DomainError("unit group requires q >= 3");
    if (q > unit_group_cap)
        throw DomainError("unit group tables are capped at q <= 10^7");
    std::vector<std::int64_t> moduli;
    for (auto [p64, e] : arith::factor_small(static_cast<std::uint64_t>(q))) {
        Component c;
        c.prime = static_cast<std::int64_t>(p64);
        c.prime_power = 1;
        for (int i = 0; i < e; ++i)
            c.prime_power *= c.prime;
        c.offset = moduli.size();
        c.dlog.assign(static_cast<std::size_t>(c.prime_power), std::numeric_limits<std::uint32_t>::max());
        if (c.prime == 2) {
            if (e == 2) {
                c.generators = {3};
                c.orders = {2};
            } else if (e >= 3) {
                c.generators = {c.prime_power - 1, 5};
                c.orders = {2, c.prime_power / 4};
                std::int64_t cur = 1;
                for (std::int64_t k = 0; k < c.prime_power / 4; ++k) {
                    c.dlog[static_cast<std::size_t>(cur)] = static_cast<std::uint32_t>(k);
                    cur = cur * 5 % c.prime_power;
                }
            }
        } else {
            std::int64_t const phi = c.prime_power / c.prime * (c.prime - 1);
            std::int64_t const g = smallest_primitive_root(c.prime_power, phi);
            c.generators = {g};
            c.orders = {phi};
            std::int64_t cur = 1;
            for (std::int64_t k = 0; k < phi; ++k) {
                c.dlog[static_cast<std::size_t>(cur)] = static_cast<std::uint32_t>(k);
                cur = static_cast<std::int64_t>(static_cast<__int128>(cur) * g % c.prime_power);
            }
        }
        std::int64_t const cofactor = q / c.prime_power;
        std::int64_t const inv = static_cast<std::int64_t>(arith::inv_mod(static_cast<std::uint64_t>(cofactor % c.prime_power), static_cast<std::uint64_t>(c.prime_power)));
        c.crt_idempotent = static_cast<std::int64_t>(static_cast<__int128>(cofactor) * inv % q);
        moduli.insert(moduli.end(), c.orders.begin(), c.orders.end());
        components_.push_back(std::move(c));
    }
    group_ = abelian::AbelianGroup(moduli);
}

abelian::Element UnitGroup::forward(std::int64_t residue) const
{
    std::int64_t const r = arith::mod(residue, q_);
    if (std::gcd(r, q_) != 1)
        throw DomainError(std::to_string(residue) + " is not a unit mod " + std::to_string(q_));
    abelian::Element x(group_.rank(), 0);
    for (auto const & c : components_) {
        std::int64_t const rr = r % c.prime_power;
        if (c.prime == 2) {
            if (c.orders.empty())
                continue;
            bool const negative = rr % 4 == 3;
            x[c.offset] = negative ? 1 : 0;
            if (c.orders.size() == 2) {
                std::int64_t const pos = negative ? c.prime_power - rr : rr;
                x[c.offset + 1] = c.dlog[static_cast<std::size_t>(pos)];
            }
        } else {
            x[c.offset] = c.dlog[static_cast<std::size_t>(rr)];
        }
    }
    return x;
}

std::int64_t UnitGroup::inverse(abelian::Element const & x) const
{
    if (!group_.contains(x))
        throw DomainError("element does not belong to the unit group");
    __int128 total = 0;
    for (auto const & c : components_) {
        std::uint64_t local = 1 % static_cast<std::uint64_t>(c.prime_power);
        for (std::size_t i = 0; i < c.generators.size(); ++i) {
            local = arith::mul_mod(local,
                arith::pow_mod(static_cast<std::uint64_t>(c.generators[i]), static_cast<std::uint64_t>(x[c.offset + i]), static_cast<std::uint64_t>(c.prime_power)),
                static_cast<std::uint64_t>(c.prime_power));
        }
        total = (total + static_cast<__int128>(local) * c.crt_idempotent) % q_;
    }
    return arith::mod(static_cast<std::int64_t>(total), q_);
}

std::int64_t GrhGraphConfig::resolved_x() const
{
    if (x)
        return *x;
    if (!B)
        throw DomainError("GRH graph needs either x or B");
    return static_cast<std::int64_t>(std::ceil(std::pow(std::log(static_cast<double>(q)), *B)));
}

std::vector<std::int64_t> generator_residues(std::int64_t q, std::int64_t x)
{
    std::vector<std::int64_t> out;
    if (x < 2)
        return out;
    for (auto p : arith::primes_up_to(static_cast<std::uint64_t>(x))) {
        auto const pi = static_cast<std::int64_t>(p);
        if (q % pi == 0)
            continue;
        std::int64_t const r = pi % q;
        out.push_back(r);
        out.push_back(static_cast<std::int64_t>(arith::inv_mod(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(q))));
    }
    return out;
}

std::vector<abelian::Element> generator_multiset(UnitGroup const & units, std::int64_t x)
{
    std::vector<abelian::Element> out;
    for (auto r : generator_residues(units.modulus(), x))
        out.push_back(units.forward(r));
    return out;
}

GrhGraph build_grh_graph(GrhGraphConfig const & config)
{
    std::int64_t const x = config.resolved_x();
    UnitGroup units(config.q);
    auto gens = generator_multiset(units, x);
    if (gens.empty()) {
        std::int64_t smallest = 2;
        while (config.q % smallest == 0 || !arith::is_prime(static_cast<std::uint64_t>(smallest)))
            ++smallest;
        throw DomainError("empty generator set for q=" + std::to_string(config.q) + ", x=" + std::to_string(x)
                          + "; smallest admissible x is " + std::to_string(smallest));
    }
    std::vector<std::uint64_t> primes;
    for (auto p : arith::primes_up_to(static_cast<std::uint64_t>(x))) {
        if (config.q % static_cast<std::int64_t>(p) != 0)
            primes.push_back(p);
    }
    abelian::CayleyGraph graph(units.group(), std::move(gens), true);
    return GrhGraph{std::move(units), std::move(graph), x, std::move(primes)};
}

double character_prime_sum(UnitGroup const & units, abelian::Character const & chi, std::int64_t x)
{
    if (x < 2)
        return 0.0;
    double total = 0;
    for (auto p : arith::primes_up_to(static_cast<std::uint64_t>(x))) {
        if (units.modulus() % static_cast<std::int64_t>(p) == 0)
            continue;
        double const phase = abelian::character_phase(units.group(), chi, units.forward(static_cast<std::int64_t>(p)));
        total += 2.0 * std::cos(2.0 * std::numbers::pi * phase);
    }
    return total;
}

std::int64_t least_prime_nonresidue(std::int64_t q)
{
    if (q < 3 || !arith::is_prime(static_cast<std::uint64_t>(q)))
        throw DomainError("least_prime_nonresidue requires an odd prime q");
    for (std::int64_t p = 2;; ++p) {
        if (arith::is_prime(static_cast<std::uint64_t>(p)) && arith::kronecker(p, q) == -1)
            return p;
    }
}

} // namespace expander::residue
