#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "expander/abelian.hpp"

namespace expander::residue {

/*
 * (Z/qZ)* as an explicit product of cyclic groups. Odd prime powers use the
 * smallest primitive root; 2^e for e >= 3 splits as <-1> x <5>.
 */
class UnitGroup
{
  public:
    explicit UnitGroup(std::int64_t q);

    std::int64_t modulus() const { return q_; }
    abelian::AbelianGroup const & group() const { return group_; }
    std::uint64_t order() const { return group_.order(); }

    abelian::Element forward(std::int64_t residue) const;
    std::int64_t inverse(abelian::Element const & x) const;

  private:
    struct Component
    {
        std::int64_t prime = 0;
        std::int64_t prime_power = 0;
        // For 2^e, e >= 3: generators {-1, 5}; otherwise a single primitive root.
        std::vector<std::int64_t> generators;
        std::vector<std::int64_t> orders;
        std::vector<std::uint32_t> dlog; // residue mod prime_power -> exponent
        std::int64_t crt_idempotent = 0;
        std::size_t offset = 0; // first coordinate in the product
    };

    std::int64_t q_;
    std::vector<Component> components_;
    abelian::AbelianGroup group_;
};

constexpr std::int64_t unit_group_cap = 10'000'000;

struct GrhGraphConfig
{
    std::int64_t q = 0;
    std::optional<double> B;
    std::optional<std::int64_t> x;

    // Explicit x if given, otherwise ceil((ln q)^B).
    std::int64_t resolved_x() const;
};

// Residues p mod q and p^{-1} mod q for each prime p <= x with p not dividing q.
std::vector<std::int64_t> generator_residues(std::int64_t q, std::int64_t x);
std::vector<abelian::Element> generator_multiset(UnitGroup const & units, std::int64_t x);

struct GrhGraph
{
    UnitGroup units;
    abelian::CayleyGraph graph;
    std::int64_t x = 0;
    std::vector<std::uint64_t> primes; // primes p <= x with p not dividing q
};

GrhGraph build_grh_graph(GrhGraphConfig const & config);

// 2 Re sum_{p <= x, p not dividing q} chi(p).
double character_prime_sum(UnitGroup const & units, abelian::Character const & chi, std::int64_t x);

std::int64_t least_prime_nonresidue(std::int64_t q);

} // namespace expander::residue
