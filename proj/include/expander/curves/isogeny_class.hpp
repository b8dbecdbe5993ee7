#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "expander/classgroup.hpp"
#include "expander/curves/curve.hpp"
#include "expander/curves/modular.hpp"

namespace expander::curves {

struct ClassMember
{
    u64 j = 0;
    Curve model; // an F_p-model with exactly N points
};

/*
 * Ordinary curves over F_p with N points, one vertex per j-invariant.
 * d = t^2 - 4p = f^2 D0 with D0 fundamental.
 */
struct IsogenyClass
{
    u64 p = 0;
    u64 N = 0;
    std::int64_t t = 0;
    std::int64_t d = 0;
    std::int64_t D0 = 0;
    std::int64_t f = 1;
    std::vector<ClassMember> members; // ascending j

    bool contains(u64 j) const;
    std::size_t index_of(u64 j) const;
    Curve const & model(u64 j) const;
};

constexpr u64 isogeny_class_cap = 2000;

// Throws NotOrdinary when p | t, DomainError outside the Hasse interval.
IsogenyClass enumerate_isogeny_class(u64 p, u64 N);
// Every ordinary class over F_p, ascending N.
std::vector<IsogenyClass> enumerate_isogeny_classes(u64 p);

// Phi_ell(j1, j2) = 0 mod p.
bool modular_edge_check(u64 j1, u64 j2, int ell, u64 p,
                        ModularPolynomialDB const & db = ModularPolynomialDB::bundled());

// Conductor of End(E) for the member with invariant j; throws
// UnsupportedModularLevel when a prime dividing f has no bundled Phi_ell.
std::int64_t conductor_of(u64 j, IsogenyClass const & cls,
                          ModularPolynomialDB const & db = ModularPolynomialDB::bundled());
std::int64_t conductor_of(Curve const & E, IsogenyClass const & cls,
                          ModularPolynomialDB const & db = ModularPolynomialDB::bundled());

struct Level
{
    u64 p = 0;
    std::int64_t c = 1;
    std::int64_t D = 0; // c^2 D0
    std::vector<u64> members;
    classgroup::ClassGroup classes;
};

// Ascending conductor. Each level's size equals h(c^2 D0) (checked).
std::vector<Level> partition_levels(IsogenyClass const & cls,
                                    ModularPolynomialDB const & db = ModularPolynomialDB::bundled());

// ceil((ln 4p)^B)
std::int64_t isogeny_prime_bound(u64 p, double B);

/*
 * Primes ell < M usable as horizontal degrees on a level: ell != p, ell not
 * dividing c, ell not inert. Primes without a bundled Phi_ell are reported in
 * truncated instead.
 */
std::vector<std::int64_t> level_generator_primes(Level const & level, std::int64_t M, std::vector<std::int64_t> * truncated,
                                                 ModularPolynomialDB const & db = ModularPolynomialDB::bundled());

struct PrimeEdges
{
    std::int64_t ell = 0;
    bool ramified = false;
    std::vector<int> adjacency; // n x n, row-major, multiplicities
};

// Horizontal isogeny multigraph on a level.
struct IsogenyGraph
{
    std::vector<u64> vertices;
    std::vector<PrimeEdges> per_prime;
    std::vector<std::int64_t> truncated;

    std::size_t size() const { return vertices.size(); }
    std::vector<int> adjacency() const;
    // Common row sum, or nullopt when the graph is not regular.
    std::optional<int> regularity() const;
    // Eigenvalues, ascending.
    std::vector<double> spectrum() const;
};

IsogenyGraph isogeny_graph(Level const & level, std::span<std::int64_t const> primes,
                           ModularPolynomialDB const & db = ModularPolynomialDB::bundled());
IsogenyGraph isogeny_graph(Level const & level, std::int64_t M,
                           ModularPolynomialDB const & db = ModularPolynomialDB::bundled());

struct CorrespondenceReport
{
    bool match = false;
    std::size_t isogeny_vertices = 0;
    std::size_t cayley_vertices = 0;
    std::optional<int> isogeny_regularity;
    std::size_t cayley_degree = 0;
    double spectral_distance = 0;
    std::vector<double> isogeny_spectrum;
    std::vector<double> cayley_spectrum;
};

CorrespondenceReport verify_cayley_correspondence(IsogenyGraph const & graph, classgroup::ClassCayleyGraph const & cayley);
// Builds both graphs over the same prime set (primes < M admissible on the level).
CorrespondenceReport verify_cayley_correspondence(Level const & level, std::int64_t M,
                                                  ModularPolynomialDB const & db = ModularPolynomialDB::bundled());

struct NavigationStep
{
    int ell = 0;
    u64 from_j = 0;
    u64 to_j = 0;
    bool ascending = false;
};

// Vertical isogeny path from the member j to a curve of conductor target.
std::vector<NavigationStep> level_navigate(u64 j, IsogenyClass const & cls, std::int64_t target,
                                           ModularPolynomialDB const & db = ModularPolynomialDB::bundled());

} // namespace expander::curves
