#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace expander::abelian {

// Residue vector (g_1, ..., g_r) with 0 <= g_j < d_j.
using Element = std::vector<std::int64_t>;

/*
 * Finite abelian group Z/d_1 x ... x Z/d_r. Elements are enumerated in
 * mixed radix with the first factor varying fastest; characters use the same
 * enumeration through the canonical identification of the dual with G.
 */
class AbelianGroup
{
  public:
    AbelianGroup() = default;
    explicit AbelianGroup(std::vector<std::int64_t> moduli);

    std::vector<std::int64_t> const & moduli() const { return moduli_; }
    std::size_t rank() const { return moduli_.size(); }
    std::uint64_t order() const { return order_; }
    std::int64_t exponent() const { return exponent_; }

    Element identity() const { return Element(moduli_.size(), 0); }
    Element add(Element const & x, Element const & y) const;
    Element negate(Element const & x) const;
    Element scale(Element const & x, std::int64_t k) const;
    Element normalize(Element x) const;
    bool contains(Element const & x) const;
    std::int64_t element_order(Element const & x) const;

    std::uint64_t index_of(Element const & x) const;
    Element element_at(std::uint64_t index) const;

    std::string to_string(Element const & x) const;

    bool operator==(AbelianGroup const &) const = default;

  private:
    std::vector<std::int64_t> moduli_;
    std::uint64_t order_ = 1;
    std::int64_t exponent_ = 1;
};

struct Character
{
    Element exponents;
};

// Phase of chi(g) as a fraction of a full turn, in [0, 1).
double character_phase(AbelianGroup const & group, Character const & chi, Element const & g);
std::complex<double> evaluate(AbelianGroup const & group, Character const & chi, Element const & g);

class CayleyGraph
{
  public:
    CayleyGraph(AbelianGroup group, std::vector<Element> generators, bool allow_self_loops = false);

    AbelianGroup const & group() const { return group_; }
    std::vector<Element> const & generators() const { return generators_; }
    std::size_t degree() const { return generators_.size(); }
    std::size_t vertex_count() const { return group_.order(); }
    std::size_t self_loop_count() const;

    // Flat table: neighbor(v, s) = index of generators[s] + element(v).
    std::vector<std::uint32_t> neighbor_table() const;

  private:
    AbelianGroup group_;
    std::vector<Element> generators_;
};

// lambda_chi = sum_{s in S} chi(s), indexed by character (same enumeration as
// the group elements; index 0 is the trivial character).
std::vector<double> spectrum(CayleyGraph const & graph);

// Eigenvalues of the materialized adjacency matrix, ascending. |G| <= 4096.
std::vector<double> dense_spectrum_oracle(CayleyGraph const & graph);

constexpr std::size_t dense_oracle_cap = 4096;

struct ExpansionReport
{
    double lambda_triv = 0;
    double max_nontrivial_abs = 0;
    double delta = 0;
    double grh_ratio = 0;
    double B = 0;
    std::size_t connected_components = 1;
    double lambda_min = 0;
};

ExpansionReport expansion_report(CayleyGraph const & graph, double B);
// Same summary computed from a precomputed spectrum (trivial character first).
ExpansionReport expansion_report(std::span<double const> spectrum_by_character, double B);

// Union-find over the edges; independent of any spectral computation.
std::size_t connected_components(CayleyGraph const & graph);

struct GirthResult
{
    // Length of the shortest closed word, or nullopt when none exists with
    // length <= bound.
    std::optional<int> length;
    int bound = 0;
    // Signed multiplicity of each base generator in the shortest word.
    std::vector<std::int64_t> word;
};

/*
 * Shortest nontrivial closed word in which every base generator occurs with
 * a single sign. base lists one representative per inverse pair.
 */
GirthResult nonabelian_girth(CayleyGraph const & graph, std::span<Element const> base, int max_len);

// Shortest cycle of odd length, via BFS on the bipartite double cover.
std::optional<int> odd_girth(CayleyGraph const & graph, int max_len);

// Sorted multiset comparison with absolute tolerance.
bool same_multiset(std::vector<double> a, std::vector<double> b, double tol);
double multiset_distance(std::vector<double> a, std::vector<double> b);

// One line "u v" per (vertex, generator) pair; vertices as comma-joined residues.
void write_edge_list(std::ostream & os, CayleyGraph const & graph);
// Header "a_1,...,a_r,lambda" then one row per character.
void write_spectrum_csv(std::ostream & os, CayleyGraph const & graph, std::span<double const> spec);

/*
 * Structure of a finite abelian group given as a black box on element
 * indices 0..n-1. The result is a primary cyclic decomposition together with
 * the coordinate vector of every element.
 */
struct Decomposition
{
    AbelianGroup group;
    std::vector<Element> coordinates;
};

Decomposition decompose(std::size_t n, std::size_t identity,
                        std::function<std::size_t(std::size_t, std::size_t)> const & op);

} // namespace expander::abelian
