#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "expander/abelian.hpp"

namespace expander::classgroup {

// Binary quadratic form a x^2 + b x y + c y^2.
struct QuadForm
{
    std::int64_t a = 1;
    std::int64_t b = 0;
    std::int64_t c = 1;

    std::int64_t discriminant() const { return b * b - 4 * a * c; }
    // |b| <= a <= c, with b >= 0 whenever |b| = a or a = c.
    bool is_reduced() const;
    bool is_primitive() const;
    std::string to_string() const;

    auto operator<=>(QuadForm const &) const = default;
};

QuadForm parse_form(std::string const & text);

QuadForm reduce(QuadForm f);
QuadForm compose(QuadForm const & f, QuadForm const & g);
QuadForm inverse(QuadForm const & f);
QuadForm principal_form(std::int64_t D);

bool is_discriminant(std::int64_t D);

// D = f^2 * D0 with D0 fundamental.
struct DiscriminantParts
{
    std::int64_t fundamental = 0;
    std::int64_t conductor = 1;
};
DiscriminantParts split_discriminant(std::int64_t D);

constexpr std::int64_t class_group_cap = 100'000'000;

class ClassGroup
{
  public:
    explicit ClassGroup(std::int64_t D);

    std::int64_t discriminant() const { return D_; }
    std::size_t class_number() const { return forms_.size(); }
    std::vector<QuadForm> const & forms() const { return forms_; }
    QuadForm const & identity() const { return forms_[identity_]; }

    std::size_t index_of(QuadForm const & reduced) const;
    abelian::AbelianGroup const & structure() const { return structure_.group; }
    abelian::Element const & element_of(QuadForm const & reduced) const;
    QuadForm const & form_of(abelian::Element const & x) const;

    std::int64_t form_order(QuadForm const & f) const;

  private:
    std::int64_t D_;
    std::vector<QuadForm> forms_;
    std::unordered_map<std::int64_t, std::size_t> by_ab_;
    std::size_t identity_ = 0;
    abelian::Decomposition structure_;
    std::vector<std::size_t> by_element_;
};

ClassGroup class_group(std::int64_t D);

// Reduced class of a prime ideal of norm ell, or nullopt when ell is inert.
// Throws DomainError when ell divides the conductor of D.
std::optional<QuadForm> prime_form(std::int64_t D, std::int64_t ell);

struct PrimeGenerator
{
    std::int64_t ell = 0;
    QuadForm form;
    bool ramified = false;
    bool principal = false;
};

struct ClassCayleyGraph
{
    ClassGroup classes;
    abelian::CayleyGraph graph;
    std::vector<PrimeGenerator> generators;
};

// Generators are the prime forms (and their inverses) for the listed primes;
// inert primes and primes dividing the conductor are skipped.
ClassCayleyGraph class_cayley_graph(std::int64_t D, std::span<std::int64_t const> primes);
// All primes ell < M.
ClassCayleyGraph class_cayley_graph(std::int64_t D, std::int64_t M);

// ceil((ln |D|)^B)
std::int64_t default_prime_bound(std::int64_t D, double B);

} // namespace expander::classgroup
