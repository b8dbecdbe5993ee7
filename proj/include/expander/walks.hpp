#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "expander/abelian.hpp"
#include "expander/curves/isogeny_class.hpp"
#include "expander/curves/velu.hpp"

namespace expander::walks {

using curves::u64;

/*
 * Counter-based generator: the stream for (seed, index) is splitmix64 started
 * from a hash of both, so trials can be replayed or run in any order.
 */
class CounterRng
{
  public:
    CounterRng(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next();
    // Uniform in [0, n), n >= 1 (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t n);
    double uniform01();

  private:
    std::uint64_t state_;
};

// Regular multigraph as a flat neighbor table: neighbor(v, s) = table[v * k + s].
struct WalkGraph
{
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::uint32_t> table;

    static WalkGraph from_cayley(abelian::CayleyGraph const & g);
    // Throws DomainError when the multigraph is not regular.
    static WalkGraph from_isogeny(curves::IsogenyGraph const & g);

    // Some component is bipartite (equivalently -k is an eigenvalue).
    bool has_bipartite_component() const;
};

// ceil(log(2 |G| / sqrt|S|) / log(k / c)), at least 1; c = 0 gives 1.
std::int64_t mixing_length(std::uint64_t graph_size, std::uint64_t subset_size, double k, double c);

// ceil(C ln|G| / ln ln q), at least 1. q >= 16.
std::int64_t corollary_length(std::uint64_t group_size, double q, double C = 4.0);

constexpr std::size_t exact_distribution_vertex_cap = 100'000;
constexpr std::int64_t exact_distribution_step_cap = 10'000;

// Distribution after t steps of the simple random walk from start.
std::vector<double> exact_distribution(WalkGraph const & g, std::size_t start, std::int64_t t);

double linf_to_uniform(std::span<double const> dist);

struct WalkConfig
{
    std::int64_t length = 1;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    double C = 4.0;
};

struct WalkReport
{
    std::int64_t length = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t target_size = 0;
    std::size_t graph_size = 0;
    std::uint64_t hits = 0;
    double expected_prob = 0; // exact mass of the target after length steps
    double observed_freq = 0;
    double ci3sigma = 0;      // half-width 3 sqrt(p (1 - p) / trials)
    bool within_3sigma = false;
    double band_low = 0;      // |S| / 2|G|
    double band_high = 0;     // 3|S| / 2|G|
    // nullopt when a component is bipartite and the band does not apply
    std::optional<bool> in_lemma_band;
};

WalkReport run_walks(WalkGraph const & g, std::size_t start, WalkConfig const & config,
                     std::span<std::size_t const> target);

// Discrete log of Q to base P, where P has the given order (computed when absent).
std::optional<u64> dlog_bsgs(curves::Curve const & E, curves::Point const & P, curves::Point const & Q,
                             std::optional<u64> order = std::nullopt);

// Images of (P, Q) under the composite; throws KernelCollision when a step kills P != O.
std::pair<curves::Point, curves::Point> push_through(std::span<curves::Isogeny const> path, curves::Point const & P,
                                                     curves::Point const & Q);

/*
 * Dlog oracle that answers on the curves of its covered set (by j-invariant)
 * and refuses elsewhere. Every call counts as a query; answered() counts
 * only the successful ones.
 */
class OracleModel
{
  public:
    OracleModel(std::vector<u64> covered, std::size_t level_size);

    bool covers(u64 j) const;
    double mu() const { return mu_; }
    std::vector<u64> const & covered() const { return covered_; }
    std::optional<u64> query(curves::Curve const & E, curves::Point const & P, curves::Point const & Q);
    std::uint64_t queries() const { return queries_; }
    std::uint64_t answered() const { return answered_; }
    void reset_counters() { queries_ = answered_ = 0; }

  private:
    std::vector<u64> covered_; // sorted
    double mu_ = 0;
    std::uint64_t queries_ = 0;
    std::uint64_t answered_ = 0;
};

// ceil(mu h) members of the level, picked by a seeded shuffle. 0 < mu <= 1.
OracleModel make_oracle(curves::Level const & level, double mu, std::uint64_t seed);

// Horizontal steps out of a model: one entry per rational kernel whose codomain
// stays in the level, weighted 2 when the degree ramifies.
struct HorizontalStep
{
    int ell = 0;
    curves::Poly kernel;
    int weight = 1;
};

class LevelWalker
{
  public:
    LevelWalker(curves::Level const & level, std::span<std::int64_t const> primes);

    curves::Level const & level() const { return level_; }
    std::vector<std::int64_t> const & primes() const { return primes_; }
    std::vector<HorizontalStep> const & steps(curves::Curve const & E);

  private:
    curves::Level const & level_;
    std::vector<std::int64_t> primes_;
    std::map<std::pair<u64, u64>, std::vector<HorizontalStep>> cache_;
};

struct DlogConfig
{
    std::int64_t M = 8;       // generator primes ell < M
    double C = 4.0;           // walk length constant
    double retry_factor = 64; // walk cap = retry_factor / mu
    std::uint64_t seed = 0;
};

struct DlogOutcome
{
    std::optional<u64> x;
    std::uint64_t queries = 0;
    std::uint64_t answered = 0;
    std::uint64_t walks = 0;
    std::uint64_t collisions = 0;
    std::int64_t walk_length = 0;
    bool verified = false;
};

/*
 * Random horizontal walks of corollary_length(h, p, C) steps from E, pushing
 * (P, Q) along, until the endpoint is covered by the oracle. The answer is
 * checked against xP = Q on E. run selects the random stream.
 */
DlogOutcome reduce_dlog(LevelWalker & walker, OracleModel & oracle, curves::Curve const & E, curves::Point const & P,
                        curves::Point const & Q, DlogConfig const & config, std::uint64_t run = 0);

struct DlogReport
{
    u64 p = 0;
    u64 N = 0;
    std::int64_t c = 1;
    std::size_t h = 0;
    double mu = 0;
    std::size_t covered = 0;
    std::uint64_t runs = 0;
    u64 r = 0;               // prime order of P
    std::int64_t walk_length = 0;
    double mean_queries = 0;
    std::uint64_t max_queries = 0;
    double mean_answered = 0;
    std::uint64_t failures = 0;
    std::uint64_t collisions = 0;
    bool all_verified = true;
    std::vector<std::int64_t> primes;
};

/*
 * runs independent reductions on the level: P is a point of the largest prime
 * order r > 7 dividing N on the first member's model, Q = xP for a random x.
 */
DlogReport run_dlog_experiment(curves::IsogenyClass const & cls, curves::Level const & level, double mu,
                               std::uint64_t runs, DlogConfig const & config);

} // namespace expander::walks
