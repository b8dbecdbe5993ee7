#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "expander/abelian.hpp"
#include "expander/classgroup.hpp"
#include "expander/curves/isogeny_class.hpp"
#include "expander/errors.hpp"
#include "expander/residue_graphs.hpp"
#include "expander/walks.hpp"

using namespace expander;
using namespace expander::walks;
using curves::Curve;
using curves::Point;

namespace {

abelian::CayleyGraph cycle4()
{
    return abelian::CayleyGraph(abelian::AbelianGroup({4}), {{1}, {3}});
}

abelian::CayleyGraph complete(std::vector<std::int64_t> moduli)
{
    abelian::AbelianGroup G(std::move(moduli));
    std::vector<abelian::Element> gens;
    // every element, identity included, so one step is exactly uniform
    for (std::uint64_t i = 0; i < G.order(); ++i)
        gens.push_back(G.element_at(i));
    return abelian::CayleyGraph(G, gens, true);
}

// t steps of the walk by explicit group arithmetic, not the neighbor table.
std::vector<double> distribution_oracle(abelian::CayleyGraph const & g, std::size_t start, int t)
{
    auto const & G = g.group();
    std::vector<double> cur(G.order(), 0.0);
    cur[start] = 1;
    for (int s = 0; s < t; ++s) {
        std::vector<double> next(G.order(), 0.0);
        for (std::uint64_t v = 0; v < G.order(); ++v)
            for (auto const & gen : g.generators())
                next[G.index_of(G.add(G.element_at(v), gen))] += cur[v] / static_cast<double>(g.degree());
        cur = next;
    }
    return cur;
}

double max_nontrivial(std::vector<double> spec)
{
    // spectrum by character: index 0 is trivial
    double c = 0;
    for (std::size_t i = 1; i < spec.size(); ++i)
        c = std::max(c, std::abs(spec[i]));
    return c;
}

struct DlogFixture
{
    curves::IsogenyClass cls = curves::enumerate_isogeny_class(167, 166);
    std::vector<curves::Level> levels = curves::partition_levels(cls);
    curves::Level const & level() const { return levels.front(); }
};

} // namespace

TEST(CounterRng, ReplayAndStreams)
{
    CounterRng a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(a.next(), b.next());
    EXPECT_NE(CounterRng(42, 7).next(), CounterRng(42, 8).next());
    EXPECT_NE(CounterRng(42, 7).next(), CounterRng(43, 7).next());
}

TEST(CounterRng, BoundedDrawsAreUniform)
{
    CounterRng rng(1, 2);
    std::vector<int> counts(7, 0);
    int const n = 70000;
    for (int i = 0; i < n; ++i)
        ++counts[rng.below(7)];
    double chi2 = 0;
    for (int c : counts)
        chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    EXPECT_LT(chi2, 22.46); // 99.9% quantile for 6 degrees of freedom
    EXPECT_EQ(rng.below(1), 0u);
    EXPECT_THROW(rng.below(0), DomainError);
}

TEST(MixingLength, Examples)
{
    EXPECT_EQ(mixing_length(4, 1, 2, 1), 3);
    EXPECT_EQ(mixing_length(100, 10, 5, 0), 1);
    EXPECT_GE(mixing_length(100, 100, 5, 4), 1);
    EXPECT_THROW(mixing_length(4, 1, 2, 2), DomainError);
    EXPECT_THROW(mixing_length(4, 5, 2, 1), DomainError);
    // direct formula at a generic point
    double const v = std::log(2.0 * 1000 / std::sqrt(100.0)) / std::log(60.0 / 25.0);
    EXPECT_EQ(mixing_length(1000, 100, 60, 25), static_cast<std::int64_t>(std::ceil(v)));
}

TEST(CorollaryLength, Examples)
{
    EXPECT_EQ(corollary_length(1, 1e4), 1);
    EXPECT_EQ(corollary_length(22026, std::exp(std::exp(2.0)), 1.0), 5);
    EXPECT_EQ(corollary_length(4000, 1e4), 15);
    EXPECT_THROW(corollary_length(10, 15), DomainError);
}

TEST(ExactDistribution, Examples)
{
    auto const c4 = WalkGraph::from_cayley(cycle4());
    EXPECT_EQ(exact_distribution(c4, 1, 0), (std::vector<double>{0, 1, 0, 0}));
    EXPECT_EQ(exact_distribution(c4, 0, 2), (std::vector<double>{0.5, 0, 0.5, 0}));
    auto const k = WalkGraph::from_cayley(complete({2, 3}));
    for (double x : exact_distribution(k, 3, 1))
        EXPECT_NEAR(x, 1.0 / 6, 1e-15);
    EXPECT_THROW(exact_distribution(c4, 4, 1), DomainError);
    EXPECT_THROW(exact_distribution(c4, 0, 10001), DomainError);
}

TEST(ExactDistribution, MatchesGroupArithmeticAndSumsToOne)
{
    std::vector<abelian::CayleyGraph> graphs{cycle4(), complete({2, 2}), residue::build_grh_graph({101, std::nullopt, 7}).graph,
                                             classgroup::class_cayley_graph(-1588, 12).graph};
    for (auto const & g : graphs) {
        auto const w = WalkGraph::from_cayley(g);
        for (int t : {0, 1, 2, 5, 9}) {
            auto const d = exact_distribution(w, 0, t);
            auto const o = distribution_oracle(g, 0, t);
            double s = 0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                EXPECT_NEAR(d[i], o[i], 1e-13);
                s += d[i];
            }
            EXPECT_NEAR(s, 1, 1e-12);
        }
    }
}

TEST(ExactDistribution, SpectralBoundOnDistanceToUniform)
{
    std::vector<abelian::CayleyGraph> graphs{residue::build_grh_graph({1009, 2.5, std::nullopt}).graph,
                                             residue::build_grh_graph({211, std::nullopt, 11}).graph,
                                             classgroup::class_cayley_graph(-4004, 30).graph,
                                             classgroup::class_cayley_graph(-23, 3).graph, cycle4()};
    for (auto const & g : graphs) {
        auto const w = WalkGraph::from_cayley(g);
        double const k = static_cast<double>(g.degree());
        double const c = max_nontrivial(abelian::spectrum(g));
        double const root_n = std::sqrt(static_cast<double>(w.n));
        for (int t = 0; t <= 40; ++t) {
            auto const d = exact_distribution(w, 0, t);
            EXPECT_LE(linf_to_uniform(d), std::pow(c / k, t) * root_n + 1e-12) << t;
        }
    }
}

TEST(RunWalks, Examples)
{
    auto const g = WalkGraph::from_cayley(complete({3, 3}));
    std::vector<std::size_t> all(9);
    for (std::size_t i = 0; i < 9; ++i)
        all[i] = i;
    auto const r_all = run_walks(g, 0, {3, 500, 5}, all);
    EXPECT_EQ(r_all.observed_freq, 1.0);
    EXPECT_TRUE(r_all.within_3sigma);

    std::vector<std::size_t> const three{2, 4, 8};
    auto const r = run_walks(g, 0, {1, 20000, 9}, three);
    EXPECT_NEAR(r.expected_prob, 3.0 / 9, 1e-12);
    EXPECT_TRUE(r.within_3sigma) << r.observed_freq;
    ASSERT_TRUE(r.in_lemma_band.has_value());
    EXPECT_TRUE(*r.in_lemma_band);

    EXPECT_THROW(run_walks(g, 0, {1, 10, 1}, std::vector<std::size_t>{}), DomainError);
}

TEST(RunWalks, ReplayIsDeterministic)
{
    auto const g = WalkGraph::from_cayley(residue::build_grh_graph({401, std::nullopt, 13}).graph);
    std::vector<std::size_t> const target{1, 5, 9, 77};
    auto const a = run_walks(g, 0, {6, 3000, 123}, target);
    auto const b = run_walks(g, 0, {6, 3000, 123}, target);
    auto const c = run_walks(g, 0, {6, 3000, 124}, target);
    EXPECT_EQ(a.hits, b.hits);
    EXPECT_EQ(a.observed_freq, b.observed_freq);
    EXPECT_NE(a.hits, c.hits);
}

TEST(RunWalks, BipartiteBandNotApplicable)
{
    auto const g = WalkGraph::from_cayley(cycle4());
    EXPECT_TRUE(g.has_bipartite_component());
    auto const r = run_walks(g, 0, {4, 1000, 3}, std::vector<std::size_t>{0});
    EXPECT_FALSE(r.in_lemma_band.has_value());
    EXPECT_FALSE(WalkGraph::from_cayley(complete({2, 2})).has_bipartite_component());
    // the q = 5 graph with generators {2, 3} has eigenvalue -k: bipartite
    auto const q5 = residue::build_grh_graph({5, std::nullopt, 3});
    auto const spec = abelian::spectrum(q5.graph);
    bool const minus_k = std::any_of(spec.begin(), spec.end(),
                                     [&](double x) { return std::abs(x + static_cast<double>(q5.graph.degree())) < 1e-9; });
    EXPECT_EQ(WalkGraph::from_cayley(q5.graph).has_bipartite_component(), minus_k);
}

TEST(RunWalks, FrequencyAgreesWithExactMass)
{
    int tested = 0;
    for (std::int64_t q : {101, 211, 307})
        for (std::int64_t x : {5, 11}) {
            auto const g = WalkGraph::from_cayley(residue::build_grh_graph({q, std::nullopt, x}).graph);
            std::vector<std::size_t> target;
            for (std::size_t v = 0; v < g.n; v += 7)
                target.push_back(v);
            for (std::int64_t len : {1, 3, 8}) {
                auto const r = run_walks(g, 0, {len, 4000, static_cast<std::uint64_t>(q * 100 + len)}, target);
                EXPECT_TRUE(r.within_3sigma) << q << " " << x << " " << len;
                ++tested;
            }
        }
    EXPECT_EQ(tested, 18);
}

TEST(Bsgs, Examples)
{
    Curve const E = curves::make_curve(101, 3, 7);
    u64 const N = curves::count_points(E);
    auto const pts = curves::points(E);
    Point P = pts[1];
    u64 const n = curves::point_order(E, P, N);
    EXPECT_EQ(dlog_bsgs(E, P, Point::at_infinity()), 0u);
    EXPECT_EQ(dlog_bsgs(E, P, curves::multiply(E, P, 4)), 4u % n);
    for (u64 x = 0; x < n; x += 3)
        EXPECT_EQ(dlog_bsgs(E, P, curves::multiply(E, P, static_cast<std::int64_t>(x))), x);
}

TEST(Bsgs, NonCyclicGroupReportsNone)
{
    // y^2 = x(x - 1)(x + 1) = x^3 - x has full rational 2-torsion
    Curve const E = curves::make_curve(13, -1, 0);
    u64 const N = curves::count_points(E);
    auto const pts = curves::points(E);
    std::size_t outside = 0;
    for (auto const & P : pts) {
        if (P.infinity)
            continue;
        u64 const n = curves::point_order(E, P, N);
        std::set<std::tuple<bool, u64, u64>> multiples;
        for (u64 k = 0; k < n; ++k) {
            auto const R = curves::multiply(E, P, static_cast<std::int64_t>(k));
            multiples.insert({R.infinity, R.x, R.y});
        }
        for (auto const & Q : pts) {
            bool const inside = multiples.count({Q.infinity, Q.x, Q.y}) != 0;
            auto const x = dlog_bsgs(E, P, Q, n);
            EXPECT_EQ(x.has_value(), inside);
            if (x)
                EXPECT_EQ(curves::multiply(E, P, static_cast<std::int64_t>(*x)), Q);
            outside += !inside;
        }
    }
    EXPECT_GT(outside, 0u);
}

TEST(PushThrough, EmptyPathAndOrderPreservation)
{
    Curve const E = curves::make_curve(101, 3, 7);
    u64 const N = curves::count_points(E);
    auto const pts = curves::points(E);
    auto [P0, Q0] = push_through({}, pts[3], pts[5]);
    EXPECT_EQ(P0, pts[3]);
    EXPECT_EQ(Q0, pts[5]);

    // single 2-isogeny, P of odd order
    for (auto const & psi : curves::rational_kernels(E, 2)) {
        auto const phi = curves::velu_isogeny(E, 2, psi);
        for (auto const & P : pts) {
            if (P.infinity)
                continue;
            u64 const n = curves::point_order(E, P, N);
            if (n % 2 == 0)
                continue;
            curves::Isogeny const path[] = {phi};
            auto const [P1, Q1] = push_through(path, P, P);
            EXPECT_EQ(curves::point_order(phi.codomain(), P1, N), n);
        }
    }
}

TEST(PushThrough, DlogSurvivesCoprimeDegreePath)
{
    DlogFixture fx;
    auto const & L = fx.level();
    Curve const E = fx.cls.model(L.members.front());
    auto const P = *curves::point_of_order(E, 83, fx.cls.N);
    std::vector<std::int64_t> const primes = curves::level_generator_primes(L, 8, nullptr);
    LevelWalker walker(L, primes);
    // a fixed path: the first horizontal step, three times
    std::vector<curves::Isogeny> path;
    Curve cur = E;
    for (int s = 0; s < 3; ++s) {
        auto const & st = walker.steps(cur).front();
        path.push_back(curves::velu_isogeny(cur, st.ell, st.kernel));
        cur = path.back().codomain();
    }
    for (u64 x = 0; x < 83; ++x) {
        auto const Q = curves::multiply(E, P, static_cast<std::int64_t>(x));
        auto const [P1, Q1] = push_through(path, P, Q);
        EXPECT_EQ(dlog_bsgs(cur, P1, Q1), x);
    }
}

TEST(PushThrough, KernelCollision)
{
    // a rational 3-torsion point generating the kernel
    for (u64 p : {31u, 37u, 43u})
        for (u64 a = 1; a < p; ++a)
            for (u64 b = 1; b < p; ++b) {
                Curve const E{p, a, b};
                if (curves::is_singular(E))
                    continue;
                u64 const N = curves::count_points(E);
                if (N % 3)
                    continue;
                auto const T = curves::point_of_order(E, 3, N);
                if (!T)
                    continue;
                auto const phi = curves::velu_isogeny(E, 3, *T);
                curves::Isogeny const path[] = {phi};
                EXPECT_THROW(push_through(path, *T, *T), KernelCollision);
                return;
            }
    FAIL() << "no curve with a rational 3-torsion point";
}

TEST(Oracle, CoverageAndCounters)
{
    DlogFixture fx;
    auto const & L = fx.level();
    EXPECT_THROW(make_oracle(L, 0.0, 1), DomainError);
    EXPECT_THROW(make_oracle(L, 1.5, 1), DomainError);
    EXPECT_THROW(OracleModel({}, 10), DomainError);
    auto o = make_oracle(L, 0.5, 7);
    EXPECT_EQ(o.covered().size(), 5u);
    EXPECT_DOUBLE_EQ(o.mu(), 0.5);
    EXPECT_EQ(make_oracle(L, 0.5, 7).covered(), o.covered());
    for (auto j : o.covered())
        EXPECT_TRUE(std::binary_search(L.members.begin(), L.members.end(), j));
    u64 const uncovered = *std::find_if(L.members.begin(), L.members.end(), [&](u64 j) { return !o.covers(j); });
    Curve const E = fx.cls.model(uncovered);
    auto const P = *curves::point_of_order(E, 83, fx.cls.N);
    EXPECT_FALSE(o.query(E, P, P).has_value());
    Curve const F = fx.cls.model(o.covered().front());
    auto const R = *curves::point_of_order(F, 83, fx.cls.N);
    EXPECT_EQ(o.query(F, R, curves::multiply(F, R, 9)), 9u);
    EXPECT_EQ(o.queries(), 2u);
    EXPECT_EQ(o.answered(), 1u);
}

TEST(LevelWalker, StepsReproduceTheIsogenyGraph)
{
    DlogFixture fx;
    for (auto const & L : fx.levels) {
        auto const primes = curves::level_generator_primes(L, 8, nullptr);
        if (primes.empty())
            continue;
        auto const g = curves::isogeny_graph(L, std::span<std::int64_t const>(primes));
        auto const A = g.adjacency();
        LevelWalker walker(L, primes);
        for (std::size_t i = 0; i < g.size(); ++i) {
            Curve const E = fx.cls.model(g.vertices[i]);
            std::map<u64, int> weight_to;
            for (auto const & st : walker.steps(E))
                weight_to[curves::j_invariant(curves::velu_isogeny(E, st.ell, st.kernel).codomain())] += st.weight;
            for (std::size_t k = 0; k < g.size(); ++k) {
                int const w = weight_to.count(g.vertices[k]) ? weight_to[g.vertices[k]] : 0;
                EXPECT_EQ(w, A[i * g.size() + k]) << "c=" << L.c << " " << g.vertices[i] << " -> " << g.vertices[k];
            }
        }
    }
}

TEST(ReduceDlog, FullCoverageTakesOneQuery)
{
    DlogFixture fx;
    DlogConfig cfg;
    cfg.seed = 99;
    auto const rep = run_dlog_experiment(fx.cls, fx.level(), 1.0, 10, cfg);
    EXPECT_EQ(rep.r, 83u);
    EXPECT_EQ(rep.failures, 0u);
    EXPECT_TRUE(rep.all_verified);
    EXPECT_EQ(rep.max_queries, 1u);
    EXPECT_DOUBLE_EQ(rep.mean_queries, 1.0);
}

TEST(ReduceDlog, HalfCoverageAndReplay)
{
    DlogFixture fx;
    DlogConfig cfg;
    cfg.seed = 5;
    auto const a = run_dlog_experiment(fx.cls, fx.level(), 0.5, 30, cfg);
    auto const b = run_dlog_experiment(fx.cls, fx.level(), 0.5, 30, cfg);
    EXPECT_EQ(a.failures, 0u);
    EXPECT_TRUE(a.all_verified);
    EXPECT_LE(a.mean_queries, 4.0);
    EXPECT_DOUBLE_EQ(a.mean_answered, 1.0);
    EXPECT_EQ(a.mean_queries, b.mean_queries);
    EXPECT_EQ(a.max_queries, b.max_queries);
}

TEST(ReduceDlog, Errors)
{
    DlogFixture fx;
    auto const & L = fx.level();
    auto const primes = curves::level_generator_primes(L, 8, nullptr);
    LevelWalker walker(L, primes);
    auto oracle = make_oracle(L, 1.0, 1);
    Curve const E = fx.cls.model(L.members.front());
    EXPECT_THROW(reduce_dlog(walker, oracle, E, Point::at_infinity(), Point::at_infinity(), {}), DomainError);
    // N = 4 * 3 * 7 for p = 7: no prime factor above 7
    auto const small = curves::enumerate_isogeny_class(7, 12);
    auto const lv = curves::partition_levels(small);
    EXPECT_THROW(run_dlog_experiment(small, lv.front(), 1.0, 1, {}), DomainError);
}
