#include "expander/walks.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "expander/arith.hpp"
#include "expander/errors.hpp"

namespace expander::walks {

using curves::Curve;
using curves::Point;

namespace {

std::uint64_t splitmix(std::uint64_t & state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// ceil that ignores floating noise just above an integer
std::int64_t ceil_tolerant(double v)
{
    return static_cast<std::int64_t>(std::ceil(v - 1e-9));
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t s = seed;
    std::uint64_t const a = splitmix(s);
    std::uint64_t t = index ^ 0x6a09e667f3bcc909ull;
    std::uint64_t const b = splitmix(t);
    state_ = a ^ (b * 0x2545f4914f6cdd1dull);
}

std::uint64_t CounterRng::next()
{
    return splitmix(state_);
}

std::uint64_t CounterRng::below(std::uint64_t n)
{
    if (n == 0)
        throw DomainError("CounterRng::below needs n >= 1");
    arith::u128 m = static_cast<arith::u128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        std::uint64_t const threshold = -n % n;
        while (low < threshold) {
            m = static_cast<arith::u128>(next()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double CounterRng::uniform01()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

WalkGraph WalkGraph::from_cayley(abelian::CayleyGraph const & g)
{
    return WalkGraph{g.vertex_count(), g.degree(), g.neighbor_table()};
}

WalkGraph WalkGraph::from_isogeny(curves::IsogenyGraph const & g)
{
    auto const k = g.regularity();
    if (!k)
        throw DomainError("isogeny graph is not regular");
    WalkGraph w{g.size(), static_cast<std::size_t>(*k), {}};
    auto const A = g.adjacency();
    w.table.reserve(w.n * w.k);
    for (std::size_t i = 0; i < w.n; ++i)
        for (std::size_t j = 0; j < w.n; ++j)
            for (int m = 0; m < A[i * w.n + j]; ++m)
                w.table.push_back(static_cast<std::uint32_t>(j));
    return w;
}

bool WalkGraph::has_bipartite_component() const
{
    std::vector<int> color(n, -1);
    for (std::size_t s = 0; s < n; ++s) {
        if (color[s] >= 0)
            continue;
        bool bipartite = true;
        color[s] = 0;
        std::deque<std::size_t> queue{s};
        while (!queue.empty()) {
            auto const v = queue.front();
            queue.pop_front();
            for (std::size_t i = 0; i < k; ++i) {
                auto const u = table[v * k + i];
                if (color[u] < 0) {
                    color[u] = 1 - color[v];
                    queue.push_back(u);
                } else if (color[u] == color[v]) {
                    bipartite = false;
                }
            }
        }
        if (bipartite && k > 0)
            return true;
    }
    return false;
}

std::int64_t mixing_length(std::uint64_t graph_size, std::uint64_t subset_size, double k, double c)
{
    if (subset_size < 1 || subset_size > graph_size)
        throw DomainError("subset size must lie in [1, graph size]");
    if (c < 0 || c >= k)
        throw DomainError("mixing length needs 0 <= c < k");
    if (c == 0)
        return 1;
    double const num = std::log(2.0 * static_cast<double>(graph_size) / std::sqrt(static_cast<double>(subset_size)));
    return std::max<std::int64_t>(1, ceil_tolerant(num / std::log(k / c)));
}

std::int64_t corollary_length(std::uint64_t group_size, double q, double C)
{
    if (q < 16)
        throw DomainError("corollary length needs q >= 16 so that log log q > 0");
    if (group_size < 1)
        throw DomainError("group size must be positive");
    double const v = C * std::log(static_cast<double>(group_size)) / std::log(std::log(q));
    return std::max<std::int64_t>(1, ceil_tolerant(v));
}

std::vector<double> exact_distribution(WalkGraph const & g, std::size_t start, std::int64_t t)
{
    if (g.n > exact_distribution_vertex_cap)
        throw DomainError("exact distribution is capped at 10^5 vertices");
    if (t < 0 || t > exact_distribution_step_cap)
        throw DomainError("exact distribution needs 0 <= t <= 10^4");
    if (start >= g.n)
        throw DomainError("start vertex out of range");
    std::vector<double> cur(g.n, 0.0), next(g.n);
    cur[start] = 1.0;
    double const inv_k = 1.0 / static_cast<double>(g.k);
    for (std::int64_t step = 0; step < t; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t v = 0; v < g.n; ++v) {
            if (cur[v] == 0)
                continue;
            double const share = cur[v] * inv_k;
            for (std::size_t s = 0; s < g.k; ++s)
                next[g.table[v * g.k + s]] += share;
        }
        std::swap(cur, next);
    }
    return cur;
}

double linf_to_uniform(std::span<double const> dist)
{
    double const u = 1.0 / static_cast<double>(dist.size());
    double m = 0;
    for (double x : dist)
        m = std::max(m, std::abs(x - u));
    return m;
}

WalkReport run_walks(WalkGraph const & g, std::size_t start, WalkConfig const & config,
                     std::span<std::size_t const> target)
{
    if (target.empty())
        throw DomainError("target set must be nonempty");
    if (config.trials < 1 || config.length < 0)
        throw DomainError("walks need trials >= 1 and length >= 0");
    if (g.k == 0)
        throw DomainError("graph has no edges");
    std::vector<char> in_target(g.n, 0);
    for (auto v : target) {
        if (v >= g.n)
            throw DomainError("target vertex out of range");
        in_target[v] = 1;
    }
    WalkReport r;
    r.length = config.length;
    r.trials = config.trials;
    r.seed = config.seed;
    r.graph_size = g.n;
    r.target_size = static_cast<std::size_t>(std::count(in_target.begin(), in_target.end(), 1));

    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
        CounterRng rng(config.seed, trial);
        std::size_t v = start;
        for (std::int64_t s = 0; s < config.length; ++s)
            v = g.table[v * g.k + rng.below(g.k)];
        r.hits += in_target[v] != 0;
    }
    r.observed_freq = static_cast<double>(r.hits) / static_cast<double>(config.trials);

    auto const dist = exact_distribution(g, start, config.length);
    for (std::size_t v = 0; v < g.n; ++v)
        if (in_target[v])
            r.expected_prob += dist[v];
    r.expected_prob = std::min(1.0, r.expected_prob);
    r.ci3sigma = 3.0 * std::sqrt(r.expected_prob * (1 - r.expected_prob) / static_cast<double>(config.trials));
    r.within_3sigma = std::abs(r.observed_freq - r.expected_prob) <= r.ci3sigma + 1e-12;

    double const frac = static_cast<double>(r.target_size) / static_cast<double>(g.n);
    r.band_low = 0.5 * frac;
    r.band_high = 1.5 * frac;
    if (!g.has_bipartite_component())
        r.in_lemma_band = r.observed_freq >= r.band_low && r.observed_freq <= r.band_high;
    return r;
}

std::optional<u64> dlog_bsgs(Curve const & E, Point const & P, Point const & Q, std::optional<u64> order)
{
    u64 const n = order ? *order : curves::point_order(E, P, curves::count_points(E));
    if (Q.infinity)
        return 0;
    auto key = [](Point const & X) { return std::make_tuple(X.infinity, X.x, X.y); };
    u64 const m = arith::isqrt(n) + 1;
    std::map<std::tuple<bool, u64, u64>, u64> baby;
    Point R = Point::at_infinity();
    for (u64 j = 0; j < m; ++j) {
        baby.emplace(key(R), j);
        R = curves::add(E, R, P);
    }
    Point const step = curves::negate(E, curves::multiply(E, P, static_cast<std::int64_t>(m)));
    Point G = Q;
    for (u64 i = 0; i <= m; ++i) {
        if (auto it = baby.find(key(G)); it != baby.end()) {
            u64 const x = (i * m + it->second) % n;
            if (curves::multiply(E, P, static_cast<std::int64_t>(x)) == Q)
                return x;
        }
        G = curves::add(E, G, step);
    }
    return std::nullopt;
}

std::pair<Point, Point> push_through(std::span<curves::Isogeny const> path, Point const & P, Point const & Q)
{
    Point p = P, q = Q;
    for (auto const & phi : path) {
        Point const img = phi(p);
        if (img.infinity && !p.infinity)
            throw KernelCollision("a degree-" + std::to_string(phi.degree()) + " step kills P");
        p = img;
        q = phi(q);
    }
    return {p, q};
}

OracleModel::OracleModel(std::vector<u64> covered, std::size_t level_size)
    : covered_(std::move(covered))
{
    std::sort(covered_.begin(), covered_.end());
    covered_.erase(std::unique(covered_.begin(), covered_.end()), covered_.end());
    if (covered_.empty())
        throw DomainError("oracle covers no curves");
    if (level_size < covered_.size())
        throw DomainError("oracle covers more curves than the level has");
    mu_ = static_cast<double>(covered_.size()) / static_cast<double>(level_size);
}

bool OracleModel::covers(u64 j) const
{
    return std::binary_search(covered_.begin(), covered_.end(), j);
}

std::optional<u64> OracleModel::query(Curve const & E, Point const & P, Point const & Q)
{
    ++queries_;
    if (!covers(curves::j_invariant(E)))
        return std::nullopt;
    ++answered_;
    return dlog_bsgs(E, P, Q);
}

OracleModel make_oracle(curves::Level const & level, double mu, std::uint64_t seed)
{
    if (!(mu > 0) || mu > 1)
        throw DomainError("oracle fraction mu must lie in (0, 1]");
    std::vector<u64> js = level.members;
    CounterRng rng(seed, 0x0aac1eull);
    for (std::size_t i = js.size(); i > 1; --i)
        std::swap(js[i - 1], js[rng.below(i)]);
    auto const take = static_cast<std::size_t>(ceil_tolerant(mu * static_cast<double>(js.size())));
    js.resize(std::max<std::size_t>(1, take));
    return OracleModel(std::move(js), level.members.size());
}

LevelWalker::LevelWalker(curves::Level const & level, std::span<std::int64_t const> primes)
    : level_(level)
    , primes_(primes.begin(), primes.end())
{
}

std::vector<HorizontalStep> const & LevelWalker::steps(Curve const & E)
{
    auto const key = std::make_pair(E.a, E.b);
    if (auto it = cache_.find(key); it != cache_.end())
        return it->second;
    std::vector<HorizontalStep> out;
    for (auto ell : primes_) {
        int const weight = arith::kronecker(level_.D, ell) == 0 ? 2 : 1;
        for (auto const & psi : curves::rational_kernels(E, static_cast<int>(ell))) {
            auto const phi = curves::velu_isogeny(E, static_cast<int>(ell), psi);
            u64 const j = curves::j_invariant(phi.codomain());
            if (std::binary_search(level_.members.begin(), level_.members.end(), j))
                out.push_back({static_cast<int>(ell), psi, weight});
        }
    }
    return cache_.emplace(key, std::move(out)).first->second;
}

DlogOutcome reduce_dlog(LevelWalker & walker, OracleModel & oracle, Curve const & E, Point const & P, Point const & Q,
                        DlogConfig const & config, std::uint64_t run)
{
    auto const & level = walker.level();
    if (P.infinity)
        throw DomainError("P must not be the point at infinity");
    if (!curves::on_curve(E, P) || !curves::on_curve(E, Q))
        throw DomainError("P and Q must lie on E");
    DlogOutcome out;
    out.walk_length = corollary_length(level.members.size(), static_cast<double>(level.p), config.C);
    auto const cap = static_cast<std::uint64_t>(std::ceil(config.retry_factor / oracle.mu()));
    std::uint64_t const q0 = oracle.queries(), a0 = oracle.answered();
    CounterRng rng(config.seed, run);

    while (out.walks < cap) {
        ++out.walks;
        Curve cur = E;
        Point p = P, q = Q;
        bool collided = false;
        for (std::int64_t s = 0; s < out.walk_length; ++s) {
            auto const & steps = walker.steps(cur);
            if (steps.empty())
                throw DomainError("no horizontal isogenies out of " + curves::to_string(cur));
            int total = 0;
            for (auto const & st : steps)
                total += st.weight;
            auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(total)));
            std::size_t i = 0;
            while (pick >= steps[i].weight)
                pick -= steps[i++].weight;
            auto const phi = curves::velu_isogeny(cur, steps[i].ell, steps[i].kernel);
            try {
                std::tie(p, q) = push_through(std::span<curves::Isogeny const>(&phi, 1), p, q);
            } catch (KernelCollision const &) {
                collided = true;
                break;
            }
            cur = phi.codomain();
        }
        if (collided) {
            ++out.collisions;
            continue;
        }
        if (auto x = oracle.query(cur, p, q)) {
            out.x = *x;
            out.verified = curves::multiply(E, P, static_cast<std::int64_t>(*x)) == Q;
            break;
        }
    }
    out.queries = oracle.queries() - q0;
    out.answered = oracle.answered() - a0;
    return out;
}

DlogReport run_dlog_experiment(curves::IsogenyClass const & cls, curves::Level const & level, double mu,
                               std::uint64_t runs, DlogConfig const & config)
{
    if (runs < 1)
        throw DomainError("runs must be positive");
    DlogReport rep;
    rep.p = cls.p;
    rep.N = cls.N;
    rep.c = level.c;
    rep.h = level.members.size();
    rep.runs = runs;

    Curve const & E = cls.model(level.members.front());
    std::optional<Point> P;
    auto factors = arith::factor_small(cls.N);
    std::reverse(factors.begin(), factors.end());
    for (auto const & [r, e] : factors) {
        if (r <= 7)
            break;
        if ((P = curves::point_of_order(E, r, cls.N))) {
            rep.r = r;
            break;
        }
    }
    if (!P)
        throw DomainError("N=" + std::to_string(cls.N) + " has no prime factor r > 7 realized by a point of order r");

    rep.primes = curves::level_generator_primes(level, config.M, nullptr);
    if (rep.primes.empty())
        throw DomainError("no horizontal primes below M=" + std::to_string(config.M));
    LevelWalker walker(level, rep.primes);
    OracleModel oracle = make_oracle(level, mu, config.seed);
    rep.mu = oracle.mu();
    rep.covered = oracle.covered().size();

    double total_q = 0, total_a = 0;
    for (std::uint64_t run = 0; run < runs; ++run) {
        CounterRng xs(~config.seed, run);
        u64 const x = xs.below(rep.r);
        Point const Q = curves::multiply(E, *P, static_cast<std::int64_t>(x));
        auto const out = reduce_dlog(walker, oracle, E, *P, Q, config, run);
        rep.walk_length = out.walk_length;
        total_q += static_cast<double>(out.queries);
        total_a += static_cast<double>(out.answered);
        rep.max_queries = std::max(rep.max_queries, out.queries);
        rep.collisions += out.collisions;
        if (!out.x)
            ++rep.failures;
        else if (!out.verified || *out.x != x)
            rep.all_verified = false;
    }
    rep.mean_queries = total_q / static_cast<double>(runs);
    rep.mean_answered = total_a / static_cast<double>(runs);
    return rep;
}

} // namespace expander::walks
