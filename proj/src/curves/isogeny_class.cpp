#include "expander/curves/isogeny_class.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include <Eigen/Dense>

#include "expander/errors.hpp"

namespace expander::curves {

namespace {

// Every (N, model) attained by some model of each j, first model found per N.
using ModelTable = std::vector<std::vector<std::pair<u64, Curve>>>;

void note(std::vector<std::pair<u64, Curve>> & out, u64 N, Curve const & E)
{
    for (auto const & [n, _] : out)
        if (n == N)
            return;
    out.emplace_back(N, E);
}

void check_field(u64 p)
{
    if (p < 5 || !arith::is_prime(p))
        throw DomainError("p must be a prime >= 5, got " + std::to_string(p));
    if (p > isogeny_class_cap)
        throw DomainError("isogeny class enumeration is capped at p <= " + std::to_string(isogeny_class_cap));
}

ModelTable scan_models(u64 p)
{
    auto const chi = legendre_table(p);
    ModelTable table(p);
    u64 const j1728 = 1728 % p;
    for (u64 j = 0; j < p; ++j) {
        if (j == 0) {
            for (u64 b = 1; b < p; ++b) {
                Curve const E{p, 0, b};
                note(table[j], count_points(E, chi), E);
            }
        } else if (j == j1728) {
            for (u64 a = 1; a < p; ++a) {
                Curve const E{p, a, 0};
                note(table[j], count_points(E, chi), E);
            }
        } else {
            Curve const E = curve_with_j(p, j);
            u64 const N = count_points(E, chi);
            note(table[j], N, E);
            note(table[j], 2 * p + 2 - N, quadratic_twist(E));
        }
    }
    return table;
}

IsogenyClass make_class(u64 p, u64 N)
{
    IsogenyClass cls;
    cls.p = p;
    cls.N = N;
    cls.t = static_cast<std::int64_t>(p) + 1 - static_cast<std::int64_t>(N);
    cls.d = cls.t * cls.t - 4 * static_cast<std::int64_t>(p);
    auto const parts = classgroup::split_discriminant(cls.d);
    cls.D0 = parts.fundamental;
    cls.f = parts.conductor;
    return cls;
}

void check_trace(u64 p, u64 N)
{
    std::int64_t const t = static_cast<std::int64_t>(p) + 1 - static_cast<std::int64_t>(N);
    if (t * t >= 4 * static_cast<std::int64_t>(p))
        throw DomainError("N=" + std::to_string(N) + " lies outside the Hasse interval for p=" + std::to_string(p));
    if (t % static_cast<std::int64_t>(p) == 0)
        throw NotOrdinary("trace t=" + std::to_string(t) + " is divisible by p=" + std::to_string(p)
                          + "; the class is supersingular");
}

int valuation(std::int64_t n, std::int64_t ell)
{
    int v = 0;
    while (n != 0 && n % ell == 0) {
        n /= ell;
        ++v;
    }
    return v;
}

std::int64_t power(std::int64_t b, int e)
{
    std::int64_t r = 1;
    while (e-- > 0)
        r *= b;
    return r;
}

// Member indices adjacent through F_p-roots of Phi_ell(j, Y), with multiplicity,
// and the total root multiplicity (members or not).
struct RootScan
{
    std::vector<std::pair<std::size_t, int>> members;
    int total = 0;
};

RootScan scan_roots(ModularPolynomialModP const & phi, IsogenyClass const & cls, u64 j)
{
    RootScan out;
    for (auto const & [root, mult] : phi.neighbors(j)) {
        out.total += mult;
        if (cls.contains(root))
            out.members.emplace_back(cls.index_of(root), mult);
    }
    return out;
}

/*
 * Distance of every member to the floor of its ell-volcano. A vertex is on the
 * floor iff Phi_ell(j, Y) has fewer than ell + 1 roots in F_p counted with
 * multiplicity; everywhere above the floor all ell + 1 ell-isogenies are rational.
 */
std::vector<int> floor_distance(IsogenyClass const & cls, int ell, ModularPolynomialDB const & db)
{
    auto const phi = db.mod_p(ell, cls.p);
    std::size_t const n = cls.members.size();
    std::vector<std::vector<std::size_t>> adj(n);
    std::vector<int> dist(n, -1);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i) {
        auto const scan = scan_roots(phi, cls, cls.members[i].j);
        for (auto const & [k, mult] : scan.members)
            adj[i].push_back(k);
        if (scan.total < ell + 1) {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        auto const i = queue.front();
        queue.pop_front();
        for (auto k : adj[i])
            if (dist[k] < 0) {
                dist[k] = dist[i] + 1;
                queue.push_back(k);
            }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (dist[i] < 0)
            throw DomainError("ell=" + std::to_string(ell) + " volcano walk from j=" + std::to_string(cls.members[i].j)
                              + " never reached the floor");
    return dist;
}

// ell-adic valuation of the conductor of every member, for each ell | f.
std::map<std::int64_t, std::vector<int>> conductor_valuations(IsogenyClass const & cls, ModularPolynomialDB const & db)
{
    std::map<std::int64_t, std::vector<int>> out;
    for (auto const & [ell64, H] : arith::factor_small(static_cast<u64>(cls.f))) {
        auto const ell = static_cast<int>(ell64);
        if (!db.has(ell))
            throw UnsupportedModularLevel("conductor f=" + std::to_string(cls.f) + " has prime factor " + std::to_string(ell)
                                          + " without a bundled modular polynomial; the class is only partially classified");
        auto dist = floor_distance(cls, ell, db);
        for (auto & v : dist) {
            if (v > H)
                throw DomainError("volcano depth exceeds v_ell(f) for ell=" + std::to_string(ell));
            v = H - v;
        }
        out.emplace(ell, std::move(dist));
    }
    return out;
}

std::int64_t conductor_at(std::map<std::int64_t, std::vector<int>> const & vals, std::size_t i)
{
    std::int64_t c = 1;
    for (auto const & [ell, v] : vals)
        c *= power(ell, v[i]);
    return c;
}

} // namespace

bool IsogenyClass::contains(u64 j) const
{
    auto it = std::lower_bound(members.begin(), members.end(), j, [](ClassMember const & m, u64 x) { return m.j < x; });
    return it != members.end() && it->j == j;
}

std::size_t IsogenyClass::index_of(u64 j) const
{
    auto it = std::lower_bound(members.begin(), members.end(), j, [](ClassMember const & m, u64 x) { return m.j < x; });
    if (it == members.end() || it->j != j)
        throw DomainError("j=" + std::to_string(j) + " is not in the isogeny class (p=" + std::to_string(p)
                          + ", N=" + std::to_string(N) + ")");
    return static_cast<std::size_t>(it - members.begin());
}

Curve const & IsogenyClass::model(u64 j) const
{
    return members[index_of(j)].model;
}

IsogenyClass enumerate_isogeny_class(u64 p, u64 N)
{
    check_field(p);
    check_trace(p, N);
    auto const table = scan_models(p);
    IsogenyClass cls = make_class(p, N);
    for (u64 j = 0; j < p; ++j)
        for (auto const & [n, E] : table[j])
            if (n == N)
                cls.members.push_back({j, E});
    return cls;
}

std::vector<IsogenyClass> enumerate_isogeny_classes(u64 p)
{
    check_field(p);
    auto const table = scan_models(p);
    std::map<u64, IsogenyClass> by_n;
    for (u64 j = 0; j < p; ++j)
        for (auto const & [n, E] : table[j]) {
            std::int64_t const t = static_cast<std::int64_t>(p) + 1 - static_cast<std::int64_t>(n);
            if (t % static_cast<std::int64_t>(p) == 0)
                continue;
            auto it = by_n.find(n);
            if (it == by_n.end())
                it = by_n.emplace(n, make_class(p, n)).first;
            it->second.members.push_back({j, E});
        }
    std::vector<IsogenyClass> out;
    for (auto & [n, cls] : by_n)
        out.push_back(std::move(cls));
    return out;
}

bool modular_edge_check(u64 j1, u64 j2, int ell, u64 p, ModularPolynomialDB const & db)
{
    return db.mod_p(ell, p).evaluate(j1, j2) == 0;
}

std::int64_t conductor_of(u64 j, IsogenyClass const & cls, ModularPolynomialDB const & db)
{
    auto const i = cls.index_of(j);
    return conductor_at(conductor_valuations(cls, db), i);
}

std::int64_t conductor_of(Curve const & E, IsogenyClass const & cls, ModularPolynomialDB const & db)
{
    if (E.p != cls.p || count_points(E) != cls.N)
        throw DomainError(to_string(E) + " does not have " + std::to_string(cls.N) + " points");
    return conductor_of(j_invariant(E), cls, db);
}

std::vector<Level> partition_levels(IsogenyClass const & cls, ModularPolynomialDB const & db)
{
    auto const vals = conductor_valuations(cls, db);
    std::map<std::int64_t, std::vector<u64>> groups;
    for (std::size_t i = 0; i < cls.members.size(); ++i)
        groups[conductor_at(vals, i)].push_back(cls.members[i].j);
    std::vector<Level> out;
    for (auto & [c, js] : groups) {
        std::int64_t const D = c * c * cls.D0;
        classgroup::ClassGroup G(D);
        if (G.class_number() != js.size())
            throw DomainError("level c=" + std::to_string(c) + " has " + std::to_string(js.size())
                              + " curves but h(" + std::to_string(D) + ")=" + std::to_string(G.class_number()));
        out.push_back(Level{cls.p, c, D, std::move(js), std::move(G)});
    }
    return out;
}

std::int64_t isogeny_prime_bound(u64 p, double B)
{
    return static_cast<std::int64_t>(std::ceil(std::pow(std::log(4.0 * static_cast<double>(p)), B)));
}

namespace {

bool horizontal_prime(Level const & level, std::int64_t ell)
{
    return ell != static_cast<std::int64_t>(level.p) && level.c % ell != 0 && arith::kronecker(level.D, ell) != -1;
}

} // namespace

std::vector<std::int64_t> level_generator_primes(Level const & level, std::int64_t M, std::vector<std::int64_t> * truncated,
                                                 ModularPolynomialDB const & db)
{
    std::vector<std::int64_t> out;
    if (M < 3)
        return out;
    for (auto ell64 : arith::primes_up_to(static_cast<u64>(M - 1))) {
        auto const ell = static_cast<std::int64_t>(ell64);
        if (!horizontal_prime(level, ell))
            continue;
        if (db.has(static_cast<int>(ell)))
            out.push_back(ell);
        else if (truncated)
            truncated->push_back(ell);
    }
    return out;
}

std::vector<int> IsogenyGraph::adjacency() const
{
    std::vector<int> A(size() * size(), 0);
    for (auto const & pe : per_prime)
        for (std::size_t i = 0; i < A.size(); ++i)
            A[i] += pe.adjacency[i];
    return A;
}

std::optional<int> IsogenyGraph::regularity() const
{
    auto const A = adjacency();
    std::size_t const n = size();
    std::optional<int> k;
    for (std::size_t i = 0; i < n; ++i) {
        int row = 0;
        for (std::size_t j = 0; j < n; ++j)
            row += A[i * n + j];
        if (k && *k != row)
            return std::nullopt;
        k = row;
    }
    return k;
}

std::vector<double> IsogenyGraph::spectrum() const
{
    auto const A = adjacency();
    auto const n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            M(i, j) = A[static_cast<std::size_t>(i * n + j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M, Eigen::EigenvaluesOnly);
    auto const & ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

IsogenyGraph isogeny_graph(Level const & level, std::span<std::int64_t const> primes, ModularPolynomialDB const & db)
{
    IsogenyGraph g;
    g.vertices = level.members;
    std::size_t const n = g.size();
    auto index = [&](u64 j) -> std::optional<std::size_t> {
        auto it = std::lower_bound(g.vertices.begin(), g.vertices.end(), j);
        if (it == g.vertices.end() || *it != j)
            return std::nullopt;
        return static_cast<std::size_t>(it - g.vertices.begin());
    };
    for (auto ell : primes) {
        if (!arith::is_prime(static_cast<u64>(ell)) || !horizontal_prime(level, ell))
            continue;
        if (!db.has(static_cast<int>(ell))) {
            g.truncated.push_back(ell);
            continue;
        }
        auto const phi = db.mod_p(static_cast<int>(ell), level.p);
        PrimeEdges pe{ell, arith::kronecker(level.D, ell) == 0, std::vector<int>(n * n, 0)};
        int const weight = pe.ramified ? 2 : 1;
        for (std::size_t i = 0; i < n; ++i)
            for (auto const & [root, mult] : phi.neighbors(g.vertices[i]))
                if (auto k = index(root))
                    pe.adjacency[i * n + *k] += weight * mult;
        g.per_prime.push_back(std::move(pe));
    }
    return g;
}

IsogenyGraph isogeny_graph(Level const & level, std::int64_t M, ModularPolynomialDB const & db)
{
    std::vector<std::int64_t> truncated;
    auto const primes = level_generator_primes(level, M, &truncated, db);
    auto g = isogeny_graph(level, std::span<std::int64_t const>(primes), db);
    g.truncated = std::move(truncated);
    return g;
}

CorrespondenceReport verify_cayley_correspondence(IsogenyGraph const & graph, classgroup::ClassCayleyGraph const & cayley)
{
    CorrespondenceReport r;
    r.isogeny_vertices = graph.size();
    r.cayley_vertices = cayley.graph.vertex_count();
    r.isogeny_regularity = graph.regularity();
    r.cayley_degree = cayley.graph.degree();
    r.isogeny_spectrum = graph.spectrum();
    r.cayley_spectrum = abelian::spectrum(cayley.graph);
    std::sort(r.cayley_spectrum.begin(), r.cayley_spectrum.end());
    bool const sizes = r.isogeny_vertices == r.cayley_vertices;
    r.spectral_distance = sizes ? abelian::multiset_distance(r.isogeny_spectrum, r.cayley_spectrum)
                                : std::numeric_limits<double>::infinity();
    r.match = sizes && r.isogeny_regularity && static_cast<std::size_t>(*r.isogeny_regularity) == r.cayley_degree
              && r.spectral_distance <= 1e-8;
    return r;
}

CorrespondenceReport verify_cayley_correspondence(Level const & level, std::int64_t M, ModularPolynomialDB const & db)
{
    auto const graph = isogeny_graph(level, M, db);
    std::vector<std::int64_t> primes;
    for (auto const & pe : graph.per_prime)
        primes.push_back(pe.ell);
    if (primes.empty())
        throw DomainError("no horizontal primes below M=" + std::to_string(M) + " on the level of conductor c="
                          + std::to_string(level.c));
    auto const cayley = classgroup::class_cayley_graph(level.D, std::span<std::int64_t const>(primes));
    return verify_cayley_correspondence(graph, cayley);
}

std::vector<NavigationStep> level_navigate(u64 j, IsogenyClass const & cls, std::int64_t target, ModularPolynomialDB const & db)
{
    if (target < 1 || cls.f % target != 0)
        throw DomainError("target conductor " + std::to_string(target) + " does not divide f=" + std::to_string(cls.f));
    for (auto const & [ell, e] : arith::factor_small(static_cast<u64>(cls.f)))
        if (!db.has(static_cast<int>(ell)))
            throw UnsupportedModularLevel("navigation needs Phi_" + std::to_string(ell) + ", which is not bundled");

    std::vector<NavigationStep> path;
    std::size_t cur = cls.index_of(j);
    for (auto const & [ell64, H] : arith::factor_small(static_cast<u64>(cls.f))) {
        auto const ell = static_cast<int>(ell64);
        auto const depth = floor_distance(cls, ell, db);
        int const want = H - valuation(target, ell);
        auto const phi = db.mod_p(ell, cls.p);
        while (depth[cur] != want) {
            bool const ascending = depth[cur] < want;
            int const next_depth = depth[cur] + (ascending ? 1 : -1);
            std::optional<std::size_t> next;
            for (auto const & [k, mult] : scan_roots(phi, cls, cls.members[cur].j).members)
                if (depth[k] == next_depth && (!next || cls.members[k].j < cls.members[*next].j))
                    next = k;
            if (!next)
                throw DomainError("no vertical ell=" + std::to_string(ell) + " step from j=" + std::to_string(cls.members[cur].j));
            path.push_back({ell, cls.members[cur].j, cls.members[*next].j, ascending});
            cur = *next;
        }
    }
    return path;
}

} // namespace expander::curves
