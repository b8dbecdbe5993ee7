#include "expander/abelian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

#include "expander/arith.hpp"
#include "expander/errors.hpp"

namespace expander::abelian {

AbelianGroup::AbelianGroup(std::vector<std::int64_t> moduli)
    : moduli_(std::move(moduli))
{
    for (auto d : moduli_) {
        if (d <= 0)
            throw DomainError("cyclic factor orders must be positive");
        order_ *= static_cast<std::uint64_t>(d);
        exponent_ = std::lcm(exponent_, d);
    }
}

Element AbelianGroup::add(Element const & x, Element const & y) const
{
    Element out(moduli_.size());
    for (std::size_t j = 0; j < moduli_.size(); ++j) {
        std::int64_t s = x[j] + y[j];
        out[j] = s >= moduli_[j] ? s - moduli_[j] : s;
    }
    return out;
}

Element AbelianGroup::negate(Element const & x) const
{
    Element out(moduli_.size());
    for (std::size_t j = 0; j < moduli_.size(); ++j)
        out[j] = x[j] == 0 ? 0 : moduli_[j] - x[j];
    return out;
}

Element AbelianGroup::scale(Element const & x, std::int64_t k) const
{
    Element out(moduli_.size());
    for (std::size_t j = 0; j < moduli_.size(); ++j)
        out[j] = arith::mod(static_cast<std::int64_t>(static_cast<__int128>(x[j]) * k % moduli_[j]), moduli_[j]);
    return out;
}

Element AbelianGroup::normalize(Element x) const
{
    if (x.size() != moduli_.size())
        throw DomainError("element rank does not match the group");
    for (std::size_t j = 0; j < moduli_.size(); ++j)
        x[j] = arith::mod(x[j], moduli_[j]);
    return x;
}

bool AbelianGroup::contains(Element const & x) const
{
    if (x.size() != moduli_.size())
        return false;
    for (std::size_t j = 0; j < moduli_.size(); ++j) {
        if (x[j] < 0 || x[j] >= moduli_[j])
            return false;
    }
    return true;
}

std::int64_t AbelianGroup::element_order(Element const & x) const
{
    std::int64_t ord = 1;
    for (std::size_t j = 0; j < moduli_.size(); ++j)
        ord = std::lcm(ord, moduli_[j] / std::gcd(moduli_[j], x[j]));
    return ord;
}

std::uint64_t AbelianGroup::index_of(Element const & x) const
{
    std::uint64_t index = 0;
    for (std::size_t j = moduli_.size(); j-- > 0;)
        index = index * static_cast<std::uint64_t>(moduli_[j]) + static_cast<std::uint64_t>(x[j]);
    return index;
}

Element AbelianGroup::element_at(std::uint64_t index) const
{
    Element out(moduli_.size());
    for (std::size_t j = 0; j < moduli_.size(); ++j) {
        out[j] = static_cast<std::int64_t>(index % static_cast<std::uint64_t>(moduli_[j]));
        index /= static_cast<std::uint64_t>(moduli_[j]);
    }
    return out;
}

std::string AbelianGroup::to_string(Element const & x) const
{
    std::ostringstream os;
    for (std::size_t j = 0; j < x.size(); ++j)
        os << (j ? "," : "") << x[j];
    if (x.empty())
        os << "0";
    return os.str();
}

double character_phase(AbelianGroup const & group, Character const & chi, Element const & g)
{
    double phase = 0;
    auto const & d = group.moduli();
    for (std::size_t j = 0; j < d.size(); ++j)
        phase += static_cast<double>((chi.exponents[j] * g[j]) % d[j]) / static_cast<double>(d[j]);
    return phase - std::floor(phase);
}

std::complex<double> evaluate(AbelianGroup const & group, Character const & chi, Element const & g)
{
    return std::polar(1.0, 2.0 * std::numbers::pi * character_phase(group, chi, g));
}

CayleyGraph::CayleyGraph(AbelianGroup group, std::vector<Element> generators, bool allow_self_loops)
    : group_(std::move(group)), generators_(std::move(generators))
{
    std::map<Element, std::int64_t> balance;
    for (auto const & s : generators_) {
        if (!group_.contains(s))
            throw DomainError("generator " + group_.to_string(s) + " is not a reduced group element");
        if (!allow_self_loops && s == group_.identity())
            throw DomainError("identity generator (self-loop) not permitted for this graph");
        ++balance[s];
        --balance[group_.negate(s)];
    }
    for (auto const & [s, count] : balance) {
        if (count != 0)
            throw DomainError("generator multiset is not closed under inversion at " + group_.to_string(s));
    }
}

std::size_t CayleyGraph::self_loop_count() const
{
    auto const id = group_.identity();
    return static_cast<std::size_t>(std::count(generators_.begin(), generators_.end(), id));
}

std::vector<std::uint32_t> CayleyGraph::neighbor_table() const
{
    std::size_t const n = vertex_count();
    std::size_t const k = degree();
    std::vector<std::uint32_t> table(n * k);
    for (std::size_t v = 0; v < n; ++v) {
        Element const x = group_.element_at(v);
        for (std::size_t s = 0; s < k; ++s)
            table[v * k + s] = static_cast<std::uint32_t>(group_.index_of(group_.add(x, generators_[s])));
    }
    return table;
}

std::vector<double> spectrum(CayleyGraph const & graph)
{
    auto const & group = graph.group();
    auto const & d = group.moduli();
    std::int64_t const L = group.exponent();
    std::size_t const r = d.size();

    std::map<Element, double> distinct;
    for (auto const & s : graph.generators())
        distinct[s] += 1.0;
    // weights[s][j] = s_j * (L / d_j), so that chi_a(s) = exp(2 pi i sum_j a_j w_j / L).
    std::vector<std::vector<std::int64_t>> weights;
    std::vector<double> mult;
    for (auto const & [s, m] : distinct) {
        std::vector<std::int64_t> w(r);
        for (std::size_t j = 0; j < r; ++j)
            w[j] = s[j] * (L / d[j]);
        weights.push_back(std::move(w));
        mult.push_back(m);
    }

    constexpr std::int64_t table_cap = std::int64_t{1} << 22;
    std::vector<double> cos_table;
    if (L <= table_cap) {
        cos_table.resize(static_cast<std::size_t>(L));
        for (std::int64_t k = 0; k < L; ++k)
            cos_table[static_cast<std::size_t>(k)] = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(L));
    }

    std::uint64_t const n = group.order();
    std::vector<double> out(n);
    Element a(r, 0);
    for (std::uint64_t idx = 0; idx < n; ++idx) {
        double lambda = 0;
        for (std::size_t s = 0; s < weights.size(); ++s) {
            std::int64_t phase = 0;
            for (std::size_t j = 0; j < r; ++j)
                phase = (phase + static_cast<std::int64_t>(static_cast<__int128>(a[j]) * weights[s][j] % L)) % L;
            double const c = cos_table.empty()
                ? std::cos(2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(L))
                : cos_table[static_cast<std::size_t>(phase)];
            lambda += mult[s] * c;
        }
        out[idx] = lambda;
        for (std::size_t j = 0; j < r; ++j) {
            if (++a[j] < d[j])
                break;
            a[j] = 0;
        }
    }
    return out;
}

std::vector<double> dense_spectrum_oracle(CayleyGraph const & graph)
{
    std::size_t const n = graph.vertex_count();
    if (n > dense_oracle_cap)
        throw DomainError("dense spectrum oracle is capped at |G| <= 4096");
    Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    auto const & group = graph.group();
    for (std::size_t v = 0; v < n; ++v) {
        Element const x = group.element_at(v);
        for (auto const & s : graph.generators()) {
            auto const w = group.index_of(group.add(s, x));
            adjacency(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(v)) += 1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(adjacency, Eigen::EigenvaluesOnly);
    auto const & ev = solver.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end());
    return out;
}

ExpansionReport expansion_report(std::span<double const> spec, double B)
{
    if (spec.empty())
        throw DomainError("empty spectrum");
    ExpansionReport report;
    report.B = B;
    report.lambda_triv = spec[0];
    report.lambda_min = *std::min_element(spec.begin(), spec.end());
    if (!(report.lambda_triv > 1.0))
        throw DomainError("lambda_triv <= 1: the GRH ratio is undefined");
    constexpr double multiplicity_tol = 1e-9;
    report.connected_components = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (std::abs(spec[i] - report.lambda_triv) <= multiplicity_tol)
            ++report.connected_components;
        if (i > 0)
            report.max_nontrivial_abs = std::max(report.max_nontrivial_abs, std::abs(spec[i]));
    }
    report.delta = 1.0 - report.max_nontrivial_abs / report.lambda_triv;
    double const scale = std::pow(report.lambda_triv * std::log(report.lambda_triv), 0.5 + 1.0 / B);
    report.grh_ratio = report.max_nontrivial_abs / scale;
    return report;
}

ExpansionReport expansion_report(CayleyGraph const & graph, double B)
{
    auto const spec = spectrum(graph);
    return expansion_report(std::span<double const>(spec), B);
}

std::size_t connected_components(CayleyGraph const & graph)
{
    std::size_t const n = graph.vertex_count();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::size_t components = n;
    auto const table = graph.neighbor_table();
    std::size_t const k = graph.degree();
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t s = 0; s < k; ++s) {
            auto a = find(v);
            auto b = find(table[v * k + s]);
            if (a != b) {
                parent[a] = b;
                --components;
            }
        }
    }
    return components;
}

GirthResult nonabelian_girth(CayleyGraph const & graph, std::span<Element const> base, int max_len)
{
    if (max_len > 30)
        throw DomainError("nonabelian girth search is limited to words of length <= 30");
    auto const & group = graph.group();
    std::size_t const r = base.size();
    std::size_t const n = group.order();
    GirthResult best;
    best.bound = max_len;
    if (r == 0)
        return best;

    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << (r - 1)); ++pattern) {
        std::vector<std::uint64_t> step(r);
        std::vector<int> sign(r);
        for (std::size_t i = 0; i < r; ++i) {
            sign[i] = (i > 0 && ((pattern >> (i - 1)) & 1)) ? -1 : 1;
            step[i] = group.index_of(sign[i] > 0 ? group.normalize(base[i]) : group.negate(group.normalize(base[i])));
        }
        // State (element, smallest generator index still allowed): words are
        // enumerated as multisets, which is all that matters in an abelian group.
        std::vector<int> dist(n * r, -1);
        std::vector<std::int64_t> parent(n * r, -1);
        std::queue<std::size_t> frontier;
        std::optional<std::size_t> hit;
        std::uint64_t const id = group.index_of(group.identity());
        auto const start_elem = group.identity();
        // Virtual root: expand the identity with every generator.
        for (std::size_t i = 0; i < r && !hit; ++i) {
            auto const e = group.index_of(group.add(start_elem, group.element_at(step[i])));
            std::size_t const state = e * r + i;
            if (dist[state] == -1) {
                dist[state] = 1;
                parent[state] = -1;
                if (e == id)
                    hit = state;
                frontier.push(state);
            }
        }
        while (!frontier.empty() && !hit) {
            std::size_t const state = frontier.front();
            frontier.pop();
            int const d = dist[state];
            if (best.length && d + 1 >= *best.length)
                break;
            if (d + 1 > max_len)
                break;
            std::size_t const e = state / r;
            std::size_t const lo = state % r;
            Element const x = group.element_at(e);
            for (std::size_t i = lo; i < r; ++i) {
                auto const e2 = group.index_of(group.add(x, group.element_at(step[i])));
                std::size_t const next = e2 * r + i;
                if (dist[next] != -1)
                    continue;
                dist[next] = d + 1;
                parent[next] = static_cast<std::int64_t>(state);
                if (e2 == id) {
                    hit = next;
                    break;
                }
                frontier.push(next);
            }
        }
        if (!hit || dist[*hit] > max_len)
            continue;
        if (best.length && dist[*hit] >= *best.length)
            continue;
        best.length = dist[*hit];
        best.word.assign(r, 0);
        for (std::int64_t s = static_cast<std::int64_t>(*hit); s != -1; s = parent[static_cast<std::size_t>(s)]) {
            std::size_t const i = static_cast<std::size_t>(s) % r;
            best.word[i] += sign[i];
        }
    }
    return best;
}

std::optional<int> odd_girth(CayleyGraph const & graph, int max_len)
{
    std::size_t const n = graph.vertex_count();
    std::size_t const k = graph.degree();
    auto const table = graph.neighbor_table();
    std::uint64_t const start = graph.group().index_of(graph.group().identity());
    std::vector<int> dist(2 * n, -1);
    std::queue<std::size_t> frontier;
    dist[2 * start] = 0;
    frontier.push(2 * start);
    while (!frontier.empty()) {
        std::size_t const state = frontier.front();
        frontier.pop();
        int const d = dist[state];
        if (d >= max_len)
            break;
        std::size_t const v = state / 2;
        std::size_t const parity = state % 2;
        for (std::size_t s = 0; s < k; ++s) {
            std::size_t const next = 2 * table[v * k + s] + (1 - parity);
            if (dist[next] != -1)
                continue;
            dist[next] = d + 1;
            if (next == 2 * start + 1)
                return d + 1;
            frontier.push(next);
        }
    }
    return std::nullopt;
}

bool same_multiset(std::vector<double> a, std::vector<double> b, double tol)
{
    if (a.size() != b.size())
        return false;
    return multiset_distance(std::move(a), std::move(b)) <= tol;
}

double multiset_distance(std::vector<double> a, std::vector<double> b)
{
    if (a.size() != b.size())
        return std::numeric_limits<double>::infinity();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

void write_edge_list(std::ostream & os, CayleyGraph const & graph)
{
    auto const & group = graph.group();
    for (std::uint64_t v = 0; v < group.order(); ++v) {
        Element const x = group.element_at(v);
        for (auto const & s : graph.generators())
            os << group.to_string(x) << ' ' << group.to_string(group.add(s, x)) << '\n';
    }
}

void write_spectrum_csv(std::ostream & os, CayleyGraph const & graph, std::span<double const> spec)
{
    auto const & group = graph.group();
    for (std::size_t j = 0; j < group.rank(); ++j)
        os << 'a' << (j + 1) << ',';
    os << "lambda\n";
    char buf[64];
    for (std::uint64_t idx = 0; idx < spec.size(); ++idx) {
        Element const a = group.element_at(idx);
        for (auto v : a)
            os << v << ',';
        std::snprintf(buf, sizeof buf, "%.17g", spec[idx]);
        os << buf << '\n';
    }
}

namespace {

std::size_t power(std::size_t x, std::uint64_t k, std::size_t identity,
                  std::function<std::size_t(std::size_t, std::size_t)> const & op)
{
    std::size_t result = identity;
    while (k) {
        if (k & 1)
            result = op(result, x);
        x = op(x, x);
        k >>= 1;
    }
    return result;
}

} // namespace

Decomposition decompose(std::size_t n, std::size_t identity,
                        std::function<std::size_t(std::size_t, std::size_t)> const & op)
{
    std::vector<std::size_t> basis;
    std::vector<std::int64_t> orders;

    for (auto [p, v] : arith::factor_small(n)) {
        std::uint64_t pv = 1;
        for (int i = 0; i < v; ++i)
            pv *= p;
        std::uint64_t const cofactor = n / pv;
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> sylow;
        for (std::size_t g = 0; g < n; ++g) {
            auto const y = power(g, cofactor, identity, op);
            if (!seen[y]) {
                seen[y] = true;
                sylow.push_back(y);
            }
        }
        std::sort(sylow.begin(), sylow.end());
        if (sylow.size() != pv)
            throw std::logic_error("decompose: Sylow subgroup has the wrong order");

        // span maps each element of the current subgroup H to its coordinates
        // with respect to the p-part basis found so far.
        std::unordered_map<std::size_t, std::vector<std::int64_t>> span{{identity, {}}};
        std::vector<std::size_t> local_basis;
        std::vector<std::int64_t> local_orders;
        while (span.size() < pv) {
            std::size_t best = identity;
            int best_j = 0;
            for (auto y : sylow) {
                if (span.count(y))
                    continue;
                int j = 0;
                std::size_t z = y;
                while (!span.count(z)) {
                    z = power(z, p, identity, op);
                    ++j;
                }
                if (j > best_j) {
                    best_j = j;
                    best = y;
                }
            }
            std::int64_t pj = 1;
            for (int i = 0; i < best_j; ++i)
                pj *= static_cast<std::int64_t>(p);
            auto const & c = span.at(power(best, static_cast<std::uint64_t>(pj), identity, op));
            // Lift to an element whose order equals its order in the quotient.
            std::size_t x = best;
            for (std::size_t k = 0; k < c.size(); ++k) {
                if (c[k] % pj != 0)
                    throw std::logic_error("decompose: lifting coefficient not divisible");
                std::int64_t const shift = arith::mod(-(c[k] / pj), local_orders[k]);
                x = op(x, power(local_basis[k], static_cast<std::uint64_t>(shift), identity, op));
            }
            std::unordered_map<std::size_t, std::vector<std::int64_t>> grown;
            grown.reserve(span.size() * static_cast<std::size_t>(pj));
            for (auto const & [h, coords] : span) {
                std::size_t cur = h;
                for (std::int64_t t = 0; t < pj; ++t) {
                    auto cc = coords;
                    cc.push_back(t);
                    if (!grown.emplace(cur, std::move(cc)).second)
                        throw std::logic_error("decompose: subgroup sum is not direct");
                    cur = op(cur, x);
                }
            }
            span = std::move(grown);
            local_basis.push_back(x);
            local_orders.push_back(pj);
        }
        basis.insert(basis.end(), local_basis.begin(), local_basis.end());
        orders.insert(orders.end(), local_orders.begin(), local_orders.end());
    }

    Decomposition out{AbelianGroup(orders), std::vector<Element>(n)};
    std::vector<bool> filled(n, false);
    for (std::uint64_t idx = 0; idx < out.group.order(); ++idx) {
        Element const coords = out.group.element_at(idx);
        std::size_t g = identity;
        for (std::size_t k = 0; k < basis.size(); ++k)
            g = op(g, power(basis[k], static_cast<std::uint64_t>(coords[k]), identity, op));
        if (filled[g])
            throw std::logic_error("decompose: coordinate map is not injective");
        filled[g] = true;
        out.coordinates[g] = coords;
    }
    return out;
}

} // namespace expander::abelian
