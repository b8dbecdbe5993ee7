#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "expander/abelian.hpp"
#include "expander/arith.hpp"
#include "expander/classgroup.hpp"
#include "expander/curves/gap.hpp"
#include "expander/curves/isogeny_class.hpp"
#include "expander/errors.hpp"
#include "expander/residue_graphs.hpp"
#include "expander/walks.hpp"

namespace {

using namespace expander;
using json = nlohmann::ordered_json;

constexpr char const * tool_version = EXPANDER_VERSION;

class Table
{
  public:
    explicit Table(std::vector<std::string> headers) : rows_{std::move(headers)} {}

    template <class... T>
    void row(T const &... cells)
    {
        std::vector<std::string> r;
        (r.push_back(cell(cells)), ...);
        rows_.push_back(std::move(r));
    }

    void print(std::ostream & os) const
    {
        std::vector<std::size_t> width;
        for (auto const & r : rows_)
            for (std::size_t i = 0; i < r.size(); ++i) {
                width.resize(std::max(width.size(), r.size()));
                width[i] = std::max(width[i], r[i].size());
            }
        for (auto const & r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i)
                os << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << r[i];
            os << '\n';
        }
    }

  private:
    static std::string cell(std::string const & s) { return s; }
    static std::string cell(char const * s) { return s; }
    static std::string cell(bool b) { return b ? "yes" : "no"; }
    static std::string cell(double x)
    {
        std::ostringstream os;
        os << std::setprecision(6) << x;
        return os.str();
    }
    template <class I>
        requires std::is_integral_v<I>
    static std::string cell(I x)
    {
        return std::to_string(x);
    }

    std::vector<std::vector<std::string>> rows_;
};

// Every option of the subcommand with its effective value, for the report.
json resolved_config(CLI::App const & sub)
{
    json out = json::object();
    for (auto const * opt : sub.get_options()) {
        if (opt->get_lnames().empty())
            continue;
        auto const & name = opt->get_lnames().front();
        if (name == "help" || name == "config")
            continue;
        if (opt->count() > 0) {
            auto const & r = opt->results();
            out[name] = r.size() == 1 ? json(r.front()) : json(r);
        } else {
            auto const d = opt->get_default_str();
            out[name] = d.empty() ? json(nullptr) : json(d);
        }
    }
    return out;
}

struct Common
{
    std::string out;
    std::uint64_t seed = 0;
    std::string data_dir;

    curves::ModularPolynomialDB const & db() const
    {
        if (data_dir.empty())
            return curves::ModularPolynomialDB::bundled();
        static std::optional<curves::ModularPolynomialDB> loaded;
        if (!loaded)
            loaded = curves::ModularPolynomialDB::load(std::filesystem::path(data_dir) / "modular_polynomials");
        return *loaded;
    }
};

json envelope(CLI::App const & sub, std::string const & anchor, Common const & common)
{
    json r;
    r["tool"] = "expander";
    r["version"] = tool_version;
    r["command"] = sub.get_name();
    r["anchor"] = anchor;
    r["seed"] = common.seed;
    r["config"] = resolved_config(sub);
    return r;
}

void emit(json const & report, Common const & common)
{
    if (common.out.empty())
        return;
    std::ofstream f(common.out);
    if (!f)
        throw IoError("cannot write " + common.out);
    f << report.dump(2) << '\n';
    if (!f)
        throw IoError("write failed: " + common.out);
}

// trivial: index of the eigenvalue of the constant function.
json spectrum_summary(std::vector<double> const & spec, std::size_t trivial)
{
    double const k = spec.at(trivial);
    double max_nontrivial = 0;
    std::size_t components = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (std::abs(spec[i] - k) <= 1e-9)
            ++components;
        if (i != trivial)
            max_nontrivial = std::max(max_nontrivial, std::abs(spec[i]));
    }
    json s;
    s["size"] = spec.size();
    s["lambda_triv"] = k;
    s["max_nontrivial"] = max_nontrivial;
    s["lambda_min"] = *std::min_element(spec.begin(), spec.end());
    s["delta"] = k > 0 ? 1.0 - max_nontrivial / k : 0.0;
    s["components"] = components;
    return s;
}

std::vector<double> sorted(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    for (double & x : v)
        if (std::abs(x) < 5e-13)
            x = 0; // no "-0" in reports
    return v;
}

constexpr std::size_t spectrum_listing_cap = 512;

// unit-graph ----------------------------------------------------------------

struct UnitGraphArgs
{
    std::int64_t q = 0;
    std::optional<double> B;
    std::optional<std::int64_t> x;
    int girth_len = 20;
};

abelian::CayleyGraph girth_graph(residue::UnitGroup const & units, std::vector<abelian::Element> & base)
{
    std::vector<abelian::Element> gens;
    for (std::int64_t p : {2, 3, 5}) {
        if (units.modulus() % p == 0)
            continue;
        auto const e = units.forward(p);
        base.push_back(e);
        gens.push_back(e);
        gens.push_back(units.group().negate(e));
    }
    return abelian::CayleyGraph(units.group(), gens, true);
}

int cmd_unit_graph(CLI::App const & sub, UnitGraphArgs const & a, Common const & common)
{
    if (!a.B && !a.x)
        throw DomainError("one of --B or --x is required");
    auto const g = residue::build_grh_graph({a.q, a.B, a.x});
    // with only x given, B is the exponent reproducing it: x = (ln q)^B
    double const B = a.B ? *a.B : std::log(static_cast<double>(g.x)) / std::log(std::log(static_cast<double>(a.q)));
    auto const spec = abelian::spectrum(g.graph);
    auto const rep = abelian::expansion_report(std::span<double const>(spec), B);

    std::vector<abelian::Element> base;
    auto const gg = girth_graph(g.units, base);
    auto const girth = abelian::nonabelian_girth(gg, base, a.girth_len);
    auto const odd = abelian::odd_girth(g.graph, a.girth_len);
    // the word-length bound refers to the graph on the base generators
    double const k = static_cast<double>(gg.degree());
    double const n = static_cast<double>(g.graph.vertex_count());

    json r = envelope(sub, "small-prime Cayley graphs of the unit group are expanders", common);
    r["q"] = a.q;
    r["x"] = g.x;
    r["B"] = B;
    r["group_order"] = g.graph.vertex_count();
    r["cyclic_factors"] = g.units.group().moduli();
    r["k"] = g.graph.degree();
    r["primes"] = g.primes.size();
    r["lambda_triv"] = rep.lambda_triv;
    r["max_nontrivial"] = rep.max_nontrivial_abs;
    r["lambda_min"] = rep.lambda_min;
    r["delta"] = rep.delta;
    r["grh_ratio"] = rep.grh_ratio;
    r["components"] = rep.connected_components;
    r["least_nonresidue"] = a.q % 2 ? json(residue::least_prime_nonresidue(a.q)) : json(nullptr);
    json gj;
    gj["base"] = json::array();
    for (auto const & e : base)
        gj["base"].push_back(g.units.inverse(e));
    gj["search_bound"] = girth.bound;
    gj["nonabelian"] = girth.length ? json(*girth.length) : json(nullptr);
    gj["word"] = girth.word;
    gj["odd"] = odd ? json(*odd) : json(nullptr);
    gj["log_bound"] = k > 2 ? std::log(n) / std::log(k - 1) : 0.0;
    r["girth"] = gj;
    if (spec.size() <= spectrum_listing_cap)
        r["spectrum"] = sorted(spec);
    emit(r, common);

    Table t({"q", "x", "k", "|G|", "lambda_triv", "max|lambda|", "delta", "grh_ratio", "components", "girth", "odd girth"});
    t.row(a.q, g.x, g.graph.degree(), g.graph.vertex_count(), rep.lambda_triv, rep.max_nontrivial_abs, rep.delta,
          rep.grh_ratio, rep.connected_components,
          girth.length ? std::to_string(*girth.length) : ">" + std::to_string(girth.bound),
          odd ? std::to_string(*odd) : ">" + std::to_string(a.girth_len));
    t.print(std::cout);
    return 0;
}

// class-graph ---------------------------------------------------------------

struct ClassGraphArgs
{
    std::int64_t D = 0;
    std::optional<std::int64_t> M;
    double B = 2.0;
};

int cmd_class_graph(CLI::App const & sub, ClassGraphArgs const & a, Common const & common)
{
    std::int64_t const M = a.M ? *a.M : classgroup::default_prime_bound(a.D, a.B);
    auto const cg = classgroup::class_cayley_graph(a.D, M);
    auto const spec = abelian::spectrum(cg.graph);

    json r = envelope(sub, "class-group Cayley graph on prime ideals of small norm", common);
    r["D"] = a.D;
    r["M"] = M;
    r["h"] = cg.classes.class_number();
    r["cyclic_factors"] = cg.classes.structure().moduli();
    json gens = json::array();
    for (auto const & g : cg.generators)
        gens.push_back({{"ell", g.ell}, {"form", g.form.to_string()}, {"ramified", g.ramified}, {"principal", g.principal}});
    r["generators_used"] = gens;
    r["k"] = cg.graph.degree();
    r["spectrum_summary"] = spectrum_summary(spec, 0);
    if (spec.size() <= spectrum_listing_cap)
        r["spectrum"] = sorted(spec);
    emit(r, common);

    auto const s = r["spectrum_summary"];
    Table t({"D", "h", "M", "k", "max|lambda|", "lambda_min", "components"});
    t.row(a.D, cg.classes.class_number(), M, cg.graph.degree(), s["max_nontrivial"].get<double>(),
          s["lambda_min"].get<double>(), s["components"].get<std::size_t>());
    t.print(std::cout);
    return 0;
}

// isogeny-class -------------------------------------------------------------

struct IsogenyArgs
{
    std::uint64_t p = 0;
    std::uint64_t N = 0;
    std::optional<std::int64_t> M;
    std::optional<double> B;
};

std::int64_t isogeny_prime_limit(IsogenyArgs const & a)
{
    if (a.M && a.B)
        throw DomainError("--M and --B are exclusive");
    if (a.B)
        return curves::isogeny_prime_bound(a.p, *a.B) + 1; // primes ell <= bound
    return a.M ? *a.M : 8;
}

int cmd_isogeny_class(CLI::App const & sub, IsogenyArgs const & a, Common const & common)
{
    std::int64_t const M = isogeny_prime_limit(a);
    auto const & db = common.db();
    auto const cls = curves::enumerate_isogeny_class(a.p, a.N);
    auto const levels = curves::partition_levels(cls, db);

    json r = envelope(sub, "isogeny graph of a level is an expander", common);
    r["p"] = cls.p;
    r["N"] = cls.N;
    r["t"] = cls.t;
    r["d"] = cls.d;
    r["D0"] = cls.D0;
    r["f"] = cls.f;
    r["M"] = M;
    r["levels"] = json::array();
    Table t({"c", "D", "h", "primes", "regular", "cayley k", "distance", "match"});
    bool all_match = true;
    for (auto const & L : levels) {
        std::vector<std::int64_t> truncated;
        auto const primes = curves::level_generator_primes(L, M, &truncated, db);
        auto const g = curves::isogeny_graph(L, std::span<std::int64_t const>(primes), db);
        auto const corr = curves::verify_cayley_correspondence(L, M, db);
        all_match = all_match && corr.match;
        json lj;
        lj["c"] = L.c;
        lj["D"] = L.D;
        lj["h"] = L.members.size();
        lj["j_invariants"] = L.members;
        lj["primes"] = primes;
        lj["truncated"] = truncated;
        lj["regularity"] = g.regularity() ? json(*g.regularity()) : json(nullptr);
        auto const spec = g.spectrum();
        lj["spectrum_summary"] = spec.empty() ? json(nullptr) : spectrum_summary(spec, spec.size() - 1);
        lj["correspondence"] = {{"match", corr.match},
                                {"cayley_degree", corr.cayley_degree},
                                {"spectral_distance", corr.spectral_distance}};
        r["levels"].push_back(lj);
        std::ostringstream ps;
        for (std::size_t i = 0; i < primes.size(); ++i)
            ps << (i ? "," : "") << primes[i];
        t.row(L.c, L.D, L.members.size(), ps.str().empty() ? "-" : ps.str(),
              g.regularity() ? std::to_string(*g.regularity()) : "no", corr.cayley_degree, corr.spectral_distance,
              corr.match);
    }
    r["all_correspondences_match"] = all_match;
    r["conductor_gap"] = curves::conductor_gap(cls);
    emit(r, common);

    std::cout << "p=" << cls.p << " N=" << cls.N << " t=" << cls.t << " d=" << cls.d << " D0=" << cls.D0
              << " f=" << cls.f << " gap=" << curves::conductor_gap(cls) << '\n';
    t.print(std::cout);
    return 0;
}

// mix -----------------------------------------------------------------------

struct MixArgs
{
    std::string graph = "unit";
    std::int64_t q = 1009;
    std::optional<double> B;
    std::optional<std::int64_t> x;
    std::int64_t D = -23;
    std::int64_t M = 3;
    std::int64_t n = 10;
    std::int64_t length = 0;
    std::uint64_t trials = 10000;
    double target_fraction = 0.1;
    std::int64_t max_t = 0;
};

std::vector<std::size_t> seeded_target(std::size_t n, std::size_t size, std::uint64_t seed)
{
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    walks::CounterRng rng(seed, 0x7a59e7ull);
    for (std::size_t i = n; i > 1; --i)
        std::swap(v[i - 1], v[rng.below(i)]);
    v.resize(size);
    std::sort(v.begin(), v.end());
    return v;
}

int cmd_mix(CLI::App const & sub, MixArgs const & a, Common const & common)
{
    std::optional<abelian::CayleyGraph> graph;
    std::ostringstream id;
    if (a.graph == "unit") {
        auto B = a.B;
        if (!B && !a.x)
            B = 2.5;
        auto g = residue::build_grh_graph({a.q, B, a.x});
        id << "unit:q=" << a.q << ":x=" << g.x;
        graph = std::move(g.graph);
    } else if (a.graph == "class") {
        auto g = classgroup::class_cayley_graph(a.D, a.M);
        id << "class:D=" << a.D << ":M=" << a.M;
        graph = std::move(g.graph);
    } else if (a.graph == "complete") {
        if (a.n < 1)
            throw DomainError("--n must be positive");
        abelian::AbelianGroup G({a.n});
        std::vector<abelian::Element> all;
        for (std::int64_t i = 0; i < a.n; ++i)
            all.push_back(G.element_at(static_cast<std::uint64_t>(i)));
        graph.emplace(G, all, true);
        id << "complete:n=" << a.n;
    } else {
        throw DomainError("unknown graph kind " + a.graph + " (unit, class, complete)");
    }
    if (!(a.target_fraction > 0 && a.target_fraction <= 1))
        throw DomainError("--target-fraction must lie in (0, 1]");

    auto const w = walks::WalkGraph::from_cayley(*graph);
    auto const spec = abelian::spectrum(*graph);
    double c = 0;
    for (std::size_t i = 1; i < spec.size(); ++i)
        c = std::max(c, std::abs(spec[i]));
    double const k = static_cast<double>(w.k);
    auto const target_size =
        static_cast<std::size_t>(std::ceil(a.target_fraction * static_cast<double>(w.n) - 1e-9));
    auto const target = seeded_target(w.n, std::max<std::size_t>(target_size, 1), common.seed);
    std::int64_t const length =
        a.length > 0 ? a.length : walks::mixing_length(w.n, target.size(), k, std::min(c, k - 1e-12));
    auto const rep = walks::run_walks(w, 0, {length, a.trials, common.seed}, target);

    std::int64_t const max_t = a.max_t > 0 ? a.max_t : 2 * length;
    json checks = json::array();
    bool all_ok = true;
    double const root_n = std::sqrt(static_cast<double>(w.n));
    for (std::int64_t t = 0; t <= max_t; ++t) {
        double const linf = walks::linf_to_uniform(walks::exact_distribution(w, 0, t));
        double const bound = std::pow(c / k, static_cast<double>(t)) * root_n;
        bool const ok = linf <= bound + 1e-12;
        all_ok = all_ok && ok;
        checks.push_back({{"t", t}, {"linf", linf}, {"bound", bound}, {"ok", ok}});
    }

    json r = envelope(sub, "random walk lands in any fixed subset", common);
    r["graph_id"] = id.str();
    r["graph_size"] = w.n;
    r["k"] = w.k;
    r["max_nontrivial"] = c;
    r["bipartite_component"] = w.has_bipartite_component();
    r["length"] = rep.length;
    r["trials"] = rep.trials;
    r["target_size"] = rep.target_size;
    r["hits"] = rep.hits;
    r["expected_prob"] = rep.expected_prob;
    r["observed_freq"] = rep.observed_freq;
    r["ci3sigma"] = rep.ci3sigma;
    r["within_3sigma"] = rep.within_3sigma;
    r["band"] = {rep.band_low, rep.band_high};
    r["in_lemma_band"] = rep.in_lemma_band ? json(*rep.in_lemma_band) : json(nullptr);
    r["linf_checks"] = checks;
    r["linf_bound_holds"] = all_ok;
    emit(r, common);

    Table t({"graph", "|G|", "k", "length", "trials", "|S|", "expected", "observed", "3 sigma", "band", "linf ok"});
    t.row(id.str(), w.n, w.k, rep.length, rep.trials, rep.target_size, rep.expected_prob, rep.observed_freq,
          rep.within_3sigma, rep.in_lemma_band ? (*rep.in_lemma_band ? "yes" : "no") : "n/a", all_ok);
    t.print(std::cout);
    return 0;
}

// dlog-reduce ---------------------------------------------------------------

struct DlogArgs
{
    std::uint64_t p = 167;
    std::uint64_t N = 166;
    std::int64_t c = 1;
    double mu = 0.5;
    std::uint64_t runs = 100;
    std::int64_t M = 8;
    double C = 4.0;
    double retry_factor = 64;
};

int cmd_dlog_reduce(CLI::App const & sub, DlogArgs const & a, Common const & common)
{
    auto const & db = common.db();
    auto const cls = curves::enumerate_isogeny_class(a.p, a.N);
    auto const levels = curves::partition_levels(cls, db);
    auto const it = std::find_if(levels.begin(), levels.end(), [&](auto const & L) { return L.c == a.c; });
    if (it == levels.end())
        throw DomainError("no level of conductor " + std::to_string(a.c));
    walks::DlogConfig cfg;
    cfg.M = a.M;
    cfg.C = a.C;
    cfg.retry_factor = a.retry_factor;
    cfg.seed = common.seed;
    auto const rep = walks::run_dlog_experiment(cls, *it, a.mu, a.runs, cfg);

    json r = envelope(sub, "random self-reduction of discrete logs across a level", common);
    std::ostringstream id;
    id << "p=" << a.p << ":N=" << a.N << ":c=" << a.c;
    r["level_id"] = id.str();
    r["p"] = rep.p;
    r["N"] = rep.N;
    r["c"] = rep.c;
    r["h"] = rep.h;
    r["primes"] = rep.primes;
    r["r"] = rep.r;
    r["mu"] = rep.mu;
    r["covered"] = rep.covered;
    r["runs"] = rep.runs;
    r["walk_length"] = rep.walk_length;
    r["mean_queries"] = rep.mean_queries;
    r["max_queries"] = rep.max_queries;
    r["mean_answered"] = rep.mean_answered;
    r["failures"] = rep.failures;
    r["collisions"] = rep.collisions;
    r["all_verified"] = rep.all_verified;
    emit(r, common);

    Table t({"level", "h", "r", "mu", "covered", "runs", "length", "mean queries", "max", "failures", "verified"});
    t.row(id.str(), rep.h, rep.r, rep.mu, rep.covered, rep.runs, rep.walk_length, rep.mean_queries, rep.max_queries,
          rep.failures, rep.all_verified);
    t.print(std::cout);
    return 0;
}

// gap -----------------------------------------------------------------------

struct GapArgs
{
    std::string fixture;
    std::optional<std::uint64_t> p;
    std::optional<std::uint64_t> N;
    double beta = 2.0;
};

int cmd_gap(CLI::App const & sub, GapArgs const & a, Common const & common)
{
    json r = envelope(sub, "conductor gap from the largest square factor", common);
    Table t({"source", "D0", "f", "gap", "heuristic"});
    if (!a.fixture.empty()) {
        if (a.p || a.N)
            throw DomainError("--fixture excludes --p/--N");
        auto const d = curves::load_factored_discriminant(a.fixture);
        auto const g = curves::gap_from_factored_discriminant(d);
        r["source"] = a.fixture;
        r["discriminant"] = d.to_string();
        r["D0"] = g.fundamental.str();
        r["largest_square_factor"] = g.conductor.str();
        r["conductor_factors"] = g.conductor_factors.factors.empty() ? "1" : g.conductor_factors.to_string();
        r["gap"] = g.gap.str();
        auto const digits = arith::BigInt(boost::multiprecision::abs(d.value())).str().size();
        double const q = std::pow(10.0, std::min<double>(static_cast<double>(digits), 300.0));
        double const h = curves::gap_probability_heuristic(a.beta, q);
        r["heuristic"] = {{"beta", a.beta}, {"probability", h}};
        auto const name = std::filesystem::path(a.fixture).filename().string();
        t.row(name, g.fundamental.str().size() > 24 ? g.fundamental.str().substr(0, 21) + "..." : g.fundamental.str(),
              g.conductor.str(), g.gap.str(), h);
    } else {
        if (!a.p || !a.N)
            throw DomainError("give --fixture or both --p and --N");
        auto const cls = curves::enumerate_isogeny_class(*a.p, *a.N);
        auto const gap = curves::conductor_gap(cls);
        double const h = curves::gap_probability_heuristic(a.beta, static_cast<double>(*a.p));
        r["p"] = cls.p;
        r["N"] = cls.N;
        r["t"] = cls.t;
        r["d"] = cls.d;
        r["D0"] = cls.D0;
        r["largest_square_factor"] = cls.f;
        r["gap"] = gap;
        r["heuristic"] = {{"beta", a.beta}, {"probability", h}};
        std::ostringstream name;
        name << "p=" << cls.p << " N=" << cls.N;
        t.row(name.str(), cls.D0, cls.f, gap, h);
    }
    emit(r, common);
    t.print(std::cout);
    return 0;
}

std::string trim(std::string s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Expands "--config FILE" into flags for every key not already given.
std::vector<std::string> expand_config(std::vector<std::string> args)
{
    auto const it = std::find(args.begin(), args.end(), "--config");
    if (it == args.end())
        return args;
    if (std::next(it) == args.end())
        throw IoError("--config needs a file");
    std::string const path = *std::next(it);
    args.erase(it, std::next(it, 2));
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path);
    std::vector<std::string> extra;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto const eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string const flag = "--" + trim(line.substr(0, eq));
        if (std::find(args.begin(), args.end(), flag) != args.end())
            continue;
        extra.push_back(flag);
        extra.push_back(trim(line.substr(eq + 1)));
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

void add_common(CLI::App & sub, Common & common)
{
    sub.add_option("--out", common.out, "JSON report path");
    sub.add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
    sub.add_option("--data-dir", common.data_dir, "Directory holding modular_polynomials/");
    sub.add_option("--config", "key=value file of option names without dashes; command-line flags win");
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Expander graphs from unit groups, class groups and isogeny classes"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);

    Common common;

    UnitGraphArgs ua;
    auto * unit = app.add_subcommand("unit-graph", "Cayley graph of (Z/qZ)* on small primes");
    unit->add_option("--q", ua.q, "Modulus")->required();
    auto * ub = unit->add_option("--B", ua.B, "x = ceil((ln q)^B)");
    unit->add_option("--x", ua.x, "Explicit prime bound")->excludes(ub);
    unit->add_option("--girth-len", ua.girth_len, "Longest word in the girth searches (<= 30)")->capture_default_str();
    add_common(*unit, common);

    ClassGraphArgs ca;
    auto * cgraph = app.add_subcommand("class-graph", "Cayley graph of a class group on prime forms");
    cgraph->add_option("--D", ca.D, "Discriminant")->required();
    auto * cm = cgraph->add_option("--M", ca.M, "Use primes ell < M");
    cgraph->add_option("--B", ca.B, "M = ceil((ln |D|)^B) when --M is absent")->capture_default_str()->excludes(cm);
    add_common(*cgraph, common);

    IsogenyArgs ia;
    auto * iso = app.add_subcommand("isogeny-class", "Levels, isogeny graphs and class-group correspondence");
    iso->add_option("--p", ia.p, "Prime")->required();
    iso->add_option("--N", ia.N, "Number of points")->required();
    iso->add_option("--M", ia.M, "Use primes ell < M (default 8)");
    iso->add_option("--B", ia.B, "Use primes ell <= ceil((ln 4p)^B)");
    add_common(*iso, common);

    MixArgs ma;
    auto * mix = app.add_subcommand("mix", "Seeded random walks against exact distributions");
    mix->add_option("--graph", ma.graph, "unit, class or complete")->capture_default_str();
    mix->add_option("--q", ma.q, "unit: modulus")->capture_default_str();
    auto * mb = mix->add_option("--B", ma.B, "unit: x = ceil((ln q)^B), default 2.5");
    mix->add_option("--x", ma.x, "unit: explicit prime bound")->excludes(mb);
    mix->add_option("--D", ma.D, "class: discriminant")->capture_default_str();
    mix->add_option("--M", ma.M, "class: primes ell < M")->capture_default_str();
    mix->add_option("--n", ma.n, "complete: order of the cyclic group")->capture_default_str();
    mix->add_option("--length", ma.length, "Walk length (0: mixing length)")->capture_default_str();
    mix->add_option("--trials", ma.trials, "Number of walks")->capture_default_str();
    mix->add_option("--target-fraction", ma.target_fraction, "Target size over graph size")->capture_default_str();
    mix->add_option("--max-t", ma.max_t, "Largest t in the distance checks (0: twice the length)")
        ->capture_default_str();
    add_common(*mix, common);

    DlogArgs da;
    auto * dlog = app.add_subcommand("dlog-reduce", "Random-walk reduction of discrete logs across a level");
    dlog->add_option("--p", da.p, "Prime")->capture_default_str();
    dlog->add_option("--N", da.N, "Number of points")->capture_default_str();
    dlog->add_option("--c", da.c, "Conductor of the level")->capture_default_str();
    dlog->add_option("--mu", da.mu, "Fraction of the level the oracle covers")->capture_default_str();
    dlog->add_option("--runs", da.runs, "Independent reductions")->capture_default_str();
    dlog->add_option("--M", da.M, "Horizontal degrees ell < M")->capture_default_str();
    dlog->add_option("--C", da.C, "Walk length constant")->capture_default_str();
    dlog->add_option("--retry-factor", da.retry_factor, "Walks per run capped at this over mu")->capture_default_str();
    add_common(*dlog, common);

    GapArgs ga;
    auto * gap = app.add_subcommand("gap", "Conductor gap of a class or of a factored discriminant");
    gap->add_option("--fixture", ga.fixture, "Factored discriminant file");
    gap->add_option("--p", ga.p, "Prime");
    gap->add_option("--N", ga.N, "Number of points");
    gap->add_option("--beta", ga.beta, "Heuristic lower prime cutoff")->capture_default_str();
    add_common(*gap, common);

    try {
        auto args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (IoError const & e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (CLI::ParseError const & e) {
        int const code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*unit)
            return cmd_unit_graph(*unit, ua, common);
        if (*cgraph)
            return cmd_class_graph(*cgraph, ca, common);
        if (*iso)
            return cmd_isogeny_class(*iso, ia, common);
        if (*mix)
            return cmd_mix(*mix, ma, common);
        if (*dlog)
            return cmd_dlog_reduce(*dlog, da, common);
        if (*gap)
            return cmd_gap(*gap, ga, common);
    } catch (IoError const & e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (DomainError const & e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
