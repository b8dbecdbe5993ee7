#include "expander/curves/modular.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "expander/errors.hpp"

#ifndef EXPANDER_DATA_DIR
#define EXPANDER_DATA_DIR "data"
#endif

namespace expander::curves {

using arith::BigInt;

BigInt ModularPolynomial::evaluate(BigInt const & x, BigInt const & y) const
{
    BigInt total = 0;
    BigInt xi = 1;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        BigInt yj = 1;
        for (std::size_t j = 0; j < coeffs[i].size(); ++j) {
            total += coeffs[i][j] * xi * yj;
            yj *= y;
        }
        xi *= x;
    }
    return total;
}

std::uint64_t ModularPolynomial::checksum() const
{
    BigInt const m = (BigInt(1) << 61) - 1;
    BigInt total = 0;
    BigInt pi = 1;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        BigInt pj = 1;
        for (std::size_t j = 0; j < coeffs[i].size(); ++j) {
            total = (total + coeffs[i][j] % m * pi % m * pj) % m;
            pj = pj * 5 % m;
        }
        pi = pi * 3 % m;
    }
    if (total < 0)
        total += m;
    return static_cast<std::uint64_t>(total);
}

ModularPolynomialModP::ModularPolynomialModP(ModularPolynomial const & phi, u64 p)
    : ell_(phi.ell)
    , F_(p)
{
    BigInt const bp(p);
    c_.assign(phi.coeffs.size(), std::vector<u64>(phi.coeffs.size(), 0));
    for (std::size_t i = 0; i < phi.coeffs.size(); ++i)
        for (std::size_t j = 0; j < phi.coeffs.size(); ++j) {
            BigInt r = phi.coeffs[i][j] % bp;
            if (r < 0)
                r += bp;
            c_[i][j] = static_cast<u64>(r);
        }
}

u64 ModularPolynomialModP::evaluate(u64 x, u64 y) const
{
    Poly const f = specialize(x);
    return poly::eval(F_, f, y % F_.p());
}

Poly ModularPolynomialModP::specialize(u64 j) const
{
    j %= F_.p();
    Poly out(c_.size(), 0);
    u64 ji = 1;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        for (std::size_t k = 0; k < c_.size(); ++k)
            out[k] = F_.add(out[k], F_.mul(c_[i][k], ji));
        ji = F_.mul(ji, j);
    }
    poly::trim(out);
    return out;
}

std::vector<std::pair<u64, int>> ModularPolynomialModP::neighbors(u64 j) const
{
    return roots(F_, specialize(j));
}

ModularPolynomial parse_modular_polynomial(std::istream & in, std::string const & source)
{
    ModularPolynomial phi;
    std::string line;
    int lineno = 0;
    bool header = false;
    auto fail = [&](std::string const & what) {
        throw IoError(source + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first))
            continue;
        if (!header) {
            int ell = 0;
            if (first != "ell" || !(ls >> ell) || ell < 2)
                fail("expected header 'ell <l>'");
            phi.ell = ell;
            phi.coeffs.assign(static_cast<std::size_t>(ell + 2), std::vector<BigInt>(static_cast<std::size_t>(ell + 2), 0));
            header = true;
            continue;
        }
        std::string js, cs, extra;
        if (!(ls >> js >> cs) || (ls >> extra))
            fail("expected 'i j coeff'");
        static std::regex const integer(R"(-?\d+)");
        if (!std::regex_match(first, integer) || !std::regex_match(js, integer) || !std::regex_match(cs, integer))
            fail("malformed integer");
        int const i = std::stoi(first), j = std::stoi(js);
        if (i < j || j < 0 || i > phi.ell + 1)
            fail("monomial exponents out of range (need ell+1 >= i >= j >= 0)");
        BigInt const c(cs);
        phi.coeffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c;
        phi.coeffs[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = c;
    }
    if (!header)
        throw IoError(source + ": empty modular polynomial file");
    return phi;
}

ModularPolynomialDB ModularPolynomialDB::load(std::filesystem::path const & dir)
{
    ModularPolynomialDB db;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw IoError("modular polynomial directory not found: " + dir.string());
    static std::regex const name(R"(phi_(\d+)\.txt)");
    for (auto const & entry : std::filesystem::directory_iterator(dir)) {
        std::smatch m;
        std::string const fname = entry.path().filename().string();
        if (!std::regex_match(fname, m, name))
            continue;
        std::ifstream in(entry.path());
        if (!in)
            throw IoError("cannot read " + entry.path().string());
        auto phi = parse_modular_polynomial(in, entry.path().string());
        if (phi.ell != std::stoi(m[1]))
            throw IoError(entry.path().string() + ": header level does not match the file name");
        db.polys_.emplace(phi.ell, std::move(phi));
    }
    if (db.polys_.empty())
        throw IoError("no phi_<l>.txt files in " + dir.string());
    return db;
}

std::filesystem::path ModularPolynomialDB::default_directory()
{
    if (char const * env = std::getenv("EXPANDER_DATA_DIR"); env && *env)
        return std::filesystem::path(env) / "modular_polynomials";
    return std::filesystem::path(EXPANDER_DATA_DIR) / "modular_polynomials";
}

ModularPolynomialDB const & ModularPolynomialDB::bundled()
{
    static ModularPolynomialDB const db = load(default_directory());
    return db;
}

std::vector<int> ModularPolynomialDB::levels() const
{
    std::vector<int> out;
    for (auto const & [ell, phi] : polys_)
        out.push_back(ell);
    return out;
}

ModularPolynomial const & ModularPolynomialDB::get(int ell) const
{
    auto it = polys_.find(ell);
    if (it == polys_.end())
        throw UnsupportedModularLevel("no modular polynomial for ell=" + std::to_string(ell)
                                      + " (bundled levels are 2, 3, 5, 7)");
    return it->second;
}

ModularPolynomialModP ModularPolynomialDB::mod_p(int ell, u64 p) const
{
    return ModularPolynomialModP(get(ell), p);
}

} // namespace expander::curves
