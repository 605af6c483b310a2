#include "kneck/spectrum.hpp"

#include "kneck/errors.hpp"
#include "kneck/io.hpp"
#include "kneck/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <tuple>

namespace kneck {

std::string to_string(ProviderTag tag)
{
    return tag == ProviderTag::torus ? "torus" : "synthetic";
}

ProviderTag provider_from_string(const std::string& s)
{
    if (s == "torus")
        return ProviderTag::torus;
    if (s == "synthetic")
        return ProviderTag::synthetic;
    throw ConfigError("unknown spectrum provider '" + s + "'");
}

double Eigenpair::eval(const DPoint& q, double kappa) const
{
    return amplitude * std::cos(kappa * (m * q.t1 + n * q.t2) + phase);
}

double Eigenpair::laplacian(const DPoint& q, double kappa) const
{
    return -kappa * kappa * (m * m + n * n) * eval(q, kappa);
}

double SpectrumData::kappa() const
{
    return 2.0 * pi / side;
}

DPoint SpectrumData::wrap(DPoint q) const
{
    q.t1 -= side * std::floor(q.t1 / side);
    q.t2 -= side * std::floor(q.t2 / side);
    return q;
}

DPoint SpectrumData::displacement(const DPoint& q) const
{
    double d1 = q.t1 - base_point.t1;
    double d2 = q.t2 - base_point.t2;
    d1 -= side * std::round(d1 / side);
    d2 -= side * std::round(d2 / side);
    return {d1, d2};
}

SpectrumData torus_spectrum(int N_max, DPoint p_D, double side)
{
    if (N_max < 1)
        throw ParameterError("torus_spectrum: N_max must be at least 1");
    if (!(side > 0.0))
        throw ParameterError("torus_spectrum: side must be positive");
    SpectrumData s;
    s.side = side;
    s.area = side * side;
    s.provider = ProviderTag::torus;
    s.base_point = s.wrap(p_D);
    const double kappa = s.kappa();

    // One representative (m, n) per +-pair: m > 0, or m == 0 and n > 0.
    std::vector<std::tuple<int, int, int>> reps;
    for (int m = 0; m <= N_max; ++m)
        for (int n = -N_max; n <= N_max; ++n)
            if (m > 0 || n > 0)
                reps.emplace_back(m * m + n * n, m, n);
    std::sort(reps.begin(), reps.end());

    const double c0 = 1.0 / std::sqrt(s.area);
    s.eigenpairs.push_back({0.0, c0, 0, 0, c0, 0.0});
    const double amp = std::sqrt(2.0 / s.area);
    for (const auto& [k2, m, n] : reps) {
        const double lambda = kappa * std::sqrt(static_cast<double>(k2));
        for (double phase : {0.0, -0.5 * pi}) {
            Eigenpair e{lambda, 0.0, m, n, amp, phase};
            double v = e.eval(s.base_point, kappa);
            if (v < 0.0) {
                e.amplitude = -amp;
                v = -v;
            }
            e.psi_at_p = v;
            s.eigenpairs.push_back(e);
        }
    }
    return s;
}

namespace {

double next_uniform(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

SpectrumData synthetic_weyl_spectrum(int count, double C_weyl, std::uint64_t seed, const SyntheticOptions& opt)
{
    if (count < 1)
        throw ParameterError("synthetic_weyl_spectrum: count must be at least 1");
    if (!(C_weyl >= 1.0))
        throw ParameterError("synthetic_weyl_spectrum: C_weyl must be at least 1");
    std::mt19937_64 rng(seed);
    SpectrumData s;
    s.side = opt.side;
    s.area = opt.side * opt.side;
    s.provider = ProviderTag::synthetic;
    s.base_point = {};
    const double kappa = s.kappa();
    const double c0 = 1.0 / std::sqrt(s.area);
    s.eigenpairs.push_back({0.0, c0, 0, 0, c0, 0.0});
    int remaining = count - 1;
    for (int k = 1; remaining > 0; ++k) {
        int cap = static_cast<int>(std::floor(C_weyl * k)) - (k == 1 ? 1 : 0);
        cap = std::max(cap, 0);
        int nk = static_cast<int>(std::floor(next_uniform(rng) * (cap + 1)));
        nk = std::min({nk, cap, remaining});
        std::vector<double> lams;
        for (int i = 0; i < nk; ++i) {
            double l = (k - 1) + next_uniform(rng);
            if (l == 0.0)
                l = 0.5;
            lams.push_back(l);
        }
        std::sort(lams.begin(), lams.end());
        for (double l : lams) {
            const int m = static_cast<int>(std::floor(next_uniform(rng) * 7)) - 3;
            const int n = static_cast<int>(std::floor(next_uniform(rng) * 7)) - 3;
            const double psi = std::min(opt.psi_slope * std::sqrt(l), opt.psi_cap);
            const double phase = -kappa * (m * s.base_point.t1 + n * s.base_point.t2);
            s.eigenpairs.push_back({l, psi, m, n, psi, phase});
        }
        remaining -= nk;
    }
    return s;
}

WeylReport weyl_count_check(const SpectrumData& s, int k_max, double claimed_C)
{
    double lmax = 0.0;
    for (const auto& e : s.eigenpairs)
        lmax = std::max(lmax, e.lambda);
    const int K = k_max > 0 ? k_max : static_cast<int>(std::floor(lmax)) + 1;
    WeylReport rep;
    rep.counts.assign(static_cast<std::size_t>(K), 0);
    for (const auto& e : s.eigenpairs) {
        const int bin = static_cast<int>(std::floor(e.lambda));
        if (bin >= 0 && bin < K)
            ++rep.counts[static_cast<std::size_t>(bin)];
    }
    for (int k = 1; k <= K; ++k)
        rep.fitted_C = std::max(rep.fitted_C, rep.counts[k - 1] / static_cast<double>(k));
    const double C = claimed_C > 0.0 ? claimed_C : rep.fitted_C;
    for (int k = 1; k <= K; ++k)
        if (rep.counts[k - 1] > C * k)
            rep.bound_holds = false;
    return rep;
}

double torus_integral(const SpectrumData& s, const std::function<double(const DPoint&)>& f, int nodes)
{
    const double h = s.side / nodes;
    double acc = 0.0;
    for (int i = 0; i < nodes; ++i)
        for (int j = 0; j < nodes; ++j)
            acc += f({i * h, j * h});
    return acc * h * h;
}

std::string spectrum_to_csv(const SpectrumData& s, const std::string& header_comment)
{
    CsvTable t({"index", "lambda", "psi_at_p", "provider_tag", "meta"});
    if (!header_comment.empty())
        t.add_comment(header_comment);
    t.add_comment("side=" + fmt(s.side));
    t.add_comment("area=" + fmt(s.area));
    t.add_comment("base_point=" + fmt(s.base_point.t1) + ";" + fmt(s.base_point.t2));
    for (std::size_t i = 0; i < s.eigenpairs.size(); ++i) {
        const auto& e = s.eigenpairs[i];
        const std::string meta = "m=" + std::to_string(e.m) + ";n=" + std::to_string(e.n) + ";amp=" + fmt(e.amplitude) +
                                 ";phase=" + fmt(e.phase);
        t.add_row({std::to_string(i), fmt(e.lambda), fmt(e.psi_at_p), to_string(s.provider), meta});
    }
    return t.str();
}

namespace {

std::map<std::string, std::string> split_meta(const std::string& meta)
{
    std::map<std::string, std::string> out;
    std::istringstream in(meta);
    std::string item;
    while (std::getline(in, item, ';')) {
        const auto eq = item.find('=');
        if (eq != std::string::npos)
            out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

} // namespace

SpectrumData spectrum_from_csv(const std::string& text)
{
    SpectrumData s;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const std::string body = line.substr(line.find_first_not_of("# "));
            if (body.rfind("side=", 0) == 0)
                s.side = std::stod(body.substr(5));
            else if (body.rfind("area=", 0) == 0)
                s.area = std::stod(body.substr(5));
            else if (body.rfind("base_point=", 0) == 0) {
                const auto v = body.substr(11);
                const auto semi = v.find(';');
                s.base_point = {std::stod(v.substr(0, semi)), std::stod(v.substr(semi + 1))};
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 5)
            throw ConfigError("spectrum csv line " + std::to_string(lineno) + ": expected 5 columns");
        auto meta = split_meta(cells[4]);
        Eigenpair e;
        e.lambda = std::stod(cells[1]);
        e.psi_at_p = std::stod(cells[2]);
        s.provider = provider_from_string(cells[3]);
        e.m = std::stoi(meta.at("m"));
        e.n = std::stoi(meta.at("n"));
        e.amplitude = std::stod(meta.at("amp"));
        e.phase = std::stod(meta.at("phase"));
        s.eigenpairs.push_back(e);
    }
    if (!(s.side > 0.0))
        throw ConfigError("spectrum csv: missing side header");
    return s;
}

} // namespace kneck
