#include "kneck/errors.hpp"
#include "kneck/io.hpp"
#include "kneck/mode_solver.hpp"
#include "kneck/model_spaces.hpp"
#include "kneck/neck_assembly.hpp"
#include "kneck/numerics.hpp"
#include "kneck/spectrum.hpp"
#include "kneck/suite.hpp"
#include "kneck/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace kneck;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::vector<double> T_list;
    std::vector<double> lambda_list;
    std::string spectrum = "torus:6";
    std::string profile = "neck";
    WeightSpec weights;
    std::string output_dir = "kneck_out";
    std::uint64_t seed = 1;
    int k_minus = 0;
    int k_plus = -1;
    bool svg = true;

    // Canonical text of every resolved field; its hash goes into each output header.
    std::string canonical() const
    {
        std::ostringstream os;
        auto list = [&os](const char* key, const std::vector<double>& v) {
            os << key << '=';
            for (std::size_t i = 0; i < v.size(); ++i)
                os << (i ? "," : "") << fmt(v[i]);
            os << '\n';
        };
        os << "command=" << command << '\n';
        list("T", T_list);
        list("lambda", lambda_list);
        os << "spectrum=" << spectrum << "\nprofile=" << profile << "\nseed=" << seed << "\nk_minus=" << k_minus
           << "\nk_plus=" << k_plus << "\nsvg=" << svg << "\ndelta=" << fmt(weights.delta)
           << "\nnu=" << fmt(weights.nu) << "\nmu=" << fmt(weights.mu) << "\nalpha=" << fmt(weights.alpha)
           << "\nC3=" << fmt(weights.C3) << "\ndelta0=" << fmt(weights.delta0) << '\n';
        return os.str();
    }
    std::string hash() const { return hex64(fnv1a64(canonical())); }
};

double parse_real(const std::string& key, const std::string& v)
{
    const std::vector<double> xs = parse_real_list(v);
    if (xs.size() != 1)
        throw ConfigError(key + ": expected one real number, got '" + v + "'");
    return xs.front();
}

int parse_int(const std::string& key, const std::string& v)
{
    const double x = parse_real(key, v);
    if (x != std::round(x))
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

void apply_key(RunConfig& c, const std::string& key, const std::string& v)
{
    if (key == "T")
        c.T_list = parse_real_list(v);
    else if (key == "lambda")
        c.lambda_list = parse_real_list(v);
    else if (key == "spectrum")
        c.spectrum = v;
    else if (key == "profile")
        c.profile = v;
    else if (key == "out")
        c.output_dir = v;
    else if (key == "seed")
        c.seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "k_minus")
        c.k_minus = parse_int(key, v);
    else if (key == "k_plus")
        c.k_plus = parse_int(key, v);
    else if (key == "svg")
        c.svg = parse_bool(key, v);
    else if (key == "delta")
        c.weights.delta = parse_real(key, v);
    else if (key == "nu")
        c.weights.nu = parse_real(key, v);
    else if (key == "mu")
        c.weights.mu = parse_real(key, v);
    else if (key == "alpha")
        c.weights.alpha = parse_real(key, v);
    else if (key == "C3")
        c.weights.C3 = parse_real(key, v);
    else if (key == "delta0")
        c.weights.delta0 = parse_real(key, v);
    else
        throw ConfigError("unknown key '" + key + "'");
}

struct SpectrumSpec {
    ProviderTag provider = ProviderTag::torus;
    int n = 6;
    std::uint64_t seed = 1;
};

SpectrumSpec parse_spectrum(const std::string& s)
{
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw UsageError("--spectrum: expected torus:N or synthetic:count,seed");
    const std::string kind = s.substr(0, colon);
    const std::vector<double> args = parse_real_list(s.substr(colon + 1));
    SpectrumSpec out;
    if (kind == "torus" && args.size() == 1 && args[0] >= 1 && args[0] == std::round(args[0])) {
        out.n = static_cast<int>(args[0]);
        return out;
    }
    if (kind == "synthetic" && args.size() == 2 && args[0] >= 1 && args[1] >= 0 && args[0] == std::round(args[0]) &&
        args[1] == std::round(args[1])) {
        out.provider = ProviderTag::synthetic;
        out.n = static_cast<int>(args[0]);
        out.seed = static_cast<std::uint64_t>(args[1]);
        return out;
    }
    throw UsageError("--spectrum: expected torus:N or synthetic:count,seed, got '" + s + "'");
}

SpectrumData make_spectrum(const SpectrumSpec& s)
{
    if (s.provider == ProviderTag::torus)
        return default_neck_spectrum(s.n);
    SyntheticOptions o;
    o.side = std::sqrt(2.0 * pi);
    return synthetic_weyl_spectrum(s.n, 4.0, s.seed, o);
}

void validate(RunConfig& c)
{
    if (c.T_list.empty())
        throw UsageError("T list is empty");
    if (!std::is_sorted(c.T_list.begin(), c.T_list.end()) ||
        std::adjacent_find(c.T_list.begin(), c.T_list.end()) != c.T_list.end())
        throw UsageError("T list must be strictly ascending");
    for (double T : c.T_list)
        if (!(T > 0.0))
            throw UsageError("T values must be positive");
    if (c.command == "modes") {
        if (c.lambda_list.empty())
            throw UsageError("lambda list is empty");
        const double cap = ModeOptions{}.lambda_max;
        for (double l : c.lambda_list)
            if (!(l >= 0.0 && l <= cap))
                throw UsageError("lambda values must lie in [0, " + fmt(cap) + "]");
    }
    if (c.command == "err-scan" && c.T_list.size() < 3)
        throw UsageError("err-scan needs at least three T values");
    if (c.k_minus < 0 || c.k_plus > 0)
        throw UsageError("need k_minus >= 0 and k_plus <= 0");
    parse_spectrum(c.spectrum);
    validate_weight_spec(c.weights);
}

class Output {
public:
    explicit Output(const RunConfig& c) : cfg_(c) {}

    CsvTable table(std::vector<std::string> columns) const
    {
        CsvTable t(std::move(columns));
        t.add_comment(std::string(tool_name) + " " + tool_version);
        t.add_comment("command " + cfg_.command);
        t.add_comment("config " + cfg_.hash());
        return t;
    }
    void csv(const std::string& name, const CsvTable& t) const { atomic_write(path(name), t.str()); }
    void svg(const std::string& name, const std::vector<Series>& s, const std::string& title, const std::string& x,
             const std::string& y) const
    {
        if (cfg_.svg)
            atomic_write(path(name), svg_line_plot(s, title, x, y));
    }

private:
    std::string path(const std::string& name) const { return cfg_.output_dir + "/" + name; }
    const RunConfig& cfg_;
};

// File-name form of a parameter, e.g. 50 or 12.5.
std::string short_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string yes(bool b)
{
    return b ? "1" : "0";
}

int cmd_modes(const RunConfig& c, const Output& out)
{
    bool ok = true;
    CsvTable summary = out.table({"T", "lambda", "kind", "f_at_0", "f_at_0_closed_form", "decay_slope", "alpha",
                                  "monotone"});
    const std::vector<double> grid = linspace(-1.0, 0.5, 301);
    for (double T : c.T_list) {
        CsvTable prof = out.table({"T", "lambda", "z", "f", "df"});
        std::vector<Series> curves;
        for (double lambda : c.lambda_list) {
            const ModeSolution m = solve_mode(lambda, T, 1.0);
            Series s{"lambda=" + short_num(lambda), {}, {}};
            for (double z : grid) {
                const Jet j = m.eval(z);
                prof.add_row({fmt(T), fmt(lambda), fmt(z), fmt(j.f), fmt(j.df)});
                s.x.push_back(z);
                s.y.push_back(j.f);
            }
            curves.push_back(std::move(s));
            std::string closed = "nan";
            try {
                closed = fmt(mode_value_at_zero_closed_form(lambda, T, 1.0));
            } catch (const Error&) {
            }
            std::string slope = "nan";
            const double z_lo = 10.0 / T;
            const double z_hi = std::min(50.0 / T, 0.5);
            if (z_hi > z_lo)
                slope = fmt(decay_exponent_fit(m, z_lo, z_hi).slope);
            std::string monotone = "nan";
            if (lambda > 2.0) {
                const bool mono = monotonicity_check(m, grid).passed && m.value(0.0) <= 0.0;
                ok = ok && mono;
                monotone = yes(mono);
            }
            const std::string alpha = lambda == 0.0 ? "1" : fmt(hypergeom_params_of(lambda).alpha);
            const char* kind = m.kind() == ModeSolution::Kind::zero       ? "zero"
                               : m.kind() == ModeSolution::Kind::decaying ? "decaying"
                                                                          : "extrapolated";
            summary.add_row({fmt(T), fmt(lambda), kind, fmt(m.value(0.0)), closed, slope, alpha, monotone});
        }
        out.csv("modes_T" + short_num(T) + ".csv", prof);
        out.svg("modes_T" + short_num(T) + ".svg", curves, "f_lambda at T = " + short_num(T), "z", "f");
    }
    out.csv("modes_summary.csv", summary);
    return ok ? exit_pass : exit_fail;
}

int cmd_assemble(const RunConfig& c, const Output& out)
{
    const SpectrumSpec ss = parse_spectrum(c.spectrum);
    const SpectrumData spec = make_spectrum(ss);
    out.csv("spectrum.csv", [&] {
        CsvTable t = out.table({"lambda", "psi_at_p", "m", "n", "amplitude", "phase"});
        for (const auto& e : spec.eigenpairs)
            t.add_row({fmt(e.lambda), fmt(e.psi_at_p), std::to_string(e.m), std::to_string(e.n), fmt(e.amplitude),
                       fmt(e.phase)});
        return t;
    }());
    const WeylReport weyl = weyl_count_check(spec);
    CsvTable summary = out.table({"T", "levels", "tail_ratio", "truncation_warning", "charge", "g_inf", "weyl_C"});
    const std::vector<double> zs = linspace(-1.0, 0.5, 301);
    const std::vector<DPoint> probes = {spec.wrap({spec.base_point.t1 + 0.1, spec.base_point.t2}),
                                        spec.wrap({spec.base_point.t1 + 0.5 * spec.side, spec.base_point.t2})};
    for (double T : c.T_list) {
        NeckConfig nc;
        nc.T = T;
        nc.k_minus = c.k_minus;
        nc.k_plus = c.k_plus;
        nc.assembly.subtract_singularity = spec.provider == ProviderTag::torus;
        const NeckData nd(spec, nc);
        const DeltaH& dh = nd.delta_h_field();
        summary.add_row({fmt(T), std::to_string(dh.level_count()), fmt(dh.tail_ratio()), yes(dh.truncation_warning()),
                         fmt(nd.charge()), fmt(nd.g_inf()), fmt(weyl.fitted_C)});
        CsvTable t = out.table({"T", "probe", "z", "delta_h", "delta_chi", "h", "chi"});
        std::vector<Series> curves;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            Series s{"probe " + std::to_string(i), {}, {}};
            for (double z : zs) {
                const double h = nd.h(probes[i], z);
                t.add_row({fmt(T), std::to_string(i), fmt(z), fmt(nd.delta_h(probes[i], z)),
                           fmt(nd.delta_chi(probes[i], z)), fmt(h), fmt(nd.chi(probes[i], z))});
                s.x.push_back(z);
                s.y.push_back(h / (T * T));
            }
            curves.push_back(std::move(s));
        }
        out.csv("assemble_T" + short_num(T) + ".csv", t);
        out.svg("assemble_T" + short_num(T) + ".svg", curves, "h / T^2 at T = " + short_num(T), "z", "h / T^2");
    }
    out.csv("assemble_summary.csv", summary);
    return exit_pass;
}

CsvTable rows_table(const Output& out, const std::vector<CriterionResult>& res)
{
    CsvTable t = out.table({"test_id", "T", "zone_or_case", "value", "bound", "pass"});
    for (const auto& r : res)
        for (const auto& x : r.rows) {
            char id[8];
            std::snprintf(id, sizeof id, "c%02d.", r.id);
            t.add_row({id + x.test_id, fmt(x.T), x.zone_or_case, fmt(x.value), fmt(x.bound), yes(x.pass)});
        }
    return t;
}

SuiteConfig suite_config(const RunConfig& c)
{
    const SpectrumSpec ss = parse_spectrum(c.spectrum);
    if (ss.provider != ProviderTag::torus)
        throw UsageError("the property suite runs on the torus provider");
    SuiteConfig s;
    s.T_list = c.T_list;
    s.k_minus = c.k_minus;
    s.k_plus = c.k_plus;
    s.torus_modes = ss.n;
    return s;
}

int run_criteria(const RunConfig& c, const Output& out, const std::vector<int>& ids, const std::string& file)
{
    const SuiteConfig sc = suite_config(c);
    std::vector<CriterionResult> done;
    bool ok = true;
    for (int id : ids) {
        try {
            done.push_back(run_criterion(id, sc));
        } catch (const Error& e) {
            std::cerr << c.command << ": criterion " << id << ": " << e.what() << '\n';
            out.csv(file, rows_table(out, done));
            return exit_fail;
        }
        const CriterionResult& r = done.back();
        ok = ok && r.checks_pass;
        std::cout << (r.checks_pass ? "PASS" : "FAIL") << "  " << r.id << "  " << r.name << '\n';
    }
    out.csv(file, rows_table(out, done));
    return ok ? exit_pass : exit_fail;
}

int cmd_verify(const RunConfig& c, const Output& out)
{
    std::vector<int> ids;
    for (int i = 1; i <= criterion_count; ++i)
        ids.push_back(i);
    return run_criteria(c, out, ids, "verify.csv");
}

int cmd_limits(const RunConfig& c, const Output& out)
{
    const int rc = run_criteria(c, out, {8}, "limits.csv");
    if (rc != exit_pass || !c.svg)
        return rc;
    const SpectrumData spec = make_spectrum(parse_spectrum(c.spectrum));
    std::vector<Series> curves;
    for (int id : {1, 3, 4}) {
        Series s{"case " + std::to_string(id), {}, {}};
        for (double T : c.T_list) {
            NeckConfig nc;
            nc.T = T;
            nc.k_minus = c.k_minus;
            nc.k_plus = c.k_plus;
            const NeckData nd(spec, nc);
            const SingularChart base = id == 1 ? SingularChart{0.6 / T, 0.0, 0.8 / T}
                                       : id == 3 ? SingularChart{0.6, 0.3, 1.0}
                                                 : SingularChart{0.0, 0.0, -0.8 * T};
            s.x.push_back(std::log10(T));
            s.y.push_back(std::log10(rescaled_limit_compare(nd, id, base).deviation));
        }
        curves.push_back(std::move(s));
    }
    out.svg("limits.svg", curves, "limit deviation", "log10 T", "log10 deviation");
    return rc;
}

int cmd_models(const RunConfig& c, const Output& out)
{
    const int rc = run_criteria(c, out, {9, 10}, "models.csv");
    CsvTable rescale = out.table({"a", "b", "defect"});
    const Eigen::Vector4d x(0.7, -0.3, 0.5, 0.9);
    for (const auto& [a, b] : {std::pair{1.0, 2.0}, std::pair{2.0, 0.5}, std::pair{3.0, 1.0}})
        rescale.add_row({fmt(a), fmt(b), fmt(taub_nut_rescale_defect(a, b, x))});
    out.csv("taub_nut_rescale.csv", rescale);
    CsvTable prof = out.table({"n", "z", "h", "chi", "x"});
    std::vector<Series> curves;
    for (double n : {1.0, 2.0}) {
        const CalabiDomain d = calabi_domain(n);
        Series s{"n=" + short_num(n), {}, {}};
        for (double t : linspace(0.05, 0.95, 91)) {
            const double z = d.lo * t;
            const CalabiProfile p = calabi_profile(n, z);
            prof.add_row({fmt(n), fmt(z), fmt(p.h), fmt(p.chi), fmt(p.x)});
            s.x.push_back(z);
            s.y.push_back(std::log10(p.h));
        }
        curves.push_back(std::move(s));
    }
    out.csv("calabi_profile.csv", prof);
    out.svg("calabi_profile.svg", curves, "Calabi profile", "z", "log10 h");
    return rc;
}

int cmd_err_scan(const RunConfig& c, const Output& out)
{
    CsvTable t = out.table({"T", "sup_err", "inner", "blend", "outer", "worst_zone"});
    std::vector<double> sup;
    Series s{"sup Err", {}, {}};
    const bool exact = c.profile.rfind("exact:", 0) == 0;
    ExactFamily fam;
    if (exact) {
        const std::vector<double> ac = parse_real_list(c.profile.substr(6));
        if (ac.size() != 2 || !(ac[1] > 0.0))
            throw UsageError("--profile exact:a,c needs c > 0");
        fam = {ac[0], ac[1]};
    } else if (c.profile != "neck") {
        throw UsageError("--profile must be neck or exact:a,c");
    }
    const SpectrumData spec = make_spectrum(parse_spectrum(c.spectrum));
    for (double T : c.T_list) {
        ErrReport e;
        if (exact) {
            std::vector<double> grid;
            for (double z : default_err_grid(T))
                if (fam.chi(z) > 0.05 * std::max(1.0, std::abs(fam.a)))
                    grid.push_back(z);
            e = einstein_error(exact_family_profile(fam), grid, [](double) { return Zone::inner; }, T);
        } else {
            NeckConfig nc;
            nc.T = T;
            nc.k_minus = c.k_minus;
            nc.k_plus = c.k_plus;
            nc.zero_mode_only = true;
            const NeckData nd(spec, nc);
            e = einstein_error_zero_mode(nd, default_err_grid(T));
        }
        sup.push_back(e.sup_err);
        t.add_row({fmt(T), fmt(e.sup_err), fmt(e.zones[0].sup_err), fmt(e.zones[1].sup_err), fmt(e.zones[2].sup_err),
                   to_string(e.worst_zone)});
        s.x.push_back(std::log10(T));
        s.y.push_back(std::log10(std::max(e.sup_err, 1e-300)));
    }
    int rc = exit_pass;
    const double floor = 1e-10;
    if (std::all_of(sup.begin(), sup.end(), [&](double v) { return v < floor; })) {
        t.add_comment("fit skipped: errors at the quadrature floor");
    } else {
        const OrderFit f = fit_order(c.T_list, sup, -1.0);
        const bool in_window = f.slope >= -1.3 && f.slope <= -0.7;
        t.add_comment("fitted exponent " + fmt(f.slope) + (in_window ? "" : " FLAG: not close to -1"));
        rc = in_window ? exit_pass : exit_fail;
        std::cout << "fitted exponent " << fmt(f.slope) << '\n';
    }
    out.csv("err_scan.csv", t);
    out.svg("err_scan.svg", {s}, "sup Err_KE", "log10 T", "log10 sup Err");
    return rc;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical checks for a collapsing Kahler-Einstein neck"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string config_path, out_dir, T_text, lambda_text, spectrum, profile;
    int k_minus = 0, k_plus = 0;
    std::uint64_t seed = 1;
    bool svg = true;
    std::map<std::string, CLI::Option*> given;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"modes", "mode profiles f_lambda and the sign and monotonicity summary"},
        {"assemble", "assembled neck data h, chi on a z-grid"},
        {"verify", "the full property suite, one report row per check"},
        {"limits", "rescaled limit comparisons, cases 1 to 4"},
        {"models", "Taub-NUT Ricci and rescaling checks, Calabi profile"},
        {"err-scan", "Einstein error sup over T with the fitted order"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "flat key=value file");
        given[name + "out"] = sub->add_option("--out", out_dir, "output directory");
        given[name + "T"] = sub->add_option("--T", T_text, "comma-separated T values");
        given[name + "lambda"] = sub->add_option("--lambda", lambda_text, "comma-separated eigenvalues");
        given[name + "spectrum"] = sub->add_option("--spectrum", spectrum, "torus:N or synthetic:count,seed");
        given[name + "profile"] = sub->add_option("--profile", profile, "neck or exact:a,c (err-scan)");
        given[name + "k_minus"] = sub->add_option("--k-minus", k_minus, "degree on the z < 0 end, >= 0");
        given[name + "k_plus"] = sub->add_option("--k-plus", k_plus, "degree on the z > 0 end, <= 0");
        given[name + "seed"] = sub->add_option("--seed", seed, "seed for synthetic spectra");
        given[name + "svg"] = sub->add_flag("--svg,!--no-svg", svg, "write SVG plots");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_pass : exit_usage;
    }
    for (const auto& [name, help] : commands)
        if (app.got_subcommand(name))
            cfg.command = name;

    const std::string& n = cfg.command;
    try {
        if (n == "modes")
            cfg.T_list = {10.0}, cfg.lambda_list = {0.0, 1.0, 3.0};
        else
            cfg.T_list = {25.0, 50.0, 100.0};
        if (!config_path.empty())
            for (const auto& [key, value] : parse_key_value(read_file(config_path)))
                apply_key(cfg, key, value);
        if (given[n + "out"]->count())
            cfg.output_dir = out_dir;
        if (given[n + "T"]->count())
            cfg.T_list = parse_real_list(T_text);
        if (given[n + "lambda"]->count())
            cfg.lambda_list = parse_real_list(lambda_text);
        if (given[n + "spectrum"]->count())
            cfg.spectrum = spectrum;
        if (given[n + "profile"]->count())
            cfg.profile = profile;
        if (given[n + "k_minus"]->count())
            cfg.k_minus = k_minus;
        if (given[n + "k_plus"]->count())
            cfg.k_plus = k_plus;
        if (given[n + "seed"]->count())
            cfg.seed = seed;
        if (given[n + "svg"]->count())
            cfg.svg = svg;
        validate(cfg);
    } catch (const UsageError& e) {
        std::cerr << n << ": usage: " << e.what() << '\n';
        return exit_usage;
    } catch (const ConfigError& e) {
        std::cerr << n << ": config: " << e.what() << '\n';
        return exit_usage;
    } catch (const ParameterError& e) {
        std::cerr << n << ": config: " << e.what() << '\n';
        return exit_usage;
    }

    const Output out(cfg);
    try {
        if (n == "modes")
            return cmd_modes(cfg, out);
        if (n == "assemble")
            return cmd_assemble(cfg, out);
        if (n == "verify")
            return cmd_verify(cfg, out);
        if (n == "limits")
            return cmd_limits(cfg, out);
        if (n == "models")
            return cmd_models(cfg, out);
        return cmd_err_scan(cfg, out);
    } catch (const UsageError& e) {
        std::cerr << n << ": usage: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << n << ": " << e.what() << '\n';
        return exit_fail;
    }
}
