#include "mmcomp/cli.hpp"

#include "mmcomp/analytic.hpp"
#include "mmcomp/errors.hpp"
#include "mmcomp/scenario_file.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mmcomp {

namespace {

std::string num(double v, const char* format = "%.6f")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

struct Options {
    std::string scenario;
    std::optional<int> n;
    std::optional<int> nt;
    std::string format = "csv";
    std::string output;
    std::optional<long> realizations;
    std::optional<std::uint64_t> seed;
    std::string window;
    int jobs = 0;
    bool no_interference = false;
    std::string laplace = "exact";
    int cells = 1024;
    bool with_mc = false;
};

LaplaceMode parse_mode(const std::string& s)
{
    if (s == "exact") return LaplaceMode::Exact;
    if (s == "flat-top") return LaplaceMode::FlatTop;
    throw ValidationError("--laplace must be exact or flat-top");
}

ScenarioFile load(const Options& o)
{
    if (o.scenario.empty()) throw ValidationError("--scenario is required");
    ScenarioFile f = load_scenario(o.scenario);
    if (o.n) f.scenario.coop_n = *o.n;
    if (o.nt) f.scenario.array.n_antennas = *o.nt;
    if (o.realizations) f.sim.realizations = *o.realizations;
    if (o.seed) f.sim.seed = *o.seed;
    if (!o.window.empty()) {
        if (o.window == "auto") {
            f.sim.window_radius = 0.0;
        } else {
            char* end = nullptr;
            const double w = std::strtod(o.window.c_str(), &end);
            if (end == o.window.c_str() || *end != '\0' || !(w > 0.0))
                throw ValidationError("--window must be auto or a positive radius in meters");
            f.sim.window_radius = w;
        }
    }
    f.sim.jobs = o.jobs;
    f.sim.interference = !o.no_interference;
    f.scenario.validate();
    f.sim.validate();
    return f;
}

std::vector<ResultRow> analytic_rows(const Scenario& sc, const std::vector<double>& thresholds,
                                     const Options& o, AnalyticDiagnostics* diag)
{
    const Theorem th = select_theorem(sc, !o.no_interference);
    CoverageOptions opt;
    opt.mode = parse_mode(o.laplace);
    opt.interference = !o.no_interference;
    const auto p = analytic_curve(sc, th, thresholds, opt, o.jobs > 0 ? o.jobs : default_jobs(), diag);
    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        ResultRow r;
        r.threshold_db = thresholds[i];
        r.coverage = p[i];
        r.method = to_string(th);
        r.scenario_id = sc.id;
        r.n = sc.coop_n;
        r.nt = sc.array.n_antennas;
        rows.push_back(r);
    }
    return rows;
}

void report_diagnostics(std::ostream& err, const AnalyticDiagnostics& d)
{
    if (d.inversions == 0) return;
    err << "inversions: " << d.inversions << ", clamped: " << d.clamped
        << ", max excursion: " << num(d.max_excursion, "%.3g") << "\n";
}

void emit(const Options& o, std::ostream& out, const std::vector<ResultRow>& rows)
{
    std::ofstream file;
    std::ostream* dst = &out;
    if (!o.output.empty()) {
        file.open(o.output);
        if (!file) throw ValidationError(o.output + ": cannot open for writing");
        dst = &file;
    }
    if (o.format == "json")
        write_json(*dst, rows);
    else
        write_csv(*dst, rows);
}

int cmd_analytic(const Options& o, std::ostream& out, std::ostream& err)
{
    const ScenarioFile f = load(o);
    AnalyticDiagnostics diag;
    const auto rows = analytic_rows(f.scenario, f.thresholds.values(), o, &diag);
    report_diagnostics(err, diag);
    emit(o, out, rows);
    return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err)
{
    const ScenarioFile f = load(o);
    const auto curve = estimate_coverage(f.scenario, f.thresholds.values(), f.sim);
    err << "realizations: " << curve.realizations << ", window: " << num(curve.window_radius, "%.1f")
        << " m, resampled: " << curve.resampled << "\n";
    emit(o, out, mc_rows(curve, f.scenario));
    return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err)
{
    const ScenarioFile f = load(o);
    const auto thresholds = f.thresholds.values();
    AnalyticDiagnostics diag;
    auto rows = analytic_rows(f.scenario, thresholds, o, &diag);
    report_diagnostics(err, diag);
    const auto curve = estimate_coverage(f.scenario, thresholds, f.sim);
    const bool one_sided = upper_bound_only(f.scenario);
    std::vector<double> analytic;
    for (const auto& r : rows) analytic.push_back(r.coverage);
    const auto gate = compare_gate(analytic, curve, one_sided);

    err << "threshold_db,analytic,mc,delta,allowed,status\n";
    bool pass = true;
    for (const auto& g : gate) {
        err << num(g.threshold_db, "%g") << "," << num(g.analytic) << "," << num(g.empirical) << ","
            << num(g.analytic - g.empirical, "%+.6f") << "," << num(g.allowed) << ","
            << (g.pass ? "ok" : "FAIL") << "\n";
        pass = pass && g.pass;
    }
    err << "gate (" << (one_sided ? "one-sided" : "two-sided") << "): " << (pass ? "PASS" : "FAIL")
        << "\n";

    const auto mc = mc_rows(curve, f.scenario);
    rows.insert(rows.end(), mc.begin(), mc.end());
    emit(o, out, rows);
    return pass ? kExitOk : kExitGate;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err)
{
    const ScenarioFile f = load(o);
    if (!f.sweep) throw ValidationError(o.scenario + ": no [sweep] section");
    const auto thresholds = f.thresholds.values();
    std::vector<ResultRow> rows;
    for (double v : f.sweep->values) {
        const Scenario sc = apply_sweep(f.scenario, f.sweep->param, v);
        err << f.sweep->param << " = " << num(v, "%g") << "\n";
        AnalyticDiagnostics diag;
        const auto a = analytic_rows(sc, thresholds, o, &diag);
        report_diagnostics(err, diag);
        rows.insert(rows.end(), a.begin(), a.end());
        if (o.with_mc) {
            const auto mc = mc_rows(estimate_coverage(sc, thresholds, f.sim), sc);
            rows.insert(rows.end(), mc.begin(), mc.end());
        }
    }
    emit(o, out, rows);
    return kExitOk;
}

int cmd_density(const Options& o, std::ostream& out)
{
    if (o.cells < 16) throw ValidationError("--cells must be at least 16");
    const UpsilonTable table = f_upsilon_table(o.cells);
    std::ofstream file;
    std::ostream* dst = &out;
    if (!o.output.empty()) {
        file.open(o.output);
        if (!file) throw ValidationError(o.output + ": cannot open for writing");
        dst = &file;
    }
    if (o.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        double cdf = 0.0;
        for (int i = 0; i < table.cells(); ++i) {
            cdf += table.mass(i);
            arr.push_back({{"upsilon", table.cell_center(i)}, {"density", table.density(i)}, {"cdf", cdf}});
        }
        *dst << arr.dump(2) << "\n";
        return kExitOk;
    }
    *dst << "upsilon,density,cdf\n";
    double cdf = 0.0;
    for (int i = 0; i < table.cells(); ++i) {
        cdf += table.mass(i);
        *dst << num(table.cell_center(i), "%.8f") << "," << num(table.density(i), "%.8e") << ","
             << num(cdf, "%.10f") << "\n";
    }
    return kExitOk;
}

} // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows)
{
    out << kCsvHeader << "\n";
    for (const auto& r : rows) {
        out << num(r.threshold_db, "%g") << "," << num(r.coverage) << ","
            << (r.ci_low ? num(*r.ci_low) : "") << "," << (r.ci_high ? num(*r.ci_high) : "") << ","
            << r.method << "," << r.scenario_id << "," << r.n << "," << r.nt << "\n";
    }
}

void write_json(std::ostream& out, const std::vector<ResultRow>& rows)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j;
        j["threshold_db"] = r.threshold_db;
        j["coverage"] = r.coverage;
        j["ci_low"] = r.ci_low ? nlohmann::json(*r.ci_low) : nlohmann::json(nullptr);
        j["ci_high"] = r.ci_high ? nlohmann::json(*r.ci_high) : nlohmann::json(nullptr);
        j["method"] = r.method;
        j["scenario_id"] = r.scenario_id;
        j["n"] = r.n;
        j["nt"] = r.nt;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << "\n";
}

std::vector<ResultRow> mc_rows(const CoverageCurve& curve, const Scenario& scenario)
{
    std::vector<ResultRow> rows;
    for (const auto& e : curve.entries) {
        ResultRow r;
        r.threshold_db = e.threshold_db;
        r.coverage = e.coverage;
        if (e.ci_halfwidth) {
            r.ci_low = std::max(0.0, e.coverage - *e.ci_halfwidth);
            r.ci_high = std::min(1.0, e.coverage + *e.ci_halfwidth);
        }
        r.method = "mc";
        r.scenario_id = scenario.id;
        r.n = scenario.coop_n;
        r.nt = scenario.array.n_antennas;
        rows.push_back(r);
    }
    return rows;
}

std::vector<GateLine> compare_gate(const std::vector<double>& analytic, const CoverageCurve& mc,
                                   bool one_sided)
{
    if (analytic.size() != mc.entries.size())
        throw DomainError("compare_gate: curves have different lengths");
    std::vector<GateLine> out;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const auto& e = mc.entries[i];
        const double hw = e.ci_halfwidth.value_or(0.0);
        GateLine g;
        g.threshold_db = e.threshold_db;
        g.analytic = analytic[i];
        g.empirical = e.coverage;
        if (one_sided) {
            g.allowed = 3.0 * hw / 1.96;
            g.pass = g.analytic >= g.empirical - g.allowed;
        } else {
            g.allowed = std::max(0.02, 3.0 * hw);
            g.pass = std::abs(g.analytic - g.empirical) <= g.allowed;
        }
        out.push_back(g);
    }
    return out;
}

bool upper_bound_only(const Scenario& scenario)
{
    return scenario.fading.kind() == FadingModel::Kind::Nakagami && scenario.coop_n >= 2;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Coverage of cooperative mmWave networks: analytic theorems and Monte Carlo"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool sim) {
        sub->add_option("--scenario", o.scenario, "scenario file")->required();
        sub->add_option("--n", o.n, "cooperating set size (overrides coop_n)")->check(CLI::PositiveNumber);
        sub->add_option("--nt", o.nt, "antenna count (overrides [array] nt)")->check(CLI::PositiveNumber);
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output", o.output, "write data here instead of standard output");
        sub->add_option("--jobs", o.jobs, "worker threads (default: MMCOMP_JOBS or all cores)")
            ->check(CLI::NonNegativeNumber);
        sub->add_flag("--no-interference", o.no_interference, "SNR coverage (Nakagami: corollary 1)");
        sub->add_option("--laplace", o.laplace, "gain law in the interference transform")
            ->check(CLI::IsMember({"exact", "flat-top"}));
        if (sim) {
            sub->add_option("--realizations", o.realizations, "Monte Carlo realizations")
                ->check(CLI::PositiveNumber);
            sub->add_option("--seed", o.seed, "Monte Carlo seed");
            sub->add_option("--window", o.window, "simulation window radius in meters, or auto");
        }
    };

    auto* analytic = app.add_subcommand("analytic", "evaluate the theorem selected by the fading model");
    add_common(analytic, false);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage");
    add_common(simulate, true);
    auto* compare = app.add_subcommand("compare", "analytic and Monte Carlo with the agreement gate");
    add_common(compare, true);
    auto* sweep = app.add_subcommand("sweep", "one analytic curve per value of the [sweep] parameter");
    add_common(sweep, true);
    sweep->add_flag("--mc", o.with_mc, "add a Monte Carlo curve per value");
    auto* density = app.add_subcommand("density", "dump the f_upsilon table");
    density->add_option("--cells", o.cells, "table cells on [-2, 2]");
    density->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    density->add_option("--output", o.output, "write data here instead of standard output");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg, help;
        const int code = app.exit(e, help, msg);
        out << help.str();
        err << msg.str();
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*analytic) return cmd_analytic(o, out, err);
        if (*simulate) return cmd_simulate(o, out, err);
        if (*compare) return cmd_compare(o, out, err);
        if (*sweep) return cmd_sweep(o, out, err);
        if (*density) return cmd_density(o, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const UnsupportedError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

} // namespace mmcomp
