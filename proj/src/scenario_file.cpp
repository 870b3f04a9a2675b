#include "mmcomp/scenario_file.hpp"

#include "mmcomp/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace mmcomp {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

struct Entry {
    std::string value;
    int line;
};

// One [section] occurrence.
struct Section {
    std::string name;
    int line = 0;
    std::map<std::string, Entry> keys;
};

class Parser {
public:
    Parser(const std::string& name) : name_(name) {}

    [[noreturn]] void fail(int line, const std::string& msg) const
    {
        throw ValidationError(name_ + ":" + std::to_string(line) + ": " + msg);
    }

    double number(const Entry& e, const std::string& key) const
    {
        double v = 0.0;
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        const auto r = std::from_chars(first, last, v);
        if (r.ec != std::errc() || r.ptr != last || !std::isfinite(v))
            fail(e.line, key + ": expected a number, got '" + e.value + "'");
        return v;
    }

    long integer(const Entry& e, const std::string& key) const
    {
        const double v = number(e, key);
        if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(e.line, key + ": expected an integer");
        return static_cast<long>(v);
    }

    std::uint64_t unsigned_integer(const Entry& e, const std::string& key) const
    {
        std::uint64_t v = 0;
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        const auto r = std::from_chars(first, last, v);
        if (r.ec != std::errc() || r.ptr != last)
            fail(e.line, key + ": expected an unsigned integer, got '" + e.value + "'");
        return v;
    }

    const Entry* find(const Section& s, const std::string& key) const
    {
        const auto it = s.keys.find(key);
        return it == s.keys.end() ? nullptr : &it->second;
    }

    const Entry& require(const Section& s, const std::string& key) const
    {
        if (const Entry* e = find(s, key)) return *e;
        fail(s.line, "[" + s.name + "] is missing '" + key + "'");
    }

    void allow_only(const Section& s, std::initializer_list<const char*> keys) const
    {
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, e] : s.keys)
            if (!ok.count(k)) fail(e.line, "unknown key '" + k + "' in [" + s.name + "]");
    }

private:
    std::string name_;
};

const std::set<std::string> kSections = {"", "tier", "pathloss", "array", "noise",
                                         "fading", "thresholds_db", "sim", "sweep"};

} // namespace

std::vector<double> ThresholdGrid::values() const
{
    std::vector<double> out;
    const long count = static_cast<long>(std::floor((stop_db - start_db) / step_db + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(start_db + static_cast<double>(i) * step_db);
    return out;
}

ScenarioFile parse_scenario(const std::string& text, const std::string& name)
{
    Parser p(name);
    std::vector<Section> sections(1); // index 0 holds the top-level keys
    sections[0].line = 1;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail(line_no, "malformed section header");
            const std::string sec = trim(line.substr(1, line.size() - 2));
            if (sec.empty() || !kSections.count(sec)) p.fail(line_no, "unknown section [" + sec + "]");
            if (sec != "tier")
                for (const auto& s : sections)
                    if (s.name == sec) p.fail(line_no, "duplicate section [" + sec + "]");
            sections.push_back({sec, line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) p.fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) p.fail(line_no, "empty key");
        if (value.empty()) p.fail(line_no, "empty value for '" + key + "'");
        auto& keys = sections.back().keys;
        if (keys.count(key)) p.fail(line_no, "duplicate key '" + key + "'");
        keys[key] = {value, line_no};
    }

    ScenarioFile out;
    Scenario& sc = out.scenario;
    sc.tiers.clear();
    std::map<std::string, int> section_line;
    std::vector<int> tier_lines;
    bool have_pathloss = false, have_array = false, have_noise = false;

    for (const Section& s : sections) {
        section_line.emplace(s.name, s.line);
        if (s.name.empty()) {
            p.allow_only(s, {"id", "coop_n"});
            if (const Entry* e = p.find(s, "id")) sc.id = e->value;
            if (const Entry* e = p.find(s, "coop_n")) {
                sc.coop_n = static_cast<int>(p.integer(*e, "coop_n"));
                if (sc.coop_n < 1) p.fail(e->line, "coop_n must be >= 1");
            }
        } else if (s.name == "tier") {
            p.allow_only(s, {"density_radius_m", "density_per_m2", "power_w", "blockage_per_m"});
            TierConfig t;
            const Entry* radius = p.find(s, "density_radius_m");
            const Entry* density = p.find(s, "density_per_m2");
            if ((radius != nullptr) == (density != nullptr))
                p.fail(s.line, "[tier] needs exactly one of density_radius_m, density_per_m2");
            double r = 0.0;
            if (radius) {
                r = p.number(*radius, "density_radius_m");
                if (!(r > 0.0)) p.fail(radius->line, "density_radius_m must be > 0");
                t.density = TierConfig::density_from_radius(r);
            } else {
                t.density = p.number(*density, "density_per_m2");
            }
            t.power = p.number(p.require(s, "power_w"), "power_w");
            if (const Entry* e = p.find(s, "blockage_per_m")) t.blockage = p.number(*e, "blockage_per_m");
            sc.tiers.push_back(t);
            out.tier_radius.push_back(r);
            tier_lines.push_back(s.line);
        } else if (s.name == "pathloss") {
            have_pathloss = true;
            const Entry& mode = p.require(s, "mode");
            if (mode.value == "uniform") {
                p.allow_only(s, {"mode", "alpha"});
                sc.pathloss = PathlossConfig::uniform(p.number(p.require(s, "alpha"), "alpha"));
            } else if (mode.value == "los_nlos") {
                p.allow_only(s, {"mode", "alpha1", "alpha2"});
                sc.pathloss = PathlossConfig::los_nlos(p.number(p.require(s, "alpha1"), "alpha1"),
                                                       p.number(p.require(s, "alpha2"), "alpha2"));
            } else {
                p.fail(mode.line, "pathloss mode must be 'uniform' or 'los_nlos'");
            }
        } else if (s.name == "array") {
            have_array = true;
            p.allow_only(s, {"nt", "spacing"});
            sc.array.n_antennas = static_cast<int>(p.integer(p.require(s, "nt"), "nt"));
            if (const Entry* e = p.find(s, "spacing")) sc.array.spacing = p.number(*e, "spacing");
        } else if (s.name == "noise") {
            have_noise = true;
            p.allow_only(s, {"bandwidth_hz", "nf_db"});
            sc.noise.bandwidth_hz = p.number(p.require(s, "bandwidth_hz"), "bandwidth_hz");
            sc.noise.noise_figure_db = p.number(p.require(s, "nf_db"), "nf_db");
        } else if (s.name == "fading") {
            p.allow_only(s, {"model", "m"});
            const Entry& model = p.require(s, "model");
            const Entry* m = p.find(s, "m");
            if (model.value == "nakagami") {
                const long shape = p.integer(p.require(s, "m"), "m");
                if (shape < 1) p.fail(m->line, "Nakagami m must be a positive integer");
                sc.fading = FadingModel::nakagami(static_cast<int>(shape));
            } else if (model.value == "rayleigh" || model.value == "none") {
                if (m) p.fail(m->line, "'m' applies only to the nakagami model");
                sc.fading = model.value == "rayleigh" ? FadingModel::rayleigh() : FadingModel::no_fading();
            } else {
                p.fail(model.line, "fading model must be 'rayleigh', 'nakagami' or 'none'");
            }
        } else if (s.name == "thresholds_db") {
            p.allow_only(s, {"start", "stop", "step"});
            auto& g = out.thresholds;
            g.start_db = p.number(p.require(s, "start"), "start");
            g.stop_db = p.number(p.require(s, "stop"), "stop");
            g.step_db = p.number(p.require(s, "step"), "step");
            if (!(g.step_db > 0.0)) p.fail(p.require(s, "step").line, "step must be > 0");
            if (g.stop_db < g.start_db) p.fail(p.require(s, "stop").line, "stop must be >= start");
        } else if (s.name == "sim") {
            p.allow_only(s, {"realizations", "seed", "window"});
            if (const Entry* e = p.find(s, "realizations")) {
                out.sim.realizations = p.integer(*e, "realizations");
                if (out.sim.realizations < 1) p.fail(e->line, "realizations must be >= 1");
            }
            if (const Entry* e = p.find(s, "seed")) out.sim.seed = p.unsigned_integer(*e, "seed");
            if (const Entry* e = p.find(s, "window")) {
                if (e->value == "auto") {
                    out.sim.window_radius = 0.0;
                } else {
                    out.sim.window_radius = p.number(*e, "window");
                    if (!(out.sim.window_radius > 0.0)) p.fail(e->line, "window must be > 0 or 'auto'");
                }
            }
        } else if (s.name == "sweep") {
            p.allow_only(s, {"param", "values"});
            SweepSpec sw;
            const Entry& param = p.require(s, "param");
            sw.param = param.value;
            if (sw.param != "nt" && sw.param != "n" && sw.param != "beta" && sw.param != "m"
                && sw.param != "power")
                p.fail(param.line, "sweep param must be one of nt, n, beta, m, power");
            const Entry& values = p.require(s, "values");
            std::stringstream ss(values.value);
            std::string item;
            while (std::getline(ss, item, ','))
                sw.values.push_back(p.number({trim(item), values.line}, "values"));
            if (sw.values.empty()) p.fail(values.line, "sweep needs at least one value");
            out.sweep = sw;
        }
    }
    if (sc.tiers.empty()) p.fail(line_no > 0 ? line_no : 1, "at least one [tier] section is required");
    if (!have_pathloss) p.fail(1, "missing [pathloss] section");
    if (!have_array) p.fail(1, "missing [array] section");
    if (!have_noise) p.fail(1, "missing [noise] section");

    try {
        sc.validate();
        if (out.sweep) {
            for (double v : out.sweep->values) apply_sweep(sc, out.sweep->param, v).validate();
        }
    } catch (const ValidationError& e) {
        // Anchor the semantic error at the section it names.
        const std::string msg = e.what();
        int line = 1;
        if (msg.rfind("tier ", 0) == 0) {
            const std::size_t k = std::strtoul(msg.c_str() + 5, nullptr, 10);
            if (k >= 1 && k <= tier_lines.size()) line = tier_lines[k - 1];
        } else {
            const std::string head = msg.substr(0, msg.find(':'));
            const std::string sec = head == "scenario" ? "" : head;
            if (section_line.count(sec)) line = section_line[sec];
            if (head == "sweep" || msg.find("sweep") != std::string::npos) line = section_line["sweep"];
        }
        p.fail(line, msg);
    }
    return out;
}

ScenarioFile load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open scenario file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

std::string to_text(const ScenarioFile& f)
{
    const Scenario& sc = f.scenario;
    std::ostringstream o;
    o << "id = " << sc.id << "\n";
    o << "coop_n = " << sc.coop_n << "\n";
    for (std::size_t k = 0; k < sc.tiers.size(); ++k) {
        const auto& t = sc.tiers[k];
        o << "\n[tier]\n";
        if (k < f.tier_radius.size() && f.tier_radius[k] > 0.0)
            o << "density_radius_m = " << fmt(f.tier_radius[k]) << "\n";
        else
            o << "density_per_m2 = " << fmt(t.density) << "\n";
        o << "power_w = " << fmt(t.power) << "\n";
        o << "blockage_per_m = " << fmt(t.blockage) << "\n";
    }
    o << "\n[pathloss]\n";
    if (sc.pathloss.mode == PathlossConfig::Mode::Uniform) {
        o << "mode = uniform\nalpha = " << fmt(sc.pathloss.alpha_los) << "\n";
    } else {
        o << "mode = los_nlos\nalpha1 = " << fmt(sc.pathloss.alpha_los)
          << "\nalpha2 = " << fmt(sc.pathloss.alpha_nlos) << "\n";
    }
    o << "\n[array]\nnt = " << sc.array.n_antennas << "\nspacing = " << fmt(sc.array.spacing) << "\n";
    o << "\n[noise]\nbandwidth_hz = " << fmt(sc.noise.bandwidth_hz)
      << "\nnf_db = " << fmt(sc.noise.noise_figure_db) << "\n";
    o << "\n[fading]\nmodel = " << to_string(sc.fading.kind()) << "\n";
    if (sc.fading.kind() == FadingModel::Kind::Nakagami) o << "m = " << sc.fading.shape() << "\n";
    o << "\n[thresholds_db]\nstart = " << fmt(f.thresholds.start_db) << "\nstop = "
      << fmt(f.thresholds.stop_db) << "\nstep = " << fmt(f.thresholds.step_db) << "\n";
    o << "\n[sim]\nrealizations = " << f.sim.realizations << "\nseed = " << f.sim.seed << "\nwindow = ";
    if (f.sim.window_radius > 0.0)
        o << fmt(f.sim.window_radius) << "\n";
    else
        o << "auto\n";
    if (f.sweep) {
        o << "\n[sweep]\nparam = " << f.sweep->param << "\nvalues = ";
        for (std::size_t i = 0; i < f.sweep->values.size(); ++i)
            o << (i ? ", " : "") << fmt(f.sweep->values[i]);
        o << "\n";
    }
    return o.str();
}

Scenario apply_sweep(const Scenario& base, const std::string& param, double value)
{
    Scenario s = base;
    auto as_int = [&](const char* what) {
        if (value != std::floor(value) || value < 1.0 || value > 1e6)
            throw ValidationError(std::string("sweep: ") + what + " must be a positive integer");
        return static_cast<int>(value);
    };
    if (param == "nt") {
        s.array.n_antennas = as_int("nt");
    } else if (param == "n") {
        s.coop_n = as_int("n");
    } else if (param == "beta") {
        for (auto& t : s.tiers) t.blockage = value;
    } else if (param == "m") {
        s.fading = FadingModel::nakagami(as_int("m"));
    } else if (param == "power") {
        for (auto& t : s.tiers) t.power = value;
    } else {
        throw ValidationError("sweep: unknown parameter '" + param + "'");
    }
    return s;
}

} // namespace mmcomp
