#include "oqbm/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "oqbm/errors.hpp"

namespace oqbm {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct Entry {
    std::string value;
    int line = 0;
};

using Table = std::map<std::string, Entry>; // "section.key" -> value

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
    std::ostringstream msg;
    msg << "config '" << name << "' line " << line << ": " << what;
    throw config_error(msg.str());
}

double parse_double(const std::string& name, const Entry& e, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0')
        fail(name, e.line, "key '" + key + "' is not a number: '" + e.value + "'");
    return v;
}

long long parse_int(const std::string& name, const Entry& e, const std::string& key) {
    char* end = nullptr;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0')
        fail(name, e.line, "key '" + key + "' is not an integer: '" + e.value + "'");
    return v;
}

std::vector<double> parse_list(const std::string& name, const Entry& e, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(name, e.line, "key '" + key + "' has an empty list entry");
        char* end = nullptr;
        out.push_back(std::strtod(item.c_str(), &end));
        if (end == item.c_str() || *end != '\0')
            fail(name, e.line, "key '" + key + "' has a non-numeric entry: '" + item + "'");
    }
    if (out.empty()) fail(name, e.line, "key '" + key + "' is an empty list");
    return out;
}

const std::set<std::string> kKnown = {
    "coefficients.alpha_bar", "coefficients.beta_bar",  "coefficients.beta1",
    "coefficients.beta2",     "coefficients.beta3",     "coefficients.lambda1",
    "coefficients.lambda2",   "coefficients.lambda3",   "coefficients.gamma_omega",
    "initial.kind",           "initial.k",              "initial.theta",
    "initial.phi",            "grid.L",                 "grid.N",
    "grid.pde_dt",            "integrator.dt",          "integrator.t_final",
    "integrator.snapshot_times", "integrator.series_stride", "integrator.exec",
    "integrator.nmax",        "output.dir",             "elimination.alpha",
    "elimination.t_end",      "elimination.sample_times", "elimination.Np",
};

// Order used both for the first-missing-key report and serialization.
const char* kRequired[] = {
    "coefficients.alpha_bar", "coefficients.beta_bar", "coefficients.beta1",
    "coefficients.beta2",     "coefficients.beta3",    "coefficients.lambda1",
    "coefficients.lambda2",   "coefficients.lambda3",  "coefficients.gamma_omega",
    "initial.kind",           "initial.k",             "initial.theta",
    "initial.phi",            "integrator.t_final",
};

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& name) {
    Table tab;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::size_t hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(name, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "coefficients" && section != "initial" && section != "grid" &&
                section != "integrator" && section != "output" && section != "elimination")
                fail(name, lineno, "unknown section '" + section + "'");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(name, lineno, "expected 'key = value'");
        if (section.empty()) fail(name, lineno, "key outside any section");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!kKnown.count(key)) fail(name, lineno, "unknown key '" + key + "'");
        if (tab.count(key)) fail(name, lineno, "duplicate key '" + key + "'");
        if (value.empty()) fail(name, lineno, "key '" + key + "' has no value");
        tab[key] = {value, lineno};
    }

    for (const char* req : kRequired)
        if (!tab.count(req))
            throw config_error("config '" + name + "': missing required key '" + req + "'");

    RunConfig cfg;
    ScenarioConfig& sc = cfg.scenario;
    sc.name = name;
    auto num = [&](const char* key) { return parse_double(name, tab.at(key), key); };

    CoefficientSet& c = sc.coefficients;
    c.alpha_bar = num("coefficients.alpha_bar");
    c.beta_bar = num("coefficients.beta_bar");
    c.beta1 = num("coefficients.beta1");
    c.beta2 = num("coefficients.beta2");
    c.beta3 = num("coefficients.beta3");
    c.lambda1 = num("coefficients.lambda1");
    c.lambda2 = num("coefficients.lambda2");
    c.lambda3 = num("coefficients.lambda3");
    c.gamma_omega = num("coefficients.gamma_omega");

    {
        const Entry& e = tab.at("initial.kind");
        if (e.value == "single") sc.kind = ProfileKind::single;
        else if (e.value == "double") sc.kind = ProfileKind::double_center;
        else fail(name, e.line, "initial.kind must be 'single' or 'double'");
    }
    sc.k = num("initial.k");
    sc.state.theta = num("initial.theta");
    sc.state.phi = num("initial.phi");

    if (tab.count("grid.L") != tab.count("grid.N")) {
        const char* key = tab.count("grid.L") ? "grid.L" : "grid.N";
        fail(name, tab.at(key).line, "grid section needs both L and N");
    }
    if (tab.count("grid.L")) {
        cfg.has_grid = true;
        sc.L = num("grid.L");
        const long long n = parse_int(name, tab.at("grid.N"), "grid.N");
        if (n < 16) fail(name, tab.at("grid.N").line, "grid.N must be at least 16");
        sc.N = static_cast<std::size_t>(n);
    }
    if (tab.count("grid.pde_dt")) cfg.pde_dt = num("grid.pde_dt");

    IntegratorConfig& ic = sc.integrator;
    if (tab.count("integrator.dt")) ic.dt = num("integrator.dt");
    ic.t_final = num("integrator.t_final");
    if (tab.count("integrator.snapshot_times"))
        ic.snapshot_times = parse_list(name, tab.at("integrator.snapshot_times"),
                                       "integrator.snapshot_times");
    if (tab.count("integrator.series_stride")) {
        const Entry& e = tab.at("integrator.series_stride");
        const long long v = parse_int(name, e, "integrator.series_stride");
        if (v < 1) fail(name, e.line, "integrator.series_stride must be >= 1");
        ic.series_stride = static_cast<std::size_t>(v);
    }
    if (tab.count("integrator.exec")) {
        const Entry& e = tab.at("integrator.exec");
        if (e.value == "serial") ic.parallel = false;
        else if (e.value == "parallel") ic.parallel = true;
        else fail(name, e.line, "integrator.exec must be 'serial' or 'parallel'");
    }
    if (tab.count("integrator.nmax")) {
        const Entry& e = tab.at("integrator.nmax");
        const long long v = parse_int(name, e, "integrator.nmax");
        if (v < 2) fail(name, e.line, "integrator.nmax must be >= 2");
        cfg.nmax = static_cast<int>(v);
    }

    if (tab.count("output.dir")) sc.out_dir = tab.at("output.dir").value;

    if (tab.count("elimination.alpha")) {
        cfg.has_elimination = true;
        cfg.elim_alpha = num("elimination.alpha");
        if (tab.count("elimination.t_end")) cfg.elim_t_end = num("elimination.t_end");
        if (tab.count("elimination.sample_times"))
            cfg.elim_samples = parse_list(name, tab.at("elimination.sample_times"),
                                          "elimination.sample_times");
        if (tab.count("elimination.Np")) {
            const Entry& e = tab.at("elimination.Np");
            const long long v = parse_int(name, e, "elimination.Np");
            if (v < 16) fail(name, e.line, "elimination.Np must be at least 16");
            cfg.elim_np = static_cast<std::size_t>(v);
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string stem = path;
    const std::size_t slash = stem.find_last_of("/\\");
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const std::size_t dot = stem.find_last_of('.');
    if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    return parse_config_text(buf.str(), stem);
}

namespace {

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join_g17(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += g17(v[i]);
    }
    return out;
}

} // namespace

std::string serialize_config(const RunConfig& cfg) {
    const ScenarioConfig& sc = cfg.scenario;
    const CoefficientSet& c = sc.coefficients;
    std::ostringstream out;
    out << "[coefficients]\n";
    out << "alpha_bar = " << g17(c.alpha_bar) << "\n";
    out << "beta_bar = " << g17(c.beta_bar) << "\n";
    out << "beta1 = " << g17(c.beta1) << "\n";
    out << "beta2 = " << g17(c.beta2) << "\n";
    out << "beta3 = " << g17(c.beta3) << "\n";
    out << "lambda1 = " << g17(c.lambda1) << "\n";
    out << "lambda2 = " << g17(c.lambda2) << "\n";
    out << "lambda3 = " << g17(c.lambda3) << "\n";
    out << "gamma_omega = " << g17(c.gamma_omega) << "\n";
    out << "[initial]\n";
    out << "kind = " << (sc.kind == ProfileKind::single ? "single" : "double") << "\n";
    out << "k = " << g17(sc.k) << "\n";
    out << "theta = " << g17(sc.state.theta) << "\n";
    out << "phi = " << g17(sc.state.phi) << "\n";
    if (cfg.has_grid) {
        out << "[grid]\n";
        out << "L = " << g17(sc.L) << "\n";
        out << "N = " << sc.N << "\n";
        if (cfg.pde_dt != 0.0) out << "pde_dt = " << g17(cfg.pde_dt) << "\n";
    }
    out << "[integrator]\n";
    if (sc.integrator.dt != 0.0) out << "dt = " << g17(sc.integrator.dt) << "\n";
    out << "t_final = " << g17(sc.integrator.t_final) << "\n";
    out << "snapshot_times = " << join_g17(sc.integrator.snapshot_times) << "\n";
    out << "series_stride = " << sc.integrator.series_stride << "\n";
    out << "exec = " << (sc.integrator.parallel ? "parallel" : "serial") << "\n";
    out << "nmax = " << cfg.nmax << "\n";
    if (!sc.out_dir.empty()) {
        out << "[output]\n";
        out << "dir = " << sc.out_dir << "\n";
    }
    if (cfg.has_elimination) {
        out << "[elimination]\n";
        out << "alpha = " << g17(cfg.elim_alpha) << "\n";
        out << "t_end = " << g17(cfg.elim_t_end) << "\n";
        out << "sample_times = " << join_g17(cfg.elim_samples) << "\n";
        out << "Np = " << cfg.elim_np << "\n";
    }
    return out.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string s = serialize_config(cfg);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace oqbm
