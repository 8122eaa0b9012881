// scenario.cpp — INI scenario parsing and the CLI drivers

#include "datransfer/scenario.hpp"
#include "datransfer/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace datransfer {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

const std::map<std::string, std::set<std::string>> kSchema = {
    {"system", {"E_D", "E_A", "N_D", "N_A", "V", "g_D", "g_A", "lambda", "beta", "weak_coupling_threshold"}},
    {"spectral", {"family", "eta", "omega_c", "s", "ir_cutoff", "table", "panels", "tolerance"}},
    {"initial", {"kind", "p", "file"}},
    {"time", {"t_max", "points", "spacing", "t_min"}},
    {"output", {"elements"}},
    {"sweep", {"axis", "values", "start", "stop", "count"}},
    {"validate", {"unitary_tolerance", "random_cases", "rate_tolerance"}},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Line number of "key" inside "[section]", or 0.
int find_line(const std::string& text, const std::string& section, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    std::string current;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            current = trim(t.substr(1, t.size() - 2));
            if (key.empty() && current == section) return n;
            continue;
        }
        const auto eq = t.find('=');
        if (eq != std::string::npos && current == section && trim(t.substr(0, eq)) == key) return n;
    }
    return 0;
}

class Reader {
public:
    Reader(const pt::ptree& tree, const std::string& text) : tree_(tree), text_(text) {}

    [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& what) const {
        throw ConfigError(sec + (key.empty() ? "" : "." + key), what, find_line(text_, sec, key));
    }

    std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
        const auto s = tree_.get_child_optional(sec);
        if (!s) return std::nullopt;
        const auto v = s->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return strip_comment(*v);
    }

    bool has_section(const std::string& sec) const { return tree_.get_child_optional(sec).has_value(); }

    double num(const std::string& sec, const std::string& key, double def) const {
        const auto r = raw(sec, key);
        return r ? parse_double(sec, key, *r) : def;
    }

    std::optional<double> opt_num(const std::string& sec, const std::string& key) const {
        const auto r = raw(sec, key);
        if (!r) return std::nullopt;
        return parse_double(sec, key, *r);
    }

    int integer(const std::string& sec, const std::string& key, int def) const {
        const auto r = raw(sec, key);
        if (!r) return def;
        return parse_int(sec, key, *r);
    }

    std::string str(const std::string& sec, const std::string& key, const std::string& def) const {
        const auto r = raw(sec, key);
        return r ? *r : def;
    }

    std::vector<double> list(const std::string& sec, const std::string& key) const {
        std::vector<double> out;
        const auto r = raw(sec, key);
        if (!r) return out;
        std::stringstream ss(*r);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail(sec, key, "empty list entry");
            out.push_back(parse_double(sec, key, item));
        }
        return out;
    }

    double parse_double(const std::string& sec, const std::string& key, const std::string& s) const {
        const std::string t = trim(s);
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (t.empty() || end != t.c_str() + t.size() || std::isnan(v)) {
            fail(sec, key, "expected a number, got '" + t + "'");
        }
        return v;
    }

    int parse_int(const std::string& sec, const std::string& key, const std::string& s) const {
        const std::string t = trim(s);
        char* end = nullptr;
        const long v = std::strtol(t.c_str(), &end, 10);
        if (t.empty() || end != t.c_str() + t.size()) fail(sec, key, "expected an integer, got '" + t + "'");
        return static_cast<int>(v);
    }

private:
    static std::string strip_comment(const std::string& v) {
        const auto p = v.find_first_of(";#");
        return trim(p == std::string::npos ? v : v.substr(0, p));
    }

    const pt::ptree& tree_;
    const std::string& text_;
};

Eigen::VectorXcd label_vector(const std::string& label, const ProjectionSet& P, int nd, int na) {
    const int n = nd + na;
    if (label == "D") return P.donor_uniform;
    if (label == "A") return P.acceptor_uniform;
    if (label == "phi1") return P.phi[0];
    if (label == "phi2") return P.phi[1];
    if (label.size() >= 2 && (label[0] == 'D' || label[0] == 'A')) {
        const int k = std::stoi(label.substr(1));
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
        if (label[0] == 'D' && k >= 1 && k <= nd) v(k - 1) = 1.0;
        else if (label[0] == 'A' && k >= 1 && k <= na) v(nd + k - 1) = 1.0;
        else throw IndexOutOfRange("element label '" + label + "' out of range");
        return v;
    }
    throw IndexOutOfRange("unknown element label '" + label + "'");
}

bool valid_label(const std::string& label, int nd, int na) {
    if (label == "D" || label == "A" || label == "phi1" || label == "phi2") return true;
    if (label.size() < 2 || (label[0] != 'D' && label[0] != 'A')) return false;
    if (!std::all_of(label.begin() + 1, label.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        return false;
    }
    const int k = std::stoi(label.substr(1));
    return k >= 1 && k <= (label[0] == 'D' ? nd : na);
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

json double_or_string(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return nullptr;
    return x;
}

json params_json(const SystemParams& p) {
    return {{"E_D", p.E_D}, {"E_A", p.E_A}, {"N_D", p.N_D}, {"N_A", p.N_A}, {"V", p.V}, {"g_D", p.g_D},
            {"g_A", p.g_A}, {"lambda", p.lambda}, {"beta", double_or_string(p.beta)},
            {"weak_coupling_threshold", p.weak_coupling_threshold}};
}

std::string family_name(SpectralFamily f) {
    switch (f) {
    case SpectralFamily::Ohmic: return "ohmic";
    case SpectralFamily::SuperOhmic: return "super_ohmic";
    case SpectralFamily::Tabulated: return "tabulated";
    }
    return "";
}

json spectral_json(const SpectralModel& m) {
    json j = {{"family", family_name(m.family)}, {"eta", m.eta}, {"omega_c", m.omega_c},
              {"s", m.power}, {"panels", m.quad.panels}, {"tolerance", m.quad.tolerance}};
    j["ir_cutoff"] = m.ir_cutoff ? json(*m.ir_cutoff) : json(nullptr);
    return j;
}

json resonance_entries_json(const ResonanceSet& r) {
    json arr = json::array();
    for (const auto& e : r.entries()) {
        arr.push_back({{"sector", e.sector}, {"index", e.index}, {"re", e.value.real()}, {"im", e.value.imag()},
                       {"multiplicity", e.multiplicity}, {"regularized", e.regularized}});
    }
    return arr;
}

json components_json(const RateComponents& c) {
    return {{"j_tilde", c.j_tilde}, {"j_gap", c.j_gap}, {"coth_gap", c.coth_gap}, {"n_gap", c.n_gap},
            {"mu", double_or_string(c.mu)}, {"boltzmann_mu", double_or_string(c.boltzmann_mu)},
            {"pv", c.pv}, {"x1", c.x1}, {"x2", c.x2}, {"x1_acceptor", c.x1_acceptor},
            {"x2_acceptor", c.x2_acceptor}, {"x12", c.x12}, {"y12", c.y12}};
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Runs job(i) for i in [0, n) on a pool; results are written by index so order is deterministic.
void parallel_for(int n, int workers, const std::function<void(int)>& job) {
    workers = std::max(1, std::min(workers, n));
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto run = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

fs::path prepare_out(const RunOptions& opts) {
    fs::create_directories(opts.out_dir);
    return opts.out_dir;
}

json manifest_base(const Scenario& sc, const std::string& verb) {
    json m;
    m["tool"] = "datransfer";
    m["version"] = kVersion;
    m["verb"] = verb;
    m["generated_at"] = iso_now();
    m["scenario"] = sc.source.string();
    m["parameters"] = params_json(sc.params);
    m["spectral"] = spectral_json(sc.spectral);
    const auto warn = regime_warning(sc.params);
    m["regime_warning"] = warn ? json(*warn) : json(nullptr);
    return m;
}

} // namespace

// ---------------------------------------------------------------------------

std::vector<double> TimeGrid::values() const {
    std::vector<double> out;
    if (points < 1) return out;
    if (points == 1) return {t_max};
    if (spacing == GridSpacing::Linear) {
        for (int i = 0; i < points; ++i) out.push_back(t_max * i / (points - 1));
        out.back() = t_max;
        return out;
    }
    const double lo = t_min > 0.0 ? t_min : 1e-3 * t_max;
    out.push_back(0.0);
    const int m = points - 1;
    for (int i = 0; i < m; ++i) {
        const double f = m == 1 ? 1.0 : static_cast<double>(i) / (m - 1);
        out.push_back(lo * std::pow(t_max / lo, f));
    }
    out.back() = t_max;
    return out;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

int resolve_workers(std::optional<int> flag) {
    if (flag) {
        if (*flag < 1) throw ConfigError("--workers", "worker count must be >= 1");
        return *flag;
    }
    if (const char* env = std::getenv("DATRANSFER_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) {
            throw ConfigError("DATRANSFER_WORKERS", "expected a positive integer");
        }
        return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Scenario load_scenario(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    Scenario sc = parse_scenario(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
    sc.source = path;
    return sc;
}

Scenario parse_scenario(const std::string& text, const fs::path& base) {
    pt::ptree tree;
    {
        std::istringstream in(text);
        try {
            pt::ini_parser::read_ini(in, tree);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError("", e.message(), static_cast<int>(e.line()));
        }
    }
    for (const auto& [sec, child] : tree) {
        const auto it = kSchema.find(sec);
        if (child.empty() && !child.data().empty()) {
            throw ConfigError(sec, "key outside of a section", find_line(text, "", sec));
        }
        if (it == kSchema.end()) throw ConfigError(sec, "unknown section", find_line(text, sec, ""));
        for (const auto& [key, v] : child) {
            (void)v;
            if (!it->second.count(key)) {
                throw ConfigError(sec + "." + key, "unknown key", find_line(text, sec, key));
            }
        }
    }
    const Reader r(tree, text);
    Scenario sc;

    SystemParams& p = sc.params;
    p.E_D = r.num("system", "E_D", p.E_D);
    p.E_A = r.num("system", "E_A", p.E_A);
    p.N_D = r.integer("system", "N_D", p.N_D);
    p.N_A = r.integer("system", "N_A", p.N_A);
    p.V = r.num("system", "V", p.V);
    p.g_D = r.num("system", "g_D", p.g_D);
    p.g_A = r.num("system", "g_A", p.g_A);
    p.lambda = r.num("system", "lambda", p.lambda);
    p.beta = r.num("system", "beta", p.beta);
    p.weak_coupling_threshold = r.num("system", "weak_coupling_threshold", p.weak_coupling_threshold);
    if (p.N_D < 1) r.fail("system", "N_D", "must be >= 1");
    if (p.N_A < 1) r.fail("system", "N_A", "must be >= 1");
    if (!(p.beta > 0.0)) r.fail("system", "beta", "must be > 0 (or inf)");
    if (!(p.weak_coupling_threshold > 0.0)) r.fail("system", "weak_coupling_threshold", "must be > 0");
    try {
        validate(p);
        effective_reduction(p);
    } catch (const Error& e) {
        r.fail("system", "", e.what());
    }

    const std::string fam = r.str("spectral", "family", "ohmic");
    try {
        if (fam == "ohmic") {
            sc.spectral = SpectralModel::ohmic(r.num("spectral", "eta", 0.1), r.num("spectral", "omega_c", 10.0));
        } else if (fam == "super_ohmic") {
            sc.spectral = SpectralModel::super_ohmic(r.num("spectral", "eta", 0.1),
                                                     r.num("spectral", "omega_c", 10.0),
                                                     r.num("spectral", "s", 3.0));
        } else if (fam == "tabulated") {
            const auto table = r.raw("spectral", "table");
            if (!table) r.fail("spectral", "table", "tabulated family requires a table file");
            fs::path tp = *table;
            if (tp.is_relative()) tp = base / tp;
            sc.spectral = load_tabulated(tp.string());
        } else {
            r.fail("spectral", "family", "expected ohmic, super_ohmic or tabulated");
        }
        sc.spectral.ir_cutoff = r.opt_num("spectral", "ir_cutoff");
        sc.spectral.quad.panels = r.integer("spectral", "panels", sc.spectral.quad.panels);
        sc.spectral.quad.tolerance = r.num("spectral", "tolerance", sc.spectral.quad.tolerance);
        validate(sc.spectral);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        r.fail("spectral", "", e.what());
    }

    const std::string kind = r.str("initial", "kind", "uniform_D");
    if (kind == "uniform_D") {
        sc.initial = InitialKind::UniformD;
    } else if (kind == "incoherent" || kind == "coherent") {
        sc.initial = kind == "incoherent" ? InitialKind::Incoherent : InitialKind::Coherent;
        sc.p = r.list("initial", "p");
        if (sc.p.empty()) sc.p.assign(p.N_D, 1.0 / p.N_D);
        if (static_cast<int>(sc.p.size()) != p.N_D) r.fail("initial", "p", "length must equal N_D");
        try {
            validate(InitialDistribution{sc.p, DistributionKind::Incoherent});
        } catch (const Error& e) {
            r.fail("initial", "p", e.what());
        }
    } else if (kind == "explicit") {
        sc.initial = InitialKind::Explicit;
        const auto file = r.raw("initial", "file");
        if (!file) r.fail("initial", "file", "explicit initial state requires a file");
        sc.rho_file = *file;
        if (sc.rho_file.is_relative()) sc.rho_file = base / sc.rho_file;
        if (!fs::exists(sc.rho_file)) r.fail("initial", "file", "file does not exist: " + sc.rho_file.string());
        const DAState st = load_density_matrix(sc.rho_file);
        if (st.n_donor != p.N_D || st.n_acceptor != p.N_A) {
            r.fail("initial", "file", "state dimensions differ from [system] N_D, N_A");
        }
    } else {
        r.fail("initial", "kind", "expected uniform_D, incoherent, coherent or explicit");
    }

    TimeGrid& g = sc.time;
    g.t_max = r.num("time", "t_max", g.t_max);
    g.points = r.integer("time", "points", g.points);
    g.t_min = r.num("time", "t_min", g.t_min);
    const std::string spacing = r.str("time", "spacing", "linear");
    if (spacing == "linear") g.spacing = GridSpacing::Linear;
    else if (spacing == "log") g.spacing = GridSpacing::Log;
    else r.fail("time", "spacing", "expected linear or log");
    if (g.points < 1) r.fail("time", "points", "time grid must contain at least one point");
    if (!(g.t_max > 0.0) || !std::isfinite(g.t_max)) r.fail("time", "t_max", "must be finite and > 0");
    if (g.spacing == GridSpacing::Log) {
        if (g.points < 2) r.fail("time", "points", "log grid needs at least two points");
        if (g.t_min < 0.0 || (g.t_min > 0.0 && g.t_min >= g.t_max)) {
            r.fail("time", "t_min", "must satisfy 0 < t_min < t_max");
        }
    }

    if (const auto el = r.raw("output", "elements")) {
        sc.elements.clear();
        std::stringstream ss(*el);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            const auto colon = item.find(':');
            if (colon == std::string::npos) r.fail("output", "elements", "expected bra:ket, got '" + item + "'");
            ElementSpec e{trim(item.substr(0, colon)), trim(item.substr(colon + 1))};
            if (!valid_label(e.bra, p.N_D, p.N_A) || !valid_label(e.ket, p.N_D, p.N_A)) {
                r.fail("output", "elements", "invalid element label in '" + item + "'");
            }
            sc.elements.push_back(e);
        }
    }

    if (r.has_section("sweep")) {
        SweepSpec sw;
        const std::string axis = r.str("sweep", "axis", "");
        if (axis == "eta") sw.axis = SweepAxis::Eta;
        else if (axis == "beta") sw.axis = SweepAxis::Beta;
        else if (axis == "N_D") sw.axis = SweepAxis::ND;
        else if (axis == "lambda") sw.axis = SweepAxis::Lambda;
        else if (axis == "p") sw.axis = SweepAxis::P;
        else r.fail("sweep", "axis", "expected eta, beta, N_D, lambda or p");
        sw.values = r.list("sweep", "values");
        if (sw.values.empty()) {
            const auto start = r.opt_num("sweep", "start");
            const auto stop = r.opt_num("sweep", "stop");
            const int count = r.integer("sweep", "count", 0);
            if (!start || !stop || count < 1) {
                r.fail("sweep", "values", "give either values or start, stop and count >= 1");
            }
            for (int i = 0; i < count; ++i) {
                sw.values.push_back(count == 1 ? *start : *start + (*stop - *start) * i / (count - 1));
            }
        }
        for (double v : sw.values) {
            const bool ok = (sw.axis == SweepAxis::Beta && v > 0.0) ||
                            (sw.axis == SweepAxis::ND && v >= 1.0 && v == std::floor(v)) ||
                            (sw.axis == SweepAxis::P && v >= 0.0 && v <= 1.0) ||
                            (sw.axis == SweepAxis::Eta && std::isfinite(v)) ||
                            (sw.axis == SweepAxis::Lambda && std::isfinite(v));
            if (!ok) r.fail("sweep", "values", "value " + format_double(v) + " is not valid for this axis");
        }
        sc.sweep = sw;
    }

    ValidateSpec& vs = sc.validate;
    vs.unitary_tolerance = r.num("validate", "unitary_tolerance", vs.unitary_tolerance);
    vs.random_cases = r.integer("validate", "random_cases", vs.random_cases);
    vs.rate_tolerance = r.num("validate", "rate_tolerance", vs.rate_tolerance);
    if (!(vs.unitary_tolerance > 0.0)) r.fail("validate", "unitary_tolerance", "must be > 0");
    if (vs.random_cases < 0) r.fail("validate", "random_cases", "must be >= 0");
    if (!(vs.rate_tolerance > 0.0)) r.fail("validate", "rate_tolerance", "must be > 0");
    return sc;
}

DAState load_density_matrix(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("initial.file", "cannot open '" + path.string() + "'");
    std::string line;
    int lineno = 0;
    int nd = 0;
    int na = 0;
    auto next = [&](std::string& out) {
        while (std::getline(in, out)) {
            ++lineno;
            const auto h = out.find('#');
            if (h != std::string::npos) out.erase(h);
            if (!trim(out).empty()) return true;
        }
        return false;
    };
    if (!next(line)) throw ConfigError("initial.file", "empty density matrix file");
    {
        std::istringstream ls(line);
        if (!(ls >> nd >> na) || nd < 1 || na < 1) {
            throw ConfigError("initial.file", "first line must be 'N_D N_A'", lineno);
        }
    }
    const int n = nd + na;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
    while (next(line)) {
        std::istringstream ls(line);
        int row = 0;
        int col = 0;
        double re = 0.0;
        double im = 0.0;
        std::string extra;
        if (!(ls >> row >> col >> re >> im) || (ls >> extra)) {
            throw ConfigError("initial.file", "expected 'row col re im'", lineno);
        }
        if (row < 0 || row >= n || col < 0 || col >= n) {
            throw ConfigError("initial.file", "index out of range", lineno);
        }
        if (seen[static_cast<std::size_t>(row) * n + col]) {
            throw ConfigError("initial.file", "duplicate entry", lineno);
        }
        seen[static_cast<std::size_t>(row) * n + col] = 1;
        rho(row, col) = cplx(re, im);
    }
    if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(seen.size())) {
        throw ConfigError("initial.file", "expected all (N_D+N_A)^2 entries");
    }
    try {
        return make_state(rho, nd, na);
    } catch (const InvalidState& e) {
        throw ConfigError("initial.file", e.what());
    }
}

DAState initial_state(const Scenario& sc) {
    const int nd = sc.params.N_D;
    const int na = sc.params.N_A;
    switch (sc.initial) {
    case InitialKind::UniformD:
        return make_initial_state({std::vector<double>(nd, 1.0 / nd), DistributionKind::Coherent}, nd, na);
    case InitialKind::Incoherent:
        return make_initial_state({sc.p, DistributionKind::Incoherent}, nd, na);
    case InitialKind::Coherent:
        return make_initial_state({sc.p, DistributionKind::Coherent}, nd, na);
    case InitialKind::Explicit:
        return load_density_matrix(sc.rho_file);
    }
    throw InvalidState("unknown initial state kind");
}

// ---------------------------------------------------------------------------

std::vector<fs::path> run_evolve(const Scenario& sc, const RunOptions& opts) {
    const fs::path dir = prepare_out(opts);
    const PropagatorContext ctx(sc.params, sc.spectral);
    const DAState rho0 = initial_state(sc);
    const std::vector<double> grid = sc.time.values();
    const int nd = sc.params.N_D;
    const int na = sc.params.N_A;

    std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> vecs;
    for (const auto& e : sc.elements) {
        vecs.emplace_back(label_vector(e.bra, ctx.projections(), nd, na),
                          label_vector(e.ket, ctx.projections(), nd, na));
    }

    std::vector<std::string> rows(grid.size());
    parallel_for(static_cast<int>(grid.size()), opts.workers, [&](int i) {
        const double t = grid[i];
        const DAState rt = propagate(ctx, rho0, t);
        const double pD = rt.rho.topLeftCorner(nd, nd).trace().real();
        const double pA = rt.rho.bottomRightCorner(na, na).trace().real();
        std::string row = format_double(t) + "," + format_double(pD) + "," + format_double(pA) + "," +
                          format_double(donor_population(ctx, rho0, t));
        for (const auto& [bra, ket] : vecs) {
            const cplx v = bra.dot(rt.rho * ket);
            row += "," + format_double(v.real()) + "," + format_double(v.imag());
        }
        row += "," + format_double(fluctuation_variance(pD, nd)) + "\n";
        rows[i] = row;
    });

    std::string csv = "t,p_D,p_A,p_D_closed";
    for (const auto& e : sc.elements) csv += ",re_" + e.bra + "_" + e.ket + ",im_" + e.bra + "_" + e.ket;
    csv += ",var_F\n";
    for (const auto& r : rows) csv += r;
    const fs::path csv_path = dir / "timeseries.csv";
    write_text(csv_path, csv);

    json m = manifest_base(sc, "evolve");
    const auto& eff = ctx.eff();
    m["derived"] = {{"v", eff.v}, {"e1", eff.e1}, {"e2", eff.e2}, {"alpha", eff.alpha},
                    {"gbar", {{eff.gbar(0, 0), eff.gbar(0, 1)}, {eff.gbar(1, 0), eff.gbar(1, 1)}}},
                    {"gibbs", {ctx.gibbs()(0), ctx.gibbs()(1)}},
                    {"gamma_min", double_or_string(ctx.resonances().gamma_min())}};
    m["resonances"] = resonance_entries_json(ctx.resonances());
    m["shifts_available"] = ctx.resonances().shifts_available;
    m["rate_components"] = components_json(ctx.resonances().components);
    m["files"] = {csv_path.filename().string()};
    const fs::path man = dir / "manifest.json";
    write_text(man, m.dump(2) + "\n");
    return {csv_path, man};
}

std::vector<fs::path> run_sweep(const Scenario& sc, const RunOptions& opts) {
    if (!sc.sweep) throw ConfigError("sweep", "scenario has no [sweep] section");
    const fs::path dir = prepare_out(opts);
    const SweepSpec& sw = *sc.sweep;
    static const char* names[] = {"eta", "beta", "N_D", "lambda", "p"};
    const std::string axis_name = names[static_cast<int>(sw.axis)];
    const double v_fixed = sc.params.effective_coupling();

    std::vector<std::string> rows(sw.values.size());
    parallel_for(static_cast<int>(sw.values.size()), opts.workers, [&](int i) {
        const double x = sw.values[i];
        SystemParams p = sc.params;
        std::vector<double> dist;
        if (sc.initial == InitialKind::Incoherent || sc.initial == InitialKind::Coherent) dist = sc.p;
        switch (sw.axis) {
        case SweepAxis::Eta: p.E_A = p.E_D - 2.0 * v_fixed * x; break;
        case SweepAxis::Beta: p.beta = x; break;
        case SweepAxis::ND:
            p.N_D = static_cast<int>(x);
            p.V = v_fixed / std::sqrt(static_cast<double>(p.N_D) * p.N_A);
            dist.clear();
            break;
        case SweepAxis::Lambda: p.lambda = x; break;
        case SweepAxis::P: {
            dist.assign(p.N_D, x / p.N_D);
            dist[0] += 1.0 - x;
            break;
        }
        }
        if (dist.empty()) dist.assign(p.N_D, 1.0 / p.N_D);
        const EffectiveSystem eff = effective_reduction(p);
        const std::vector<double> uniform(p.N_D, 1.0 / p.N_D);
        const auto inc = efficiency_incoherent(eff, p.beta, dist);
        const auto coh_u = efficiency_coherent(eff, p.beta, p.N_D, uniform);
        const auto coh_p = efficiency_coherent(eff, p.beta, p.N_D, dist);
        const ResonanceSet res = compute_resonances(p, eff, sc.spectral);
        rows[i] = format_double(x) + "," + format_double(eff.alpha) + "," + format_double(inc.p_D_inf) + "," +
                  format_double(coh_u.p_D_inf) + "," + format_double(max_acceptor_population(eff, p.beta)) + "," +
                  format_double(coh_p.p_D_inf) + "," + format_double(coh_p.entropy) + "," +
                  to_string(inc.regime) + "," + format_double(res(1, 2).imag()) + "," +
                  format_double(res(1, 3).imag()) + "\n";
    });

    std::string csv = axis_name +
                      ",alpha,p_D_inc_inf,p_D_coh_uniform_inf,p_A_max,p_D_coh_inf,entropy,regime,gamma_pop,gamma_coh\n";
    for (const auto& r : rows) csv += r;
    const fs::path csv_path = dir / "sweep.csv";
    write_text(csv_path, csv);

    json m = manifest_base(sc, "sweep");
    m["axis"] = axis_name;
    m["points"] = sw.values.size();
    m["files"] = {csv_path.filename().string()};
    const fs::path man = dir / "sweep_manifest.json";
    write_text(man, m.dump(2) + "\n");
    return {csv_path, man};
}

std::vector<fs::path> run_resonances(const Scenario& sc, const RunOptions& opts) {
    const fs::path dir = prepare_out(opts);
    const EffectiveSystem eff = effective_reduction(sc.params);
    const ResonanceSet res = compute_resonances(sc.params, eff, sc.spectral);
    json j;
    j["shifts_available"] = res.shifts_available;
    j["entries"] = resonance_entries_json(res);
    j["components"] = components_json(res.components);
    j["gamma_min"] = double_or_string(res.gamma_min());
    const fs::path path = dir / "resonances.json";
    write_text(path, j.dump(2) + "\n");
    return {path};
}

// ---------------------------------------------------------------------------

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.pass; });
}

namespace {

Eigen::MatrixXcd random_density(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXcd X(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) X(i, j) = cplx(nd(rng), nd(rng));
    }
    Eigen::MatrixXcd rho = X * X.adjoint();
    return rho / rho.trace().real();
}

SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> site(1, 4);
    SystemParams p;
    do {
        p.N_D = site(rng);
        p.N_A = site(rng);
    } while (p.N_D + p.N_A > 8);
    p.E_D = 2.0 * u(rng);
    p.E_A = 2.0 * u(rng);
    p.V = 0.2 + 0.5 * std::abs(u(rng));
    p.g_D = u(rng);
    p.g_A = u(rng);
    p.beta = 0.5 + 5.0 * std::abs(u(rng));
    return p;
}

} // namespace

ValidationReport validate_scenario(const Scenario& sc, const RunOptions& opts) {
    ValidationReport rep;
    std::mt19937_64 rng(opts.seed);
    const std::vector<double> times{0.1, 1.0, 10.0};

    // Zero coupling: main term against exact unitary evolution.
    auto unitary_dev = [&](SystemParams p, const Eigen::MatrixXcd& rho) {
        p.lambda = 0.0;
        const PropagatorContext ctx(p, sc.spectral);
        const DAState s{p.N_D, p.N_A, rho};
        double dev = 0.0;
        for (double t : times) dev = std::max(dev, (propagate(ctx, s, t).rho - unitary_reference(p, s, t).rho).norm());
        return dev;
    };
    rep.checks.push_back(make_check("unitary_lambda0_scenario", unitary_dev(sc.params, initial_state(sc).rho), 0.0,
                                    sc.validate.unitary_tolerance));
    double worst = 0.0;
    for (int i = 0; i < sc.validate.random_cases; ++i) {
        const SystemParams p = random_params(rng);
        worst = std::max(worst, unitary_dev(p, random_density(rng, p.dim())));
    }
    if (sc.validate.random_cases > 0) {
        rep.checks.push_back(make_check("unitary_lambda0_random", worst, 0.0, sc.validate.unitary_tolerance));
    }

    const PropagatorContext ctx(sc.params, sc.spectral);
    const ResonanceSet& res = ctx.resonances();
    rep.shifts_available = res.shifts_available;
    const DAState rho0 = initial_state(sc);
    const int nd = sc.params.N_D;
    const auto& P = ctx.projections();

    double tr = 0.0;
    double herm = 0.0;
    double elem = 0.0;
    double closed = 0.0;
    for (double t : sc.time.values()) {
        const DAState rt = propagate(ctx, rho0, t);
        tr = std::max(tr, std::abs(rt.rho.trace() - cplx(1.0)));
        herm = std::max(herm, (rt.rho - rt.rho.adjoint()).norm());
        for (int k = 1; k <= nd; ++k) {
            for (int l = 1; l <= nd; ++l) {
                elem = std::max(elem, std::abs(donor_element(ctx, rho0, t, k, l) - rt.rho(k - 1, l - 1)));
            }
        }
        closed = std::max(closed, std::abs(donor_population(ctx, rho0, t) -
                                           rt.rho.topLeftCorner(nd, nd).trace().real()));
    }
    rep.checks.push_back(make_check("trace_preservation", tr, 0.0, 1e-10));
    rep.checks.push_back(make_check("hermiticity", herm, 0.0, 1e-12));
    rep.checks.push_back(make_check("donor_element_closed_form", elem, 0.0, 1e-10));
    rep.checks.push_back(make_check("donor_population_closed_form", closed, 0.0, 1e-10));

    // Sector confinement for a state inside span{|D>, |A>}.
    {
        const Eigen::MatrixXcd span = 0.6 * P.donor_uniform * P.donor_uniform.adjoint() +
                                      0.4 * P.acceptor_uniform * P.acceptor_uniform.adjoint() +
                                      cplx(0.1, 0.2) * P.donor_uniform * P.acceptor_uniform.adjoint() +
                                      cplx(0.1, -0.2) * P.acceptor_uniform * P.donor_uniform.adjoint();
        const DAState s{nd, sc.params.N_A, span};
        double leak = 0.0;
        const Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(sc.params.dim(), sc.params.dim()) - P.P_bar_S;
        for (double t : sc.time.values()) {
            const Eigen::MatrixXcd r = propagate(ctx, s, t).rho;
            leak = std::max({leak, (Q * r).norm(), (r * Q).norm()});
        }
        rep.checks.push_back(make_check("sector_confinement", leak, 0.0, 1e-12));
    }

    const double gmin = res.gamma_min();
    if (std::isfinite(gmin) && gmin > 0.0) {
        const double t_inf = 60.0 / gmin;
        const DAState late = propagate(ctx, rho0, t_inf);
        DAState no_da = rho0;
        no_da.rho -= P.P_Aperp * rho0.rho * P.P_Dperp + P.P_Dperp * rho0.rho * P.P_Aperp;
        const double dev = (propagate(ctx, no_da, t_inf).rho - asymptotic_state(ctx, no_da).rho).norm();
        rep.checks.push_back(make_check("asymptotic_state", dev, 0.0, 1e-10));
        if (sc.initial != InitialKind::Explicit) {
            const std::vector<double> dist =
                sc.initial == InitialKind::UniformD ? std::vector<double>(nd, 1.0 / nd) : sc.p;
            const double expected = sc.initial == InitialKind::Incoherent
                                        ? efficiency_incoherent(ctx.eff(), sc.params.beta, nd).p_D_inf
                                        : efficiency_coherent(ctx.eff(), sc.params.beta, nd, dist).p_D_inf;
            rep.checks.push_back(make_check("efficiency_closed_form",
                                            late.rho.topLeftCorner(nd, nd).trace().real(), expected, 1e-8));
        }
    }

    double sym = 0.0;
    for (int s = 1; s <= 4; ++s) sym = std::max(sym, std::abs(res(3, s) + std::conj(res(2, s))));
    rep.checks.push_back(make_check("resonance_conjugation_symmetry", sym, 0.0, 0.0));
    rep.checks.push_back(make_check("population_rate_identity", res(1, 2).imag(),
                                    population_relaxation_rate(sc.params, ctx.eff(), sc.spectral), 1e-300, 1e-12));

    if (sc.params.lambda != 0.0) {
        const RedfieldResult rf = redfield_reference(ctx.eff(), sc.spectral, sc.params.beta, sc.params.lambda);
        rep.checks.push_back(make_check("redfield_population_rate", res(1, 2).imag(), rf.population_rate, 0.0,
                                        sc.validate.rate_tolerance));
        rep.checks.push_back(make_check("redfield_coherence_rate", res(1, 3).imag(), rf.coherence.imag(), 0.0,
                                        sc.validate.rate_tolerance));
        const Eigen::Matrix2d gibbs = gibbs_effective(ctx.eff(), sc.params.beta);
        const double l2 = sc.params.lambda * sc.params.lambda;
        rep.checks.push_back(make_check("redfield_detailed_balance",
                                        (rf.stationary - gibbs.cast<cplx>()).norm(), 0.0, 10.0 * l2));
    }

    if (nd >= 2) {
        const TruncatedBath bath = discretize_bath(sc.spectral, 2, 10);
        if (bath.dimension(sc.params.dim()) <= 4000) {
            const Eigen::VectorXcd xi = P.xi_D.col(0);
            const double r = stationarity_check(sc.params, bath, xi, {1.0, 5.0, 10.0});
            rep.checks.push_back(make_check("truncated_bath_stationarity", r, 0.0, 1e-8));
        }
    }
    return rep;
}

ValidationReport run_validate(const Scenario& sc, const RunOptions& opts) {
    const fs::path dir = prepare_out(opts);
    ValidationReport rep = validate_scenario(sc, opts);
    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"check_name", c.check_name}, {"predicted", c.predicted}, {"reference", c.reference},
                          {"abs_err", c.abs_err}, {"rel_err", double_or_string(c.rel_err)}, {"pass", c.pass}});
    }
    json j;
    j["all_pass"] = rep.all_pass();
    j["shifts_available"] = rep.shifts_available;
    j["seed"] = opts.seed;
    j["checks"] = checks;
    write_text(dir / "validation.json", j.dump(2) + "\n");
    return rep;
}

} // namespace datransfer
