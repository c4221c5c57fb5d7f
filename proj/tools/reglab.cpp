#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "reglab/blayer.hpp"
#include "reglab/criteria.hpp"
#include "reglab/pdesim.hpp"
#include "reglab/spectral.hpp"

using json = nlohmann::ordered_json;
using namespace reglab;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// JSON number rounded to 12 significant digits; non-finite values become null.
json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return std::stod(fmt(x));
}

using Cell = std::variant<double, std::string>;

/// A command result: a table with a header, or a standalone JSON record.
struct Artifact {
    json header = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::optional<json> record;
};

json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return num(*d);
    return std::get<std::string>(c);
}

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return fmt(*d);
    return std::get<std::string>(c);
}

void emit(const Artifact& a, bool as_json, const std::string& out) {
    std::ostringstream os;
    if (a.record) {
        os << a.record->dump(2) << '\n';
    } else if (as_json) {
        json j;
        j["header"] = a.header;
        j["columns"] = a.columns;
        j["rows"] = json::array();
        for (const auto& r : a.rows) {
            json row = json::array();
            for (const auto& c : r) row.push_back(cell_json(c));
            j["rows"].push_back(row);
        }
        os << j.dump(2) << '\n';
    } else {
        os << "# " << a.header.dump() << '\n';
        for (std::size_t i = 0; i < a.columns.size(); ++i) os << (i ? "," : "") << a.columns[i];
        os << '\n';
        for (const auto& r : a.rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
            os << '\n';
        }
    }
    if (out.empty() || out == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(out);
        if (!f) throw UsageError("cannot open output file " + out);
        f << os.str();
    }
}

/// Worker count from REG_LAB_THREADS (default: hardware concurrency).
unsigned thread_cap() {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("REG_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end || v < 1) throw UsageError("REG_LAB_THREADS must be a positive integer");
        cap = static_cast<unsigned>(v);
    }
    return cap;
}

/// Evaluates f(0..n-1) on up to thread_cap() threads; results keep their order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F f) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    const std::size_t workers = std::min<std::size_t>(thread_cap(), n);
    std::size_t next = 0;
    std::mutex mu;
    auto work = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(mu);
                if (next >= n) return;
                i = next++;
            }
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

struct Range {
    double lo, hi, step;
    std::vector<double> values() const {
        const long n = std::lround((hi - lo) / step);
        std::vector<double> v;
        for (long i = 0; i <= n; ++i) v.push_back(lo + step * i);
        return v;
    }
};

double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("invalid number '" + s + "' in " + what);
    }
    if (used != s.size()) throw UsageError("invalid number '" + s + "' in " + what);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, sep)) parts.push_back(p);
    return parts;
}

Range parse_range(const std::string& s, const std::string& flag) {
    const auto p = split(s, ':');
    if (p.size() != 3) throw UsageError(flag + " expects lo:hi:step");
    Range r{parse_number(p[0], flag), parse_number(p[1], flag), parse_number(p[2], flag)};
    if (!(r.step > 0) || !(r.hi >= r.lo)) throw UsageError(flag + " needs lo <= hi and step > 0");
    if ((r.hi - r.lo) / r.step > 1e6) throw UsageError(flag + " has more than a million points");
    return r;
}

std::pair<double, double> parse_window(const std::string& s, const std::string& flag) {
    const auto p = split(s, ':');
    if (p.size() != 2) throw UsageError(flag + " expects lo:hi");
    return {parse_number(p[0], flag), parse_number(p[1], flag)};
}

EquationFamily parse_family(const std::string& name, int m) {
    if (name == "parabolic") return EquationFamily::parabolic(m);
    if (name == "heat") return EquationFamily::heat();
    if (name == "biharmonic") return EquationFamily::biharmonic();
    if (name == "dispersion3") return EquationFamily::dispersion3();
    if (name == "beam4") return EquationFamily::beam4();
    throw UsageError("unknown family '" + name + "'");
}

/// const:4 | const:l=4 | powerlog:C=..,g=.. | sqrtlog:C=.. | singlelog:C=..,g=.. | table:<csv of tau,phi>
BoundaryFunction parse_boundary(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("boundary '" + spec + "' needs kind:parameters");
    const std::string kind = spec.substr(0, colon), body = spec.substr(colon + 1);
    if (kind == "table") {
        std::ifstream f(body);
        if (!f) throw UsageError("cannot read boundary table " + body);
        std::vector<double> tau, val;
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty() || line[0] == '#' || !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '.'))
                continue;
            const auto p = split(line, ',');
            if (p.size() < 2) throw UsageError("boundary table rows need tau,phi");
            tau.push_back(parse_number(p[0], "boundary table"));
            val.push_back(parse_number(p[1], "boundary table"));
        }
        return BoundaryFunction::tabulated(tau, val);
    }
    std::map<std::string, double> kv;
    for (const auto& part : split(body, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) kv["_"] = parse_number(part, spec);
        else kv[part.substr(0, eq)] = parse_number(part.substr(eq + 1), spec);
    }
    auto get = [&](std::initializer_list<const char*> names) {
        for (const char* n : names)
            if (kv.count(n)) return kv.at(n);
        throw UsageError("boundary '" + spec + "' is missing parameter " + *names.begin());
    };
    std::size_t expected = 0;
    BoundaryFunction b;
    if (kind == "const") {
        b = BoundaryFunction::constant(get({"l", "_"}));
        expected = 1;
    } else if (kind == "powerlog") {
        b = BoundaryFunction::power_log(get({"C"}), get({"g", "gamma"}));
        expected = 2;
    } else if (kind == "sqrtlog") {
        b = BoundaryFunction::petrovskii_sqrt_log(get({"C", "_"}));
        expected = 1;
    } else if (kind == "singlelog") {
        b = BoundaryFunction::single_log(get({"C"}), get({"g", "gamma"}));
        expected = 2;
    } else {
        throw UsageError("unknown boundary kind '" + kind + "'");
    }
    if (kv.size() != expected) throw UsageError("boundary '" + spec + "' has unexpected parameters");
    return b;
}

json constants_json(const KernelConstants& kc) {
    json j;
    j["family"] = kc.family.name();
    j["m"] = kc.m;
    j["alpha"] = num(kc.alpha);
    j["d0"] = num(kc.d0);
    j["b0"] = num(kc.b0);
    j["delta0"] = num(kc.delta0);
    if (kc.family.tag != FamilyTag::beam4 && kc.d0 > 0) {
        j["critical_constant"] = num(kc.critical_constant());
        if (kc.family.tag == FamilyTag::parabolic) j["critical_power"] = num(kc.critical_power());
    }
    if (kc.fit) {
        j["fit"] = {{"c1", num(kc.fit->c1)},
                    {"c2", num(kc.fit->c2)},
                    {"exponent", num(kc.fit->exponent)},
                    {"residual", num(kc.fit->residual)},
                    {"window", {num(kc.fit->y_lo), num(kc.fit->y_hi)}}};
    }
    return j;
}

// ---------------------------------------------------------------- kernel

struct KernelArgs {
    std::string family = "biharmonic";
    int m = 2;
    std::string range;
    std::string fit_window;
};

Artifact cmd_kernel(const KernelArgs& a) {
    const EquationFamily fam = parse_family(a.family, a.m);
    const Range r = parse_range(a.range, "--range");
    std::string window = a.fit_window;
    if (window.empty()) window = fam.tag == FamilyTag::parabolic ? "5:9" : (fam.tag == FamilyTag::dispersion3 ? "10:40" : "10:30");
    const auto [lo, hi] = parse_window(window, "--fit-window");
    const KernelConstants kc = with_fit(kernel_constants(fam), kernel_asymptotics_fit(fam, lo, hi, 80));
    const bool even = fam.tag != FamilyTag::dispersion3;
    const auto ys = r.values();
    Artifact out;
    out.header = {{"command", "kernel"}, {"constants", constants_json(kc)}, {"range", a.range}};
    out.columns = {"y", "F", "asymptotic", "abs_diff"};
    const auto rows = parallel_map<std::vector<Cell>>(ys.size(), [&](std::size_t i) {
        const double y = ys[i];
        const double f = eval_kernel(fam, y);
        const double ya = even ? std::abs(y) : y;
        const double asym = ya > 0 ? eval_kernel_asymptotic(kc, ya) : std::numeric_limits<double>::quiet_NaN();
        return std::vector<Cell>{y, f, asym, std::abs(f - asym)};
    });
    out.rows = rows;
    return out;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
    std::string l;
    std::string l_range;
    std::string branch;
    bool roots = false;
    std::string reproduce;
    int m = 2;
    std::string method = "shooting";
};

struct TableEntry {
    double l, paper, tol;
};

/// Printed branch values (with the acceptance tolerances where one is set).
const std::vector<TableEntry> kTable1 = {
    {1, -31.16, 0.05},   {2, -1.83, 0.02},     {3, -0.2647, 0.005}, {4, -0.008152, 1e-3}, {4.075, -0.000236, 0},
    {4.0775, 0.0000113, 0}, {4.08, 0.00026, 0}, {4.1, 0.0022, 0},    {4.2, 0.011, 0},      {5, 0.0483, 2e-3},
    {6, 0.046, 0},       {7.25, 0.00167, 0},   {7.5, -0.0097, 2e-3}, {8, -0.027, 3e-3},   {9, -0.018, 0},
    {10, -0.00084, 0},   {11, 0.00397, 0},     {12, 0.00172, 0},    {13, -0.00055, 0}};

Eigenpair solve_top(double l, int m, const std::string& method) {
    IntervalEigenProblem p;
    p.l = l;
    p.family = EquationFamily::parabolic(m);
    if (method == "shooting") {
        p.method = SpectralMethod::shooting;
        p.parity = Parity::even;
    } else if (method == "collocation") {
        p.method = SpectralMethod::collocation;
        p.parity = Parity::full;
    } else {
        throw UsageError("unknown method '" + method + "'");
    }
    return interval_spectrum(p, 1).front();
}

Artifact cmd_spectrum(const SpectrumArgs& a) {
    if (a.m < 1) throw UsageError("--m must be at least 1");
    Artifact out;
    out.header = {{"command", "spectrum"}, {"m", a.m}, {"method", a.method}};
    if (!a.branch.empty()) {
        const Range r = parse_range(a.branch, "--branch");
        const EigenBranch br = branch_trace(r.lo, r.hi, r.step, a.m);
        out.header["branch"] = a.branch;
        out.header["reseeds"] = br.reseeds;
        out.header["roots"] = json::array();
        for (double x : br.roots) out.header["roots"].push_back(num(x));
        if (a.roots) {
            out.columns = {"root_index", "l"};
            for (std::size_t i = 0; i < br.roots.size(); ++i) out.rows.push_back({double(i + 1), br.roots[i]});
        } else {
            out.columns = {"l", "re_lambda0"};
            for (std::size_t i = 0; i < br.l.size(); ++i) out.rows.push_back({br.l[i], br.lambda0[i]});
        }
        return out;
    }
    if (!a.reproduce.empty()) {
        if (a.reproduce != "table1") throw UsageError("--reproduce supports only table1");
        out.header["reproduce"] = "table1";
        out.columns = {"l", "paper_lambda0", "re_lambda0", "abs_diff", "tolerance", "status"};
        const auto vals = parallel_map<double>(kTable1.size(), [&](std::size_t i) { return top_eigenvalue(kTable1[i].l, a.m); });
        for (std::size_t i = 0; i < kTable1.size(); ++i) {
            const auto& e = kTable1[i];
            const double d = std::abs(vals[i] - e.paper);
            const std::string status = e.tol > 0 ? (d <= e.tol ? "PASS" : "FAIL") : "-";
            out.rows.push_back({e.l, e.paper, vals[i], d, e.tol > 0 ? e.tol : std::numeric_limits<double>::quiet_NaN(), status});
        }
        return out;
    }
    std::vector<double> ls;
    if (!a.l.empty())
        for (const auto& part : split(a.l, ',')) ls.push_back(parse_number(part, "--l"));
    if (!a.l_range.empty()) {
        const auto more = parse_range(a.l_range, "--l-range").values();
        ls.insert(ls.end(), more.begin(), more.end());
    }
    if (ls.empty()) throw UsageError("spectrum needs --l, --l-range, --branch or --reproduce");
    out.columns = {"l", "re_lambda0", "im_lambda0", "residual", "method"};
    const auto pairs = parallel_map<Eigenpair>(ls.size(), [&](std::size_t i) { return solve_top(ls[i], a.m, a.method); });
    for (std::size_t i = 0; i < ls.size(); ++i)
        out.rows.push_back({ls[i], pairs[i].lambda.real(), pairs[i].lambda.imag(), pairs[i].residual, a.method});
    return out;
}

// ---------------------------------------------------------------- blayer

struct BlayerArgs {
    std::string family = "biharmonic";
    int m = 2;
    bool bvp = false;
    double L = 30.0;
    int samples = 601;
};

Artifact cmd_blayer(const BlayerArgs& a) {
    LayerFamily f;
    if (a.family == "pme4") f = LayerFamily::pme4();
    else f = LayerFamily::from(parse_family(a.family, a.m));
    const bool bvp = a.bvp || f.kind == LayerKind::pme4;
    const BoundaryLayerProfile p = bvp ? solve_bl_bvp(f, a.L, 1e-12, a.samples) : closed_form_profile(f, a.L, a.samples);
    const WallConstants wc = wall_constants(p);
    Artifact out;
    out.header = {{"command", "blayer"},
                  {"family", f.name()},
                  {"source", bvp ? "bvp" : "closed_form"},
                  {"gamma1", num(wc.gamma1)},
                  {"gamma2", num(wc.gamma2)},
                  {"far_field", num(p.far_field)},
                  {"overshoots", p.overshoots()},
                  {"L", num(a.L)}};
    out.columns = {"xi", f.kind == LayerKind::pme4 ? "G" : "g", "dg"};
    for (Eigen::Index i = 0; i < p.xi.size(); ++i) out.rows.push_back({p.xi[i], p.g[i], p.dg[i]});
    return out;
}

// ---------------------------------------------------------------- criterion

struct CriterionArgs {
    std::string family = "biharmonic";
    int m = 2;
    std::string side = "right";
    std::string phi;
    bool cutoff = false;
    double width = kDefaultCutoffWidth;
};

json verdict_json(const CriterionVerdict& v) {
    json j;
    j["verdict"] = to_string(v.verdict);
    j["rationale"] = to_string(v.rationale);
    j["tail_exponent"] = num(v.tail_exponent);
    j["envelope_exponent"] = num(v.envelope_exponent);
    j["lambda0"] = v.lambda0 ? num(*v.lambda0) : json(nullptr);
    if (v.petrovskii_form) j["petrovskii_form"] = to_string(*v.petrovskii_form);
    json t;
    t["behaviour"] = to_string(v.tail.behaviour);
    t["variable"] = v.tail.variable;
    t["ratio"] = num(v.tail.ratio);
    t["sign_alternating"] = v.tail.sign_alternating;
    t["final_sign"] = v.tail.final_sign;
    t["windows"] = json::array();
    for (const auto& w : v.tail.windows)
        t["windows"].push_back({{"lo", num(w.lo)}, {"hi", num(w.hi)}, {"log_abs", num(w.log_abs())}, {"sign", w.sign()}});
    j["diagnostics"] = t;
    j["notes"] = v.notes;
    return j;
}

Artifact cmd_criterion(const CriterionArgs& a) {
    if (a.phi.empty()) throw UsageError("criterion needs --phi");
    const BoundaryFunction phi = parse_boundary(a.phi);
    const EquationFamily fam = parse_family(a.family, a.m);
    if (fam.tag == FamilyTag::beam4) throw UsageError("no criterion for the beam family; use the a0 model");
    const KernelConstants kc = kernel_constants(fam);
    const Side side = a.side == "left" ? Side::left : Side::right;
    if (a.side != "left" && a.side != "right") throw UsageError("--side must be left or right");
    std::optional<CutoffBoundary> cut;
    if (a.cutoff) cut = apply_cutoff(phi, kc, a.width);

    CriterionVerdict v;
    json threshold;
    if (fam.tag == FamilyTag::dispersion3) {
        v = cut ? classify_dispersion(side, *cut) : classify_dispersion(side, phi);
        if (side == Side::right) threshold = {{"exponent", num(4.0 / 3)}};
        else threshold = {{"constant", num(kc.critical_constant())}, {"exponent", num(2.0 / 3)}};
    } else if (fam.m == 1) {
        v = classify_heat(phi);
        threshold = {{"constant", 2.0}, {"form", "C sqrt(ln tau)"}};
    } else if (fam.m == 2) {
        v = cut ? classify_biharmonic(*cut, kc) : classify_biharmonic(phi, kc);
        threshold = {{"constant", num(kc.critical_constant())}, {"exponent", num(kc.critical_power())}};
    } else {
        v = cut ? classify_polyharmonic(fam.m, *cut) : classify_polyharmonic(fam.m, phi);
        threshold = {{"constant", num(kc.critical_constant())}, {"exponent", num(kc.critical_power())}};
    }
    const SlowGrowthReport sg = validate_slow_growth(phi);
    json rec;
    rec["command"] = "criterion";
    rec["family"] = fam.name();
    if (fam.tag == FamilyTag::dispersion3) rec["side"] = a.side;
    rec["phi"] = phi.describe();
    rec["cutoff"] = a.cutoff ? json{{"width", num(a.width)}, {"notice", cut->notice}} : json(false);
    rec["threshold"] = threshold;
    rec.update(verdict_json(v));
    rec["slow_growth"] = {{"grows_unboundedly", sg.grows_unboundedly},
                          {"derivative_vanishes", sg.derivative_vanishes},
                          {"log_derivative_vanishes", sg.log_derivative_vanishes},
                          {"slow_growth", sg.slow_growth},
                          {"power_domination", sg.power_domination}};
    Artifact out;
    out.record = rec;
    return out;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string family = "biharmonic";
    std::string phi = "const:4";
    bool cutoff = false;
    int n = 256;
    double tau0 = 0.0;
    double tau_end = 100.0;
    std::string init = "bump";
    unsigned seed = 1;
    int samples = 400;
    double rtol = 1e-4;
    std::string fit;
    double bl_check = -1;
    bool verify_p2 = false;
};

Artifact cmd_simulate(const SimulateArgs& a) {
    Artifact out;
    if (a.verify_p2) {
        const P2Report rep = verify_P2({a.seed, a.seed + 1, a.seed + 2}, a.n);
        out.header = {{"command", "simulate"}, {"verify_P2", rep.pass ? "PASS" : "FAIL"}, {"n", a.n}};
        out.columns = {"l", "seed", "sigma_fit", "status"};
        for (const auto& r : rep.runs) out.rows.push_back({r.l, double(r.seed), r.sigma, r.expected_sign ? "PASS" : "FAIL"});
        return out;
    }
    SimConfig cfg;
    if (a.family == "heat") cfg.family = SimFamily::heat;
    else if (a.family == "biharmonic") cfg.family = SimFamily::biharmonic;
    else throw UsageError("simulate supports heat and biharmonic");
    const BoundaryFunction phi = parse_boundary(a.phi);
    if (a.cutoff) cfg.phi = apply_cutoff(phi, kernel_constants(equation_family(cfg.family)));
    else cfg.phi = phi;
    cfg.n = a.n;
    cfg.tau0 = a.tau0;
    if (!phi.is_constant() && a.tau0 < std::numbers::e) cfg.tau0 = std::numbers::e;
    cfg.tau_end = a.tau_end;
    cfg.samples = a.samples;
    cfg.rtol = a.rtol;
    if (a.init == "polynomial") cfg.initial = InitialData::polynomial();
    else if (a.init == "bump") cfg.initial = InitialData::bump();
    else if (a.init == "random") cfg.initial = InitialData::random_smooth(a.seed);
    else throw UsageError("--init must be polynomial, bump or random");
    if (a.bl_check >= 0) cfg.snapshot_taus = {a.bl_check};
    const SimResult r = simulate(cfg);
    double fa = cfg.tau0 + (cfg.tau_end - cfg.tau0) / 8, fb = cfg.tau_end;
    if (!a.fit.empty()) std::tie(fa, fb) = parse_window(a.fit, "--fit");
    const double sigma = fit_rate(r, fa, fb);
    out.header = {{"command", "simulate"},
                  {"family", to_string(cfg.family)},
                  {"phi", a.cutoff ? phi.describe() + " with cut-off" : phi.describe()},
                  {"initial", cfg.initial.describe()},
                  {"n", cfg.n},
                  {"tau", {num(cfg.tau0), num(cfg.tau_end)}},
                  {"sigma_fit", num(sigma)},
                  {"fit_window", {num(fa), num(fb)}},
                  {"steps", r.steps},
                  {"rejected", r.rejected}};
    if (a.bl_check >= 0) {
        const auto b = bl_snapshot_check(r, a.bl_check);
        out.header["bl_check"] = {{"tau", num(b.tau)},
                                  {"deviation", num(b.deviation)},
                                  {"dominance", num(b.dominance)},
                                  {"inconclusive", b.inconclusive}};
    }
    out.columns = {"tau", "phi", "sup_norm", "a0"};
    for (std::size_t i = 0; i < r.tau.size(); ++i) out.rows.push_back({r.tau[i], r.phi[i], r.sup_norm[i], r.a0[i]});
    return out;
}

// ---------------------------------------------------------------- reproduce

Artifact cmd_reproduce(const std::string& name) {
    Artifact out;
    out.header = {{"command", "reproduce"}, {"bundle", name}};
    if (name == "table1") {
        SpectrumArgs a;
        a.reproduce = "table1";
        return cmd_spectrum(a);
    }
    if (name == "branch-roots") {
        const EigenBranch br = branch_trace(3.5, 14.0, 0.05);
        const std::vector<std::pair<double, double>> paper = {{4.0775, 0.003}, {7.25, 0.05}, {10.0, 0.5}, {13.0, 0.5}};
        out.columns = {"root_index", "l", "paper_l", "tolerance", "status"};
        for (std::size_t i = 0; i < br.roots.size(); ++i) {
            const double p = i < paper.size() ? paper[i].first : std::numeric_limits<double>::quiet_NaN();
            const double t = i < paper.size() ? paper[i].second : std::numeric_limits<double>::quiet_NaN();
            const std::string s = i < paper.size() ? (std::abs(br.roots[i] - p) <= t ? "PASS" : "FAIL") : "-";
            out.rows.push_back({double(i + 1), br.roots[i], p, t, s});
        }
        return out;
    }
    if (name == "petrovskii-heat") {
        const std::vector<double> cs = {1.0, 1.5, 1.8, 1.9, 1.95, 2.0, 2.05, 2.1, 2.2, 2.5, 3.0};
        out.columns = {"C", "verdict", "rho_form_verdict", "rationale"};
        const auto vs = parallel_map<CriterionVerdict>(
            cs.size(), [&](std::size_t i) { return classify_heat(BoundaryFunction::petrovskii_sqrt_log(cs[i])); });
        for (std::size_t i = 0; i < cs.size(); ++i)
            out.rows.push_back({cs[i], to_string(vs[i].verdict),
                                vs[i].petrovskii_form ? to_string(*vs[i].petrovskii_form) : "-", to_string(vs[i].rationale)});
        return out;
    }
    if (name == "critical-constants") {
        out.columns = {"family", "alpha", "d0", "b0", "critical_constant", "critical_exponent", "closed_form"};
        for (int m : {1, 2, 3, 4}) {
            const KernelConstants kc = kernel_constants(EquationFamily::parabolic(m));
            const double closed = m == 2 ? std::pow(3.0, -0.75) * std::pow(2.0, 2.75) : (m == 1 ? 2.0 : kc.critical_constant());
            out.rows.push_back({kc.family.name(), kc.alpha, kc.d0, kc.b0, kc.critical_constant(), kc.critical_power(), closed});
        }
        const KernelConstants kd = kernel_constants(EquationFamily::dispersion3());
        out.rows.push_back({"dispersion3-left", kd.alpha, kd.d0, kd.b0, kd.critical_constant(), 2.0 / 3,
                            std::pow(3 * std::sqrt(3.0) / 2, 2.0 / 3)});
        out.rows.push_back({"dispersion3-right", kd.alpha, kd.d0, kd.b0, std::numeric_limits<double>::quiet_NaN(), 4.0 / 3,
                            std::numeric_limits<double>::quiet_NaN()});
        const Pme4Critical pc = pme4_critical();
        out.rows.push_back({"pme4", 4.0 / 3, 0.0, 0.0, std::numeric_limits<double>::quiet_NaN(), pc.exponent,
                            std::numeric_limits<double>::quiet_NaN()});
        return out;
    }
    throw UsageError("unknown bundle '" + name + "' (table1, branch-roots, petrovskii-heat, critical-constants)");
}

// ---------------------------------------------------------------- config files

/// "--key value" for each entry of the JSON object in `path`, appended after the flags so the
/// file wins. Keys must name options of the selected subcommand; lists become comma lists.
std::vector<std::string> config_args(const std::string& path, CLI::App* sub) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config file " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    std::vector<std::string> args;
    for (const auto& [key, value] : j.items()) {
        if (key == "config") throw UsageError("config files cannot nest --config");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
        if (value.is_boolean()) {
            if (opt->get_expected_min() != 0) throw UsageError("config key '" + key + "' expects a value");
            if (value.get<bool>()) args.push_back("--" + key);
            continue;
        }
        if (opt->get_expected_min() == 0) throw UsageError("config key '" + key + "' is a flag; use true/false");
        auto text = [&](const json& v) {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number()) return v.dump();
            throw UsageError("config key '" + key + "' must be a string, number or list");
        };
        if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + text(v);
            args.push_back("--" + key);
            args.push_back(joined);
        } else {
            args.push_back("--" + key);
            args.push_back(text(value));
        }
    }
    return args;
}

struct Common {
    bool json = false;
    std::string out;
    std::string config;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_flag("--json", c.json, "Emit JSON instead of CSV");
    sub->add_option("--out", c.out, "Output path (default stdout)");
    sub->add_option("--config", c.config, "JSON file of option values; overrides flags");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularity laboratory: kernels, spectra, boundary layers, criteria and simulations"};
    app.require_subcommand(1);
    app.failure_message([](const CLI::App*, const CLI::Error& e) { return std::string("error: ") + e.what() + "\n"; });
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Common common;
    KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "Rescaled kernel and its fitted asymptotics");
    kernel->add_option("--family", ka.family, "parabolic | heat | biharmonic | dispersion3 | beam4")->required();
    kernel->add_option("--m", ka.m, "Order of the parabolic family");
    kernel->add_option("--range", ka.range, "y range lo:hi:step")->required();
    kernel->add_option("--fit-window", ka.fit_window, "Asymptotic fit window lo:hi");
    add_common(kernel, common);

    SpectrumArgs sa;
    auto* spectrum = app.add_subcommand("spectrum", "Top eigenvalue of the rescaled operator on (-l, l)");
    spectrum->add_option("--l", sa.l, "Half-length(s), comma separated");
    spectrum->add_option("--l-range", sa.l_range, "lo:hi:step");
    spectrum->add_option("--branch", sa.branch, "Continue the branch over lo:hi:step");
    spectrum->add_flag("--roots", sa.roots, "With --branch: list the sign changes only");
    spectrum->add_option("--reproduce", sa.reproduce, "table1");
    spectrum->add_option("--m", sa.m, "Order of the parabolic family");
    spectrum->add_option("--method", sa.method, "shooting | collocation");
    add_common(spectrum, common);

    SpectrumArgs ba;
    auto* branch = app.add_subcommand("branch", "Alias of spectrum --branch");
    branch->add_option("--range", ba.branch, "lo:hi:step")->required();
    branch->add_flag("--roots", ba.roots, "List the sign changes only");
    branch->add_option("--m", ba.m, "Order of the parabolic family");
    add_common(branch, common);

    BlayerArgs la;
    auto* blayer = app.add_subcommand("blayer", "Stationary wall-layer profile");
    blayer->add_option("--family", la.family, "heat | biharmonic | parabolic | dispersion3 | pme4");
    blayer->add_option("--m", la.m, "Order of the parabolic family");
    blayer->add_flag("--bvp", la.bvp, "Solve the boundary-value problem instead of the closed form");
    blayer->add_option("--L", la.L, "Truncation length");
    blayer->add_option("--samples", la.samples, "Output samples");
    add_common(blayer, common);

    CriterionArgs ca;
    auto* criterion = app.add_subcommand("criterion", "Regularity verdict for a boundary");
    criterion->add_option("--family", ca.family, "heat | biharmonic | parabolic | dispersion3");
    criterion->add_option("--m", ca.m, "Order of the parabolic family");
    criterion->add_option("--side", ca.side, "left | right (dispersion3)");
    criterion->add_option("--phi", ca.phi, "const:l | powerlog:C=..,g=.. | sqrtlog:C=.. | singlelog:C=..,g=.. | table:file")
        ->required();
    criterion->add_flag("--cutoff", ca.cutoff, "Apply the oscillatory cut-off");
    criterion->add_option("--cutoff-width", ca.width, "Smoothing width of the cut-off");
    add_common(criterion, common);

    SimulateArgs ma;
    auto* sim = app.add_subcommand("simulate", "Direct simulation of the rescaled problem");
    sim->add_option("--family", ma.family, "heat | biharmonic");
    sim->add_option("--phi", ma.phi, "Boundary, as for criterion");
    sim->add_flag("--cutoff", ma.cutoff, "Apply the oscillatory cut-off");
    sim->add_option("--n", ma.n, "Grid intervals on [-1, 1]");
    sim->add_option("--tau0", ma.tau0, "Initial tau");
    sim->add_option("--tau-end", ma.tau_end, "Final tau");
    sim->add_option("--init", ma.init, "polynomial | bump | random");
    sim->add_option("--seed", ma.seed, "Seed of random initial data");
    sim->add_option("--samples", ma.samples, "Trace samples");
    sim->add_option("--rtol", ma.rtol, "Local error tolerance");
    sim->add_option("--fit", ma.fit, "Rate fit window lo:hi");
    sim->add_option("--bl-check", ma.bl_check, "Compare the wall profile at this tau");
    sim->add_flag("--verify-P2", ma.verify_p2, "Run the l = 4 / l = 5 suite over three seeds");
    add_common(sim, common);

    std::string bundle;
    auto* reproduce = app.add_subcommand("reproduce", "Bundled reproductions");
    reproduce->add_option("bundle", bundle, "table1 | branch-roots | petrovskii-heat | critical-constants")->required();
    add_common(reproduce, common);

    try {
        app.parse(argc, argv);
        CLI::App* sub = app.get_subcommands().front();
        if (!common.config.empty()) {
            std::vector<std::string> args(argv + 1, argv + argc);
            const auto extra = config_args(common.config, sub);
            args.insert(args.end(), extra.begin(), extra.end());
            app.clear();
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        Artifact art;
        if (sub == kernel) art = cmd_kernel(ka);
        else if (sub == spectrum) art = cmd_spectrum(sa);
        else if (sub == branch) art = cmd_spectrum(ba);
        else if (sub == blayer) art = cmd_blayer(la);
        else if (sub == criterion) art = cmd_criterion(ca);
        else if (sub == sim) art = cmd_simulate(ma);
        else art = cmd_reproduce(bundle);
        emit(art, common.json, common.out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
