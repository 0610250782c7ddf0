#include "degenwave/harness.hpp"

#include "degenwave/amplitude.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/toymodel.hpp"
#include "degenwave/wavepacket.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace degenwave {

using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& key, const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (!v.empty() && (v.front() == '"' || v.back() == '"')) fail(ErrorCode::parse, "unbalanced quotes for '" + key + "'");
    return v;
}

double to_real(const std::string& key, const std::string& v) {
    const std::string t = unquote(key, trim(v));
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(t, &used);
    } catch (const std::exception&) {
        fail(ErrorCode::parse, "'" + key + "' expects a number, got '" + t + "'");
    }
    if (used != t.size() || !std::isfinite(x)) fail(ErrorCode::parse, "'" + key + "' expects a number, got '" + t + "'");
    return x;
}

std::size_t to_count(const std::string& key, const std::string& v) {
    const double x = to_real(key, v);
    if (x < 0 || x != std::floor(x) || x > 1e15) fail(ErrorCode::parse, "'" + key + "' expects a non-negative integer");
    return static_cast<std::size_t>(x);
}

// "auto" maps to 0.
std::size_t to_count_or_auto(const std::string& key, const std::string& v) {
    return unquote(key, trim(v)) == "auto" ? 0 : to_count(key, v);
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string t = unquote(key, trim(v));
    if (t == "true") return true;
    if (t == "false") return false;
    fail(ErrorCode::parse, "'" + key + "' expects true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::string t = trim(v);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']') fail(ErrorCode::parse, "unterminated list for '" + key + "'");
        t = t.substr(1, t.size() - 2);
    }
    std::vector<double> out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_real(key, item));
    }
    if (out.empty()) fail(ErrorCode::parse, "'" + key + "' needs at least one value");
    return out;
}

const char* const kParamKeys[] = {"delta0", "delta1", "eps", "c_x0", "Lambda", "T", "diss_threshold",
                                  "enforce_eps_window"};

// Shortest text that parses back to v.
std::string fmt(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::optional<Symbol> parse_upsilon(const ExperimentConfig& c) {
    if (c.upsilon.empty()) return std::nullopt;
    return Symbol::parse(c.upsilon);
}

struct Setup {
    Symbol gamma;
    std::optional<Symbol> upsilon;
    ShearProfile shear;
    AsymptoticParameters params;
};

Setup make_setup(const ExperimentConfig& c) {
    Symbol gamma = Symbol::parse(c.gamma);
    std::optional<Symbol> ups = parse_upsilon(c);
    ShearProfile shear = ShearProfile::parse(c.shear, c.kappa, ups);
    return {gamma, ups, shear, c.parameters()};
}

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const Error& e) {
        fail(e.code(), std::string(name) + ": " + e.what());
    }
}

std::vector<double> uniform_times(double t_end, std::size_t count) {
    std::vector<double> t(count + 1);
    for (std::size_t i = 0; i <= count; ++i) t[i] = t_end * static_cast<double>(i) / static_cast<double>(count);
    return t;
}

std::size_t next_power_of_two(double x) {
    std::size_t n = 1;
    while (static_cast<double>(n) < x) n <<= 1;
    return n;
}

Scheme parse_scheme(const std::string& s) {
    if (s == "rk4") return Scheme::rk4;
    if (s == "split") return Scheme::split;
    fail(ErrorCode::parse, "unknown scheme '" + s + "' (expected rk4 or split)");
}

void require_finite(const std::string& what, double v) {
    if (!std::isfinite(v)) fail(ErrorCode::internal, "report field '" + what + "' is not finite");
}

json plan_to_json(const GrowthPlan& p) {
    json j;
    j["gamma"] = p.gamma;
    j["upsilon"] = p.upsilon;
    j["lambda0"] = p.lambda0;
    j["M"] = p.M;
    j["tau_M"] = p.tau_M;
    j["eps"] = p.eps;
    j["eps_lower"] = p.eps_report.lower;
    j["eps_upper"] = p.eps_report.upper;
    j["t_star"] = p.t_star;
    j["t_M"] = p.t_M;
    j["admissible"] = p.admissible();
    json conds = json::array();
    for (const Condition& c : p.conditions) {
        conds.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass},
                         {"margin", c.margin}, {"note", c.note}});
    }
    j["conditions"] = conds;
    return j;
}

json verdicts_to_json(const std::vector<Verdict>& vs) {
    json out = json::array();
    for (const Verdict& v : vs) {
        require_finite(v.name, v.value);
        out.push_back({{"name", v.name}, {"value", v.value}, {"bound", v.bound}, {"pass", v.pass}});
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::io, "cannot create '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) fail(ErrorCode::io, "failed writing '" + path.string() + "'");
}

std::string point_dir(double lambda0) {
    std::ostringstream os;
    os << "lambda0_" << lambda0;
    return os.str();
}

// Pipeline at fixed grid size and snapshot count.
PointReport run_point_at(const ExperimentConfig& config, double lambda0, std::size_t n, std::size_t snapshots) {
    const Setup setup = stage("config", [&] { return make_setup(config); });
    PointReport rep;
    rep.lambda0 = lambda0;
    rep.window = config.window;
    rep.resolution = n;
    rep.snapshots = snapshots;
    rep.rays = config.rays;
    rep.plan = stage("plan", [&] {
        return make_plan(setup.gamma, setup.upsilon, setup.shear, setup.params, lambda0, config.M);
    });
    const GrowthPlan& plan = rep.plan;
    if (!(plan.t_star > 0)) fail(ErrorCode::configuration, "plan: t_star must be positive");
    const std::vector<double> times = uniform_times(plan.t_star, snapshots);
    const WindowSpec window = stage("config", [&] { return WindowSpec::parse(config.window); });
    FanOptions fan_opts;
    fan_opts.rays = config.rays;

    const PhaseField fan = stage("phase", [&] {
        return build_phase(setup.gamma, setup.shear, setup.params, lambda0, plan.eps, window, times, fan_opts);
    });
    rep.omega = lambda0 * fan.E;
    rep.lambda_t = fan.lambda_t;
    rep.mu = fan.mu;
    rep.ray = ray_diagnostics(setup.gamma, fan, std::min(plan.t_M, plan.t_star));
    const AmplitudeField af = stage("amplitude", [&] { return evolve_amplitude(fan, plan.t_star); });
    rep.l2_budget = l2_budget(af, fan);

    std::vector<WavePacket> packets(times.size());
    stage("packet", [&] { parallel_for(times.size(), [&](std::size_t j) { packets[j] = packet_at(fan, af, j, n); }); });

    const LinearOperator op(setup.gamma, setup.shear, lambda0, n, setup.shear.kappa() > 0);
    rep.residual = stage("residual", [&] { return residual(packets, op, rep.omega, true); });
    rep.probe = stage("probe", [&] {
        return commutator_norm_probe(setup.shear, setup.gamma, lambda0, n, 0.0, config.seed);
    });
    DualityParams dp;
    dp.s_prime = config.s_prime;
    dp.s = config.s;
    dp.M = config.M;
    dp.scheme = parse_scheme(config.scheme);
    dp.cfl_safety = config.cfl_safety;
    dp.energy_constant = config.energy_factor * rep.probe.norm;
    rep.duality = stage("evolve", [&] { return duality_experiment(packets, op, dp); });
    rep.growth_threshold = 0.25 * rep.duality.predicted_growth;
    packets.clear();

    // Degeneration of the main part between 0 and t_M.
    rep.degeneration_t = std::min(plan.t_M, plan.t_star);
    rep.degeneration_bound = 1.0 / std::sqrt(config.M);
    stage("degeneration", [&] {
        const PhaseField pair = build_phase(setup.gamma, setup.shear, setup.params, lambda0, plan.eps, window,
                                            {0.0, rep.degeneration_t}, fan_opts);
        const AmplitudeField a2 = evolve_amplitude(pair, rep.degeneration_t);
        double norms[2];
        for (std::size_t j = 0; j < 2; ++j) {
            const WavePacket wp = packet_at(pair, a2, j, n);
            norms[j] = weighted_norm(decompose(wp.psi, wp.mu_t).main, -1.0, 0.0, setup.gamma, lambda0);
        }
        if (!(norms[0] > 0)) fail(ErrorCode::resolution, "main part of the initial packet vanishes");
        rep.degeneration_ratio = norms[1] / norms[0];
    });

    double ledger = 0.0;
    for (std::size_t k = 0; k < rep.duality.norm.size(); ++k)
        ledger = std::max(ledger, rep.duality.norm[k] / rep.duality.ledger_bound[k]);
    rep.verdicts.push_back({"energy_ledger", ledger, 1.0, rep.duality.ledger_ok});
    rep.verdicts.push_back({"pairing", rep.duality.pairing_final, rep.duality.pairing_threshold,
                            rep.duality.pairing_final >= rep.duality.pairing_threshold});
    rep.verdicts.push_back({"growth", rep.duality.growth_ratio, rep.growth_threshold,
                            rep.duality.growth_ratio >= rep.growth_threshold});
    rep.verdicts.push_back({"degeneration", rep.degeneration_ratio, rep.degeneration_bound,
                            rep.degeneration_ratio <= rep.degeneration_bound});
    return rep;
}

json point_to_json(const PointReport& p) {
    json j;
    j["lambda0"] = p.lambda0;
    j["plan"] = plan_to_json(p.plan);
    j["window"] = p.window;
    j["resolution"] = p.resolution;
    j["snapshots"] = p.snapshots;
    j["rays"] = p.rays;
    j["omega"] = p.omega;
    j["ray"] = {{"max_abs_h", p.ray.max_abs_h},
                {"hamiltonian_drift", p.ray.hamiltonian_drift},
                {"sandwich_min", p.ray.sandwich_min},
                {"sandwich_max", p.ray.sandwich_max},
                {"position_min", p.ray.position_min},
                {"position_max", p.ray.position_max},
                {"position_factor", p.ray.position_factor},
                {"samples", p.ray.samples}};
    double cadence = 0.0;
    for (std::size_t i = 0; i < p.residual.norm.size(); ++i)
        if (p.residual.norm[i] > 0) cadence = std::max(cadence, p.residual.cadence_error[i] / p.residual.norm[i]);
    j["residual"] = {{"integral", p.residual.integral},
                     {"damping_integral", p.residual.damping_integral},
                     {"max_cadence_ratio", cadence}};
    j["probe"] = {{"norm", p.probe.norm}, {"iterations", p.probe.iterations}, {"converged", p.probe.converged}};
    const DualityReport& d = p.duality;
    j["duality"] = {{"pairing_initial", d.pairing_initial},
                    {"pairing_final", d.pairing_final},
                    {"pairing_threshold", d.pairing_threshold},
                    {"main_pairing", d.main_pairing},
                    {"small_correction", d.small_correction},
                    {"hsprime_lower_bound", d.hsprime_lower_bound},
                    {"initial_hsprime", d.initial_hsprime},
                    {"growth_ratio", d.growth_ratio},
                    {"predicted_growth", d.predicted_growth},
                    {"gamma_ratio", d.gamma_ratio},
                    {"growth_threshold", p.growth_threshold},
                    {"ledger_ok", d.ledger_ok},
                    {"steps", d.steps}};
    j["degeneration"] = {{"t", p.degeneration_t}, {"ratio", p.degeneration_ratio}, {"bound", p.degeneration_bound}};
    j["series"] = {{"t", p.residual.t}, {"residual", p.residual.norm}, {"pairing", d.pairing}};
    j["verdicts"] = verdicts_to_json(p.verdicts);
    j["pass"] = p.pass();
    for (const auto& [key, value] : j["duality"].items())
        if (value.is_number_float()) require_finite("duality." + key, value.get<double>());
    require_finite("residual.integral", p.residual.integral);
    return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig c;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected key = value");
        c.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "gamma") gamma = unquote(key, value);
    else if (key == "upsilon") upsilon = unquote(key, value);
    else if (key == "shear") shear = unquote(key, value);
    else if (key == "kappa") kappa = to_real(key, value);
    else if (key == "lambda0") lambda0 = to_list(key, value);
    else if (key == "M") M = to_real(key, value);
    else if (key == "s") s = to_real(key, value);
    else if (key == "s_prime") s_prime = to_real(key, value);
    else if (key == "sigma") sigma = to_real(key, value);
    else if (key == "window") window = unquote(key, value);
    else if (key == "resolution") resolution = to_count_or_auto(key, value);
    else if (key == "max_resolution") max_resolution = to_count(key, value);
    else if (key == "snapshots") snapshots = to_count_or_auto(key, value);
    else if (key == "max_snapshots") max_snapshots = to_count(key, value);
    else if (key == "rays") rays = to_count(key, value);
    else if (key == "scheme") scheme = unquote(key, value);
    else if (key == "cfl_safety") cfl_safety = to_real(key, value);
    else if (key == "energy_factor") energy_factor = to_real(key, value);
    else if (key == "seed") seed = to_count(key, value);
    else if (key == "output") output = unquote(key, value);
    else if (key == "write_snapshots") write_snapshots = to_bool(key, value);
    else if (key == "toy_points") toy_points = to_count(key, value);
    else if (key == "toy_samples") toy_samples = to_count(key, value);
    else if (key == "toy_T") toy_T = to_real(key, value);
    else if (key == "params.eps_mode") eps_mode = unquote(key, value);
    else if (key.rfind("params.", 0) == 0) {
        const std::string name = key.substr(7);
        if (std::find(std::begin(kParamKeys), std::end(kParamKeys), name) == std::end(kParamKeys))
            fail(ErrorCode::parse, "unknown parameter override '" + key + "'");
        overrides[name] = to_real(key, value);
    } else {
        fail(ErrorCode::parse, "unknown config key '" + key + "'");
    }
}

AsymptoticParameters ExperimentConfig::parameters() const {
    AsymptoticParameters p;
    p.sigma0 = sigma;
    for (const auto& [name, v] : overrides) {
        if (name == "delta0") p.delta0 = v;
        else if (name == "delta1") p.delta1 = v;
        else if (name == "eps") p.eps_fixed = v;
        else if (name == "c_x0") p.c_x0 = v;
        else if (name == "Lambda") p.Lambda = v;
        else if (name == "T") p.T = v;
        else if (name == "diss_threshold") p.diss_threshold = v;
        else if (name == "enforce_eps_window") p.enforce_eps_window = v != 0.0;
    }
    if (eps_mode == "fixed") p.eps_mode = EpsMode::fixed;
    else if (eps_mode == "theory") p.eps_mode = EpsMode::theory;
    else fail(ErrorCode::parse, "params.eps_mode must be fixed or theory");
    const Symbol g = Symbol::parse(gamma);
    const std::optional<Symbol> u = parse_upsilon(*this);
    p.derive(g.beta0(), u ? u->beta0() : 0.0, s, s_prime);
    return p;
}

void ExperimentConfig::validate() const {
    const Setup setup = make_setup(*this);
    setup.params.validate();
    WindowSpec::parse(window);
    parse_scheme(scheme);
    if (lambda0.empty()) fail(ErrorCode::configuration, "lambda0 list is empty");
    for (std::size_t i = 0; i < lambda0.size(); ++i) {
        if (!(lambda0[i] > 0)) fail(ErrorCode::configuration, "lambda0 values must be positive");
        if (lambda0[i] != std::round(lambda0[i])) fail(ErrorCode::configuration, "lambda0 values must be integers");
        if (i > 0 && !(lambda0[i] > lambda0[i - 1]))
            fail(ErrorCode::configuration, "lambda0 list must be sorted ascending");
    }
    if (!(M >= 1)) fail(ErrorCode::configuration, "M must be at least 1");
    if (resolution != 0 && !is_power_of_two(resolution))
        fail(ErrorCode::configuration, "resolution must be a power of two");
    if (!is_power_of_two(max_resolution)) fail(ErrorCode::configuration, "max_resolution must be a power of two");
    if (snapshots != 0 && snapshots < 4) fail(ErrorCode::configuration, "snapshots must be at least 4");
    if (rays < 3) fail(ErrorCode::configuration, "rays must be at least 3");
    if (!(cfl_safety > 0 && cfl_safety <= 1)) fail(ErrorCode::configuration, "cfl_safety must lie in (0, 1]");
    if (!(energy_factor >= 1)) fail(ErrorCode::configuration, "energy_factor must be at least 1");
    if (kappa < 0) fail(ErrorCode::configuration, "kappa must be non-negative");
    if (kappa > 0 && upsilon.empty()) fail(ErrorCode::configuration, "kappa > 0 needs an upsilon symbol");
    if (toy_points < 16 || toy_samples < 2) fail(ErrorCode::configuration, "toy grid too small");
    if (toy_T < 0) fail(ErrorCode::configuration, "toy_T must be non-negative");
}

std::string ExperimentConfig::str() const {
    std::ostringstream os;
    os << "gamma = " << quoted(gamma) << "\n";
    if (!upsilon.empty()) os << "upsilon = " << quoted(upsilon) << "\n";
    os << "shear = " << quoted(shear) << "\n";
    os << "kappa = " << fmt(kappa) << "\n";
    os << "lambda0 = [";
    for (std::size_t i = 0; i < lambda0.size(); ++i) os << (i ? ", " : "") << fmt(lambda0[i]);
    os << "]\n";
    os << "M = " << fmt(M) << "\ns = " << fmt(s) << "\ns_prime = " << fmt(s_prime) << "\n";
    os << "sigma = " << fmt(sigma) << "\n";
    os << "params.eps_mode = " << quoted(eps_mode) << "\n";
    for (const auto& [k, v] : overrides) os << "params." << k << " = " << fmt(v) << "\n";
    os << "window = " << quoted(window) << "\n";
    os << "resolution = " << (resolution ? std::to_string(resolution) : quoted("auto")) << "\n";
    os << "max_resolution = " << max_resolution << "\n";
    os << "snapshots = " << (snapshots ? std::to_string(snapshots) : quoted("auto")) << "\n";
    os << "max_snapshots = " << max_snapshots << "\n";
    os << "rays = " << rays << "\n";
    os << "scheme = " << quoted(scheme) << "\n";
    os << "cfl_safety = " << fmt(cfl_safety) << "\n";
    os << "energy_factor = " << fmt(energy_factor) << "\n";
    os << "seed = " << seed << "\n";
    if (!output.empty()) os << "output = " << quoted(output) << "\n";
    os << "write_snapshots = " << (write_snapshots ? "true" : "false") << "\n";
    os << "toy_points = " << toy_points << "\ntoy_samples = " << toy_samples << "\n";
    if (toy_T > 0) os << "toy_T = " << fmt(toy_T) << "\n";
    return os.str();
}

RayDiagnostics ray_diagnostics(const Symbol& gamma, const PhaseField& fan, double t_M) {
    RayDiagnostics d;
    d.sandwich_min = d.position_min = std::numeric_limits<double>::infinity();
    d.position_factor = std::pow(2.0, gamma.beta0() + 1.0);
    const double lambda0 = fan.lambda0;
    const double g0 = gamma(lambda0, lambda0);
    for (std::size_t j = 0; j < fan.t.size(); ++j) {
        if (fan.t[j] > t_M * (1.0 + 1e-12)) break;
        ++d.samples;
        const double lam = fan.lambda_t[j];
        const double shrink = g0 / gamma(lambda0, lam);
        for (const Bicharacteristic& r : fan.rays) {
            d.max_abs_h = std::max(d.max_abs_h, std::abs(r.h[j]));
            const double H0 = r.hamiltonian[0];
            d.hamiltonian_drift = std::max(d.hamiltonian_drift, std::abs(r.hamiltonian[j] - H0) / std::abs(H0));
            const double q = r.Xi[j] / lam;
            d.sandwich_min = std::min(d.sandwich_min, q);
            d.sandwich_max = std::max(d.sandwich_max, q);
            const double pos = r.X[j] / (r.X[0] * shrink);
            d.position_min = std::min(d.position_min, pos);
            d.position_max = std::max(d.position_max, pos);
        }
    }
    if (d.samples == 0) fail(ErrorCode::input_domain, "no fan samples before t_M");
    return d;
}

bool ray_checks_pass(const RayDiagnostics& d, bool steady) {
    const bool sandwich = d.sandwich_min >= 1.0 - kSandwichSlack && d.sandwich_max <= 2.0 + kSandwichSlack;
    if (!steady) return sandwich;
    const bool position = d.position_min >= 1.0 / d.position_factor && d.position_max <= d.position_factor;
    return sandwich && position && d.max_abs_h < kSteadyHTolerance && d.hamiltonian_drift < kHamiltonianTolerance;
}

bool PointReport::pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

bool SweepReport::pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; }) &&
           std::all_of(points.begin(), points.end(), [](const PointReport& p) { return p.pass(); });
}

PointReport run_point(const ExperimentConfig& config, double lambda0) {
    const auto start = std::chrono::steady_clock::now();
    std::size_t n = config.resolution ? config.resolution
                                      : std::max<std::size_t>(2048, next_power_of_two(8.0 * config.M * lambda0));
    n = std::min(n, config.max_resolution);
    std::size_t k = config.snapshots ? config.snapshots
                                     : std::max<std::size_t>(256, static_cast<std::size_t>(std::lround(8.0 * lambda0)));
    for (;;) {
        try {
            PointReport rep = run_point_at(config, lambda0, n, k);
            rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return rep;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::resolution && config.resolution == 0 && 2 * n <= config.max_resolution) {
                n *= 2;
                continue;
            }
            if (e.code() == ErrorCode::cadence && config.snapshots == 0 && 2 * k <= config.max_snapshots) {
                k *= 2;
                continue;
            }
            throw;
        }
    }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::input_domain, "slope fit needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0 && y[i] > 0)) fail(ErrorCode::input_domain, "slope fit needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepReport run(const ExperimentConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    SweepReport rep;
    rep.config = config;
    rep.points.resize(config.lambda0.size());
    parallel_for(config.lambda0.size(), [&](std::size_t i) { rep.points[i] = run_point(config, config.lambda0[i]); });
    if (rep.points.size() >= 2) {
        std::vector<double> lam, integral, growth;
        for (const PointReport& p : rep.points) {
            lam.push_back(p.lambda0);
            integral.push_back(p.residual.integral);
            growth.push_back(p.duality.growth_ratio);
        }
        double worst_drop = 0.0, worst_rise = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < lam.size(); ++i) {
            worst_drop = std::max(worst_drop, integral[i] / integral[i - 1]);
            worst_rise = std::min(worst_rise, growth[i] - growth[i - 1]);
        }
        rep.residual_slope = loglog_slope(lam, integral);
        rep.verdicts.push_back({"residual_decreasing", worst_drop, 1.0, worst_drop < 1.0});
        rep.verdicts.push_back({"residual_slope", rep.residual_slope, -0.2, rep.residual_slope <= -0.2});
        rep.verdicts.push_back({"growth_increasing", worst_rise, 0.0, worst_rise > 0.0});
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!config.output.empty()) {
        const std::filesystem::path root(config.output);
        write_file(root / "report.json", report_json(rep));
        write_file(root / "timing.json", timing_json(rep));
        for (const PointReport& p : rep.points) write_file(root / point_dir(p.lambda0) / "series.csv", series_csv(p));
    }
    return rep;
}

std::string report_json(const SweepReport& report) {
    json j;
    j["config"] = report.config.str();
    json pts = json::array();
    for (const PointReport& p : report.points) pts.push_back(point_to_json(p));
    j["points"] = pts;
    j["residual_slope"] = report.residual_slope;
    j["verdicts"] = verdicts_to_json(report.verdicts);
    j["pass"] = report.pass();
    return j.dump(2) + "\n";
}

std::string timing_json(const SweepReport& report) {
    json j;
    j["total_seconds"] = report.seconds;
    json pts = json::array();
    for (const PointReport& p : report.points) pts.push_back({{"lambda0", p.lambda0}, {"seconds", p.seconds}});
    j["points"] = pts;
    return j.dump(2) + "\n";
}

std::string series_csv(const PointReport& p) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "t,lambda_t,mu,l2_budget,residual,cadence_error,localized,damping,pairing,norm,packet_norm,ledger_bound\n";
    const std::size_t m = p.residual.t.size();
    for (std::size_t i = 0; i < m; ++i) {
        os << p.residual.t[i] << ',' << p.lambda_t[i] << ',' << p.mu[i] << ',' << p.l2_budget[i] << ','
           << p.residual.norm[i] << ',' << p.residual.cadence_error[i] << ',' << p.residual.localized[i] << ','
           << p.residual.damping_norm[i] << ',' << p.duality.pairing[i] << ',' << p.duality.norm[i] << ','
           << p.duality.packet_norm[i] << ',' << p.duality.ledger_bound[i] << '\n';
    }
    return os.str();
}

std::string plan_json(const ExperimentConfig& config) {
    config.validate();
    const Setup setup = make_setup(config);
    json plans = json::array();
    bool pass = true;
    for (double l : config.lambda0) {
        const GrowthPlan p = stage("plan", [&] {
            return make_plan(setup.gamma, setup.upsilon, setup.shear, setup.params, l, config.M);
        });
        pass = pass && p.admissible();
        plans.push_back(plan_to_json(p));
    }
    json out;
    out["config"] = config.str();
    out["plans"] = plans;
    out["pass"] = pass;
    return out.dump(2) + "\n";
}

ExperimentConfig config_from_plan_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("plan document: ") + e.what());
    }
    if (!j.is_object() || !j.contains("config") || !j["config"].is_string())
        fail(ErrorCode::parse, "plan document has no config string");
    return ExperimentConfig::parse(j["config"].get<std::string>());
}

std::string toy_json(const ExperimentConfig& config) {
    config.validate();
    const Setup setup = make_setup(config);
    json points = json::array();
    bool pass = true;
    for (double l : config.lambda0) {
        std::vector<double> grid;
        std::vector<cplx> data;
        toy_gaussian_data(l, config.toy_points, grid, data);
        const double t_end = config.toy_T > 0 ? config.toy_T : toy_travel_time(setup.gamma, l, l, config.M * l);
        std::vector<ToyState> states;
        for (double t : uniform_times(t_end, config.toy_samples - 1)) {
            if (setup.upsilon && config.kappa > 0)
                states.push_back(toy_solve_dissipative(setup.gamma, {*setup.upsilon, config.kappa}, l, grid, data, t));
            else
                states.push_back(toy_solve(setup.gamma, l, grid, data, t));
        }
        const double e0 = toy_energy(setup.gamma, states.front());
        double drift = 0.0;
        json rows = json::array();
        const ToyReport hs = hs_growth_report(setup.gamma, states, config.s, config.s_prime, 0.0);
        for (std::size_t i = 0; i < states.size(); ++i) {
            const double e = toy_energy(setup.gamma, states[i]);
            drift = std::max(drift, std::abs(e / e0 - 1.0));
            const ToyReportRow& r = hs.rows[i];
            rows.push_back({{"t", r.t}, {"xi_peak", r.xi_peak}, {"energy", e}, {"l2", r.l2}, {"hs", r.hs},
                            {"hs_prime", r.hs_prime}, {"ratio", r.ratio}, {"ratio_sharp", r.ratio_sharp},
                            {"measured_growth", r.measured_growth}});
        }
        const bool ok = drift < kToyDriftTolerance;
        pass = pass && ok;
        points.push_back({{"lambda0", l}, {"t_end", t_end}, {"energy_drift", drift}, {"pass", ok}, {"rows", rows}});
    }
    json out;
    out["points"] = points;
    out["pass"] = pass;
    return out.dump(2) + "\n";
}

std::string toy_csv(const ExperimentConfig& config) {
    const json doc = json::parse(toy_json(config));
    std::ostringstream os;
    os << std::setprecision(17) << "lambda0,t,xi_peak,l2,hs,ratio\n";
    for (const json& p : doc["points"])
        for (const json& r : p["rows"])
            os << p["lambda0"].get<double>() << ',' << r["t"].get<double>() << ',' << r["xi_peak"].get<double>()
               << ',' << r["l2"].get<double>() << ',' << r["hs"].get<double>() << ',' << r["ratio"].get<double>()
               << '\n';
    return os.str();
}

std::string phase_json(const ExperimentConfig& config) {
    config.validate();
    const Setup setup = make_setup(config);
    const WindowSpec window = WindowSpec::parse(config.window);
    FanOptions opts;
    opts.rays = config.rays;
    json points = json::array();
    bool pass = true;
    for (double l : config.lambda0) {
        const GrowthPlan plan = stage("plan", [&] {
            return make_plan(setup.gamma, setup.upsilon, setup.shear, setup.params, l, config.M);
        });
        const std::size_t k = config.snapshots ? config.snapshots : 256;
        const PhaseField fan = stage("phase", [&] {
            return build_phase(setup.gamma, setup.shear, setup.params, l, plan.eps, window,
                               uniform_times(plan.t_star, k), opts);
        });
        const RayDiagnostics d = ray_diagnostics(setup.gamma, fan, std::min(plan.t_M, plan.t_star));
        const bool ok = ray_checks_pass(d, setup.shear.steady());
        pass = pass && ok;
        points.push_back({{"lambda0", l},
                       {"E", fan.E},
                       {"window", {fan.window.x0, fan.window.x0p, fan.window.x1p, fan.window.x1}},
                       {"t_star", plan.t_star},
                       {"t_M", plan.t_M},
                       {"max_abs_h", d.max_abs_h},
                       {"hamiltonian_drift", d.hamiltonian_drift},
                       {"sandwich", {d.sandwich_min, d.sandwich_max}},
                       {"position", {d.position_min, d.position_max}},
                       {"position_factor", d.position_factor},
                       {"pass", ok}});
        if (!config.output.empty()) {
            const Bicharacteristic& r = fan.rays[fan.mid_ray()];
            std::ostringstream os;
            os << std::setprecision(17) << "t,X,Xi,h,I,hamiltonian,phi,log_amp,log_jacobian,lambda_t,mu\n";
            for (std::size_t j = 0; j < fan.t.size(); ++j)
                os << fan.t[j] << ',' << r.X[j] << ',' << r.Xi[j] << ',' << r.h[j] << ',' << r.I[j] << ','
                   << r.hamiltonian[j] << ',' << r.phi[j] << ',' << r.log_amp[j] << ',' << r.log_jacobian[j] << ','
                   << fan.lambda_t[j] << ',' << fan.mu[j] << '\n';
            write_file(std::filesystem::path(config.output) / point_dir(l) / "rays.csv", os.str());
        }
    }
    json out;
    out["points"] = points;
    out["pass"] = pass;
    return out.dump(2) + "\n";
}

std::string packet_json(const ExperimentConfig& config) {
    config.validate();
    const Setup setup = make_setup(config);
    const WindowSpec window = WindowSpec::parse(config.window);
    FanOptions opts;
    opts.rays = config.rays;
    json points = json::array();
    for (double l : config.lambda0) {
        const GrowthPlan plan = stage("plan", [&] {
            return make_plan(setup.gamma, setup.upsilon, setup.shear, setup.params, l, config.M);
        });
        const PhaseField fan = stage("phase", [&] {
            return build_phase(setup.gamma, setup.shear, setup.params, l, plan.eps, window, {0.0, plan.t_star}, opts);
        });
        const AmplitudeField af = evolve_amplitude(fan, plan.t_star);
        const std::size_t n = config.resolution ? config.resolution
                                                : std::max<std::size_t>(2048, next_power_of_two(8.0 * config.M * l));
        json snaps = json::array();
        for (std::size_t j = 0; j < 2; ++j) {
            const WavePacket wp = stage("packet", [&] { return packet_at(fan, af, j, n); });
            const std::vector<cplx> c = coefficients(wp.psi);
            snaps.push_back({{"t", wp.t},
                             {"norm", kPacketNormFactor * l2_norm(wp.psi)},
                             {"centroid", spectral_centroid(wp.psi)},
                             {"lambda_t", wp.lambda_t},
                             {"mu_t", wp.mu_t},
                             {"top_band_fraction", top_band_fraction(c)},
                             {"support", {wp.image_x0p, wp.image_x1p}}});
            if (!config.output.empty()) {
                const auto path = std::filesystem::path(config.output) / point_dir(l) /
                                  (j == 0 ? "packet_initial.dwpk" : "packet_final.dwpk");
                std::filesystem::create_directories(path.parent_path());
                write_snapshot(path.string(), wp);
            }
        }
        points.push_back({{"lambda0", l}, {"resolution", n}, {"snapshots", snaps}});
    }
    json out;
    out["points"] = points;
    out["pass"] = true;
    return out.dump(2) + "\n";
}

std::string validate_symbol_json(const std::string& spec) {
    const Symbol sym = Symbol::parse(spec);
    const ValidationReport r = validate_assumptions(sym);
    json j;
    j["symbol"] = r.symbol;
    j["beta0_declared"] = r.beta0_declared;
    j["beta0_measured"] = r.beta0_measured;
    j["slow_variance_ok"] = r.slow_variance_ok;
    j["growth_min_ratio"] = r.growth_min_ratio;
    j["growth_ok"] = r.growth_ok;
    j["assumption3_constant"] = r.assumption3_constant;
    j["assumption3_positive"] = r.assumption3_positive;
    j["assumption4_min_ratio"] = r.assumption4_min_ratio;
    j["assumption4_ok"] = r.assumption4_ok;
    j["samples"] = r.samples;
    j["all_ok"] = r.all_ok();
    j["pass"] = r.all_ok();
    return j.dump(2) + "\n";
}

}  // namespace degenwave
