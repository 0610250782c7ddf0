#include "degenwave/degenwave_c.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct CliError {
    int status;
    std::string message;
};

void check(int status) {
    if (status != DW_OK) throw CliError{status, dw_last_error()};
}

// Owns one string returned by the C API.
std::string take(char* s) {
    std::string out(s ? s : "");
    dw_string_free(s);
    return out;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{DW_E_IO, "cannot open '" + path + "'"};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f || !(f << text)) throw CliError{DW_E_IO, "cannot write '" + out + "'"};
}

bool document_pass(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.is_array()) {
        for (const auto& e : j)
            if (!e.value("pass", true)) return false;
        return true;
    }
    return j.value("pass", false);
}

class Config {
public:
    Config() { check(dw_config_new(&h_)); }
    ~Config() { dw_config_free(h_); }
    Config(const Config&) = delete;
    Config& operator=(const Config&) = delete;

    void replace(dw_config* h) {
        dw_config_free(h_);
        h_ = h;
    }
    void set(const std::string& key, const std::string& value) { check(dw_config_set(h_, key.c_str(), value.c_str())); }
    dw_config* get() const { return h_; }

private:
    dw_config* h_ = nullptr;
};

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string number_list(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ']';
    return os.str();
}

std::string number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Options shared by the config-driven subcommands. Precedence: --plan or --config,
// then the named flags, then --set assignments.
struct RunOptions {
    std::string config_path;
    std::string plan_path;
    std::vector<std::string> assignments;
    std::optional<std::string> gamma, upsilon, shear, window, scheme;
    std::optional<double> kappa, M, s, s_prime, T;
    std::vector<double> lambda0;
    std::optional<std::size_t> t_samples, resolution, rays;
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    std::string out;

    void attach(CLI::App* app) {
        CLI::Option* config_opt =
            app->add_option("-c,--config", config_path, "Config file (flat TOML subset)")->check(CLI::ExistingFile);
        app->add_option("--plan", plan_path, "Plan JSON written by 'degenwave plan'")
            ->check(CLI::ExistingFile)
            ->excludes(config_opt);
        app->add_option("--set", assignments, "Config assignment key=value (repeatable)");
        app->add_option("--gamma", gamma, "Multiplier symbol, e.g. power:1");
        app->add_option("--upsilon", upsilon, "Dissipation symbol, e.g. power:0.5");
        app->add_option("--kappa", kappa, "Dissipation strength");
        app->add_option("--shear", shear, "Shear profile, e.g. cos:1");
        app->add_option("--lambda0", lambda0, "Base frequencies (ascending)");
        app->add_option("--M", M, "Frequency growth factor");
        app->add_option("--s", s, "Sobolev exponent s");
        app->add_option("--s-prime", s_prime, "Sobolev exponent s'");
        app->add_option("--T", T, "Toy-model horizon");
        app->add_option("--t-samples", t_samples, "Snapshot count on [0, t_star]");
        app->add_option("--resolution", resolution, "Grid size (power of two)");
        app->add_option("--rays", rays, "Fan size");
        app->add_option("--window", window, "Packet window, e.g. span:0.85,1.75");
        app->add_option("--scheme", scheme, "Time stepper: rk4 or split");
        app->add_option("--seed", seed, "Seed for randomized probes");
        app->add_option("--output-dir", output_dir, "Directory for series, snapshots and reports");
        app->add_option("-o,--out", out, "Write the document to this file instead of stdout");
    }

    void apply(Config& cfg) const {
        if (!plan_path.empty()) {
            dw_config* h = nullptr;
            check(dw_config_from_plan(read_text(plan_path).c_str(), &h));
            cfg.replace(h);
        } else if (!config_path.empty()) {
            dw_config* h = nullptr;
            check(dw_config_load(config_path.c_str(), &h));
            cfg.replace(h);
        }
        if (gamma) cfg.set("gamma", quote(*gamma));
        if (upsilon) cfg.set("upsilon", quote(*upsilon));
        if (kappa) cfg.set("kappa", number(*kappa));
        if (shear) cfg.set("shear", quote(*shear));
        if (!lambda0.empty()) cfg.set("lambda0", number_list(lambda0));
        if (M) cfg.set("M", number(*M));
        if (s) cfg.set("s", number(*s));
        if (s_prime) cfg.set("s_prime", number(*s_prime));
        if (T) cfg.set("toy_T", number(*T));
        if (t_samples) cfg.set("snapshots", std::to_string(*t_samples));
        if (resolution) cfg.set("resolution", std::to_string(*resolution));
        if (rays) cfg.set("rays", std::to_string(*rays));
        if (window) cfg.set("window", quote(*window));
        if (scheme) cfg.set("scheme", quote(*scheme));
        if (seed) cfg.set("seed", std::to_string(*seed));
        if (!output_dir.empty()) cfg.set("output", quote(output_dir));
        for (const std::string& a : assignments) {
            const auto eq = a.find('=');
            if (eq == std::string::npos) throw CliError{DW_E_PARSE, "--set expects key=value, got '" + a + "'"};
            cfg.set(a.substr(0, eq), a.substr(eq + 1));
        }
        check(dw_config_validate(cfg.get()));
    }
};

using DocumentFn = int (*)(const dw_config*, char**);

int run_document(const RunOptions& opts, DocumentFn fn) {
    Config cfg;
    opts.apply(cfg);
    char* s = nullptr;
    check(fn(cfg.get(), &s));
    const std::string doc = take(s);
    emit(doc, opts.out);
    return document_pass(doc) ? 0 : kExitFail;
}

int run_toy(const RunOptions& opts, bool csv) {
    Config cfg;
    opts.apply(cfg);
    char* s = nullptr;
    check(dw_toy_json(cfg.get(), &s));
    const std::string doc = take(s);
    if (csv) {
        check(dw_toy_csv(cfg.get(), &s));
        emit(take(s), opts.out);
    } else {
        emit(doc, opts.out);
    }
    return document_pass(doc) ? 0 : kExitFail;
}

int run_pipeline(const RunOptions& opts, bool single) {
    Config cfg;
    opts.apply(cfg);
    if (single) {
        char* plan = nullptr;
        check(dw_plan_json(cfg.get(), &plan));
        const auto j = nlohmann::json::parse(take(plan));
        cfg.set("lambda0", number_list({j["plans"][0]["lambda0"].get<double>()}));
    }
    dw_report* rep = nullptr;
    check(dw_run(cfg.get(), &rep));
    char* s = nullptr;
    int pass = 0;
    const int st = dw_report_json(rep, &s);
    const int pass_st = dw_report_pass(rep, &pass);
    dw_report_free(rep);
    check(st);
    check(pass_st);
    emit(take(s), opts.out);
    return pass ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"degenwave: degenerate-shear illposedness experiments"};
    app.require_subcommand(1);

    RunOptions plan_opts, toy_opts, phase_opts, packet_opts, evolve_opts, sweep_opts;
    bool toy_csv = false;
    std::string table_path, table_out, symbol_spec, symbol_out;

    plan_opts.attach(app.add_subcommand("plan", "Growth plan and condition margins per lambda0 (JSON)"));
    CLI::App* toy = app.add_subcommand("toy", "Fourier-side toy model: energy drift and norm growth");
    toy_opts.attach(toy);
    toy->add_flag("--csv", toy_csv, "Emit CSV rows (lambda0, t, xi_peak, l2, hs, ratio)");
    phase_opts.attach(app.add_subcommand("phase", "Bicharacteristic fan diagnostics; rays.csv under --output-dir"));
    packet_opts.attach(app.add_subcommand("packet", "Wave packets at t = 0 and t_star; snapshots under --output-dir"));
    evolve_opts.attach(app.add_subcommand("evolve", "Full pipeline at the first lambda0 (report JSON)"));
    sweep_opts.attach(app.add_subcommand("sweep", "Full pipeline over the lambda0 list plus sweep verdicts"));
    CLI::App* table = app.add_subcommand("table-check", "Instability verdicts from the regularity tables");
    table->add_option("queries", table_path, "File with lines '<gamma> <upsilon|-> <s> <s'>' ('-' for stdin)")
        ->required();
    table->add_option("-o,--out", table_out, "Write the verdicts to this file");
    CLI::App* validate = app.add_subcommand("validate-symbol", "Sampled assumption checks for one symbol");
    validate->add_option("spec", symbol_spec, "Symbol spec, e.g. log:1")->required();
    validate->add_option("-o,--out", symbol_out, "Write the report to this file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("plan")) return run_document(plan_opts, dw_plan_json);
        if (app.got_subcommand("toy")) return run_toy(toy_opts, toy_csv);
        if (app.got_subcommand("phase")) return run_document(phase_opts, dw_phase_json);
        if (app.got_subcommand("packet")) return run_document(packet_opts, dw_packet_json);
        if (app.got_subcommand("evolve")) return run_pipeline(evolve_opts, true);
        if (app.got_subcommand("sweep")) return run_pipeline(sweep_opts, false);
        if (app.got_subcommand("table-check")) {
            std::string text;
            if (table_path == "-") {
                std::stringstream ss;
                ss << std::cin.rdbuf();
                text = ss.str();
            } else {
                text = read_text(table_path);
            }
            char* s = nullptr;
            check(dw_table_check_json(text.c_str(), &s));
            emit(take(s), table_out);
            return 0;
        }
        if (app.got_subcommand("validate-symbol")) {
            char* s = nullptr;
            check(dw_validate_symbol_json(symbol_spec.c_str(), &s));
            const std::string doc = take(s);
            emit(doc, symbol_out);
            return document_pass(doc) ? 0 : kExitFail;
        }
    } catch (const CliError& e) {
        std::cerr << "degenwave: " << dw_status_name(e.status) << ": " << e.message << "\n";
        return kExitError;
    }
    return kExitError;
}
