#include "degenwave/degenwave_c.h"

#include "degenwave/errors.hpp"
#include "degenwave/harness.hpp"
#include "degenwave/linop.hpp"
#include "degenwave/table_check.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct dw_config {
    degenwave::ExperimentConfig value;
};

struct dw_report {
    degenwave::SweepReport value;
};

namespace {

thread_local std::string last_error;

template <class F>
int guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return DW_OK;
    } catch (const degenwave::Error& e) {
        last_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return DW_E_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return DW_E_INTERNAL;
    }
}

void require(const void* p, const char* name) {
    if (p == nullptr) degenwave::fail(degenwave::ErrorCode::input_domain, std::string(name) + " is null");
}

char* duplicate(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class F>
int string_result(char** out, F&& make) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        *out = duplicate(make());
    });
}

}  // namespace

extern "C" {

const char* dw_last_error(void) { return last_error.c_str(); }

const char* dw_status_name(int status) {
    if (status < DW_OK || status > DW_E_INTERNAL) return "unknown";
    return degenwave::error_code_name(static_cast<degenwave::ErrorCode>(status));
}

void dw_string_free(char* s) { std::free(s); }

int dw_config_new(dw_config** out) {
    return guarded([&] {
        require(out, "out");
        *out = new dw_config{};
    });
}

int dw_config_parse(const char* text, dw_config** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = nullptr;
        *out = new dw_config{degenwave::ExperimentConfig::parse(text)};
    });
}

int dw_config_load(const char* path, dw_config** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = nullptr;
        *out = new dw_config{degenwave::ExperimentConfig::load(path)};
    });
}

int dw_config_from_plan(const char* plan_json, dw_config** out) {
    return guarded([&] {
        require(plan_json, "plan_json");
        require(out, "out");
        *out = nullptr;
        *out = new dw_config{degenwave::config_from_plan_json(plan_json)};
    });
}

int dw_config_set(dw_config* config, const char* key, const char* value) {
    return guarded([&] {
        require(config, "config");
        require(key, "key");
        require(value, "value");
        config->value.set(key, value);
    });
}

int dw_config_validate(const dw_config* config) {
    return guarded([&] {
        require(config, "config");
        config->value.validate();
    });
}

int dw_config_to_string(const dw_config* config, char** out) {
    return string_result(out, [&] {
        require(config, "config");
        return config->value.str();
    });
}

void dw_config_free(dw_config* config) { delete config; }

int dw_run(const dw_config* config, dw_report** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        *out = nullptr;
        *out = new dw_report{degenwave::run(config->value)};
    });
}

int dw_report_pass(const dw_report* report, int* pass) {
    return guarded([&] {
        require(report, "report");
        require(pass, "pass");
        *pass = report->value.pass() ? 1 : 0;
    });
}

int dw_report_points(const dw_report* report, size_t* count) {
    return guarded([&] {
        require(report, "report");
        require(count, "count");
        *count = report->value.points.size();
    });
}

int dw_report_json(const dw_report* report, char** out) {
    return string_result(out, [&] {
        require(report, "report");
        return degenwave::report_json(report->value);
    });
}

int dw_report_timing_json(const dw_report* report, char** out) {
    return string_result(out, [&] {
        require(report, "report");
        return degenwave::timing_json(report->value);
    });
}

int dw_report_series_csv(const dw_report* report, size_t point, char** out) {
    return string_result(out, [&] {
        require(report, "report");
        if (point >= report->value.points.size())
            degenwave::fail(degenwave::ErrorCode::input_domain, "point index out of range");
        return degenwave::series_csv(report->value.points[point]);
    });
}

void dw_report_free(dw_report* report) { delete report; }

int dw_plan_json(const dw_config* config, char** out) {
    return string_result(out, [&] {
        require(config, "config");
        return degenwave::plan_json(config->value);
    });
}

int dw_toy_json(const dw_config* config, char** out) {
    return string_result(out, [&] {
        require(config, "config");
        return degenwave::toy_json(config->value);
    });
}

int dw_toy_csv(const dw_config* config, char** out) {
    return string_result(out, [&] {
        require(config, "config");
        return degenwave::toy_csv(config->value);
    });
}

int dw_phase_json(const dw_config* config, char** out) {
    return string_result(out, [&] {
        require(config, "config");
        return degenwave::phase_json(config->value);
    });
}

int dw_packet_json(const dw_config* config, char** out) {
    return string_result(out, [&] {
        require(config, "config");
        return degenwave::packet_json(config->value);
    });
}

int dw_validate_symbol_json(const char* spec, char** out) {
    return string_result(out, [&] {
        require(spec, "spec");
        return degenwave::validate_symbol_json(spec);
    });
}

int dw_table_check_json(const char* queries, char** out) {
    return string_result(out, [&] {
        require(queries, "queries");
        return degenwave::table_json(degenwave::table_check(degenwave::parse_table_queries(queries)));
    });
}

int dw_apply_L(const char* gamma, const char* shear, const char* upsilon, double kappa, double lambda0, double t,
               const double* psi, size_t n, double* out) {
    return guarded([&] {
        require(gamma, "gamma");
        require(shear, "shear");
        require(psi, "psi");
        require(out, "out");
        if (n == 0) degenwave::fail(degenwave::ErrorCode::input_domain, "n must be positive");
        const degenwave::Symbol g = degenwave::Symbol::parse(gamma);
        const bool dissipative = upsilon != nullptr && *upsilon != '\0';
        std::optional<degenwave::Symbol> u;
        if (dissipative) u = degenwave::Symbol::parse(upsilon);
        const degenwave::ShearProfile f = degenwave::ShearProfile::parse(shear, dissipative ? kappa : 0.0, u);
        std::vector<degenwave::cplx> samples(n);
        for (size_t j = 0; j < n; ++j) samples[j] = {psi[2 * j], psi[2 * j + 1]};
        const std::vector<degenwave::cplx> r = dissipative ? degenwave::apply_L_diss(f, g, lambda0, t, samples)
                                                           : degenwave::apply_L(f, g, lambda0, t, samples);
        for (size_t j = 0; j < n; ++j) {
            out[2 * j] = r[j].real();
            out[2 * j + 1] = r[j].imag();
        }
    });
}

}  // extern "C"
