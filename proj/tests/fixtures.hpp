#pragma once

#include "degenwave/amplitude.hpp"
#include "degenwave/growth.hpp"
#include "degenwave/phase.hpp"

#include <vector>

namespace degenwave::test {

inline std::vector<double> uniform_times(double t_end, std::size_t count) {
    std::vector<double> t(count + 1);
    for (std::size_t i = 0; i <= count; ++i) t[i] = t_end * double(i) / double(count);
    return t;
}

// Steady f = cos, gamma = <xi>, M = 4 on the desk window span:0.85,1.75, sampled on [0, t_M].
struct DeskFan {
    Symbol gamma = Symbol::power(1.0);
    ShearProfile shear = ShearProfile::cosine(1);
    AsymptoticParameters params;
    GrowthPlan plan;
    PhaseField fan;
    AmplitudeField amp;

    explicit DeskFan(double lambda0, std::size_t samples = 32) {
        params.derive(gamma.beta0());
        plan = make_plan(gamma, std::nullopt, shear, params, lambda0, 4.0);
        params.c_x0 = 0.85 / plan.eps;
        fan = build_phase(gamma, shear, params, lambda0, plan.eps, WindowSpec::parse("span:0.85,1.75"),
                          uniform_times(plan.t_M, samples));
        amp = evolve_amplitude(fan, plan.t_M);
    }
};

inline const DeskFan& desk_fan_64() {
    static const DeskFan f(64.0);
    return f;
}

}  // namespace degenwave::test
