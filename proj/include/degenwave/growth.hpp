#pragma once

#include "degenwave/shear.hpp"
#include "degenwave/symbols.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degenwave {

enum class EpsMode {
    fixed,   // eps = eps_fixed
    theory   // geometric mean of the two admissibility bounds
};

// Small parameters of the construction. Only orderings are prescribed by the
// theory; the defaults below are concrete representatives.
struct AsymptoticParameters {
    double delta0 = 0.009;
    double delta1 = 0.009;
    double sigma0 = 0.1;
    double delta2 = 0.0;
    double N0 = 0.0;  // stored as a real (order 1e25 for the default delta2); 0 = derive on use
    double delta3 = 0.0;
    double delta4 = 0.0;
    double delta5 = 0.0;

    EpsMode eps_mode = EpsMode::fixed;
    double eps_fixed = 0.1;
    bool enforce_eps_window = false;

    double c_x0 = 0.5;
    double Lambda = 32.0;  // minimal admissible lambda0
    double T = 1.0;        // maximal admissible tau_M
    double diss_threshold = 0.1;

    // Derives delta2..delta5 and N0 from delta0 and the symbol/regularity data.
    static AsymptoticParameters defaults(double beta0, double alpha0 = 0.0, double s = 0.0, double s_prime = 0.0);
    // Recomputes the derived parameters after delta0 or sigma0 changed.
    void derive(double beta0, double alpha0 = 0.0, double s = 0.0, double s_prime = 0.0);
    // Throws parameter errors for violated orderings or ranges.
    void validate() const;
};

// Both sides of the admissible window for eps and the selected value.
struct EpsReport {
    double lower = 0.0;
    double upper = 0.0;
    double value = 0.0;
    bool lower_ok = false;
    bool upper_ok = false;
    EpsMode mode = EpsMode::fixed;
};

struct Condition {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
    double margin = 0.0;  // (bound - value) / bound
    std::string note;
};

struct GrowthPlan {
    std::string gamma;
    std::string upsilon;  // empty when non-dissipative
    double lambda0 = 0.0;
    double M = 1.0;
    double tau_M = 0.0;
    double eps = 0.0;
    double t_star = 0.0;  // t_f(tau_M) / (1 - eps)
    double t_M = 0.0;     // time at which the lower comparison frequency reaches M lambda0
    EpsReport eps_report;
    std::vector<Condition> conditions;
    AsymptoticParameters params;

    bool admissible() const;
    const Condition* find(const std::string& name) const;
};

// int_{lambda0}^{M lambda0} d lambda / (lambda0 gamma(lambda0, lambda)).
double tau_M(const Symbol& gamma, double lambda0, double M);

// sup over M' in [1, M] of gamma(lambda0, M' lambda0) tau_{M'} / M' on the condition grid.
double condition1_sup(const Symbol& gamma, double lambda0, double M);

EpsReport eps_window(const Symbol& gamma, const AsymptoticParameters& params, double lambda0, double M);

GrowthPlan check_conditions(const Symbol& gamma, const std::optional<Symbol>& upsilon,
                            const AsymptoticParameters& params, double lambda0, double M);

// check_conditions plus the shear-dependent times t_star and t_M.
GrowthPlan make_plan(const Symbol& gamma, const std::optional<Symbol>& upsilon, const ShearProfile& shear,
                     const AsymptoticParameters& params, double lambda0, double M);

struct ComparisonCurves {
    std::vector<double> t;
    std::vector<double> lambda;      // from lambda0, slope factor (1 - eps)
    std::vector<double> lambda_bar;  // from (1 + eps) lambda0, slope factor (1 + eps)
    double t_M = 0.0;                // lambda(t_M) = M lambda0
};

// Solves both comparison ODEs on [0, plan.t_star] at `samples` uniform times.
ComparisonCurves solve_comparison_frequencies(const Symbol& gamma, const ShearProfile& shear, const GrowthPlan& plan,
                                              std::size_t samples = 257, bool force = false);

// Both comparison frequencies at the given increasing times (first entry 0); t_M is left at 0.
ComparisonCurves comparison_at_times(const Symbol& gamma, const ShearProfile& shear, double lambda0, double eps,
                                     const std::vector<double>& times);

// lambda(t) of the lower comparison ODE at a single time.
double comparison_lambda(const Symbol& gamma, const ShearProfile& shear, double lambda0, double eps, double t);

}  // namespace degenwave
