#pragma once

#include <algorithm>
#include <string>

namespace degenwave::test {

// Independent transcription of the row inequalities, evaluated directly.
// kind is "power" or "log" (the loglog row has the same inequality as log).
inline bool nondissipative_oracle(const std::string& kind, double beta, double s, double sp) {
    if (kind == "power" && beta > 1) return sp >= s && s > 3 + 1.5 * beta;
    if (kind == "power" && beta == 1) return sp > 4.5;
    if (kind == "power") return sp / (1 - beta) > std::max(s + beta * beta / (2 * (1 - beta)), 1.5 * (2 + beta) / (1 - beta));
    return sp >= s && s > 3;
}

inline bool dissipative_oracle(const std::string& kind, double beta, double alpha, double s, double sp) {
    if (kind == "log") return sp >= s;
    if (beta == 1) return sp / alpha > s + (1 - alpha) / (2 * alpha);
    const double d = beta - alpha;
    return sp / (1 - d) > s + beta * d / (2 * (1 - d));
}

}  // namespace degenwave::test
