#pragma once

#include <stdexcept>
#include <string>

namespace degenwave {

// Numeric values are shared with the C API (degenwave_c.h).
enum class ErrorCode : int {
    ok = 0,
    input_domain = 1,   // non-finite or out-of-range arguments
    capability = 2,     // requested feature not supported (e.g. derivative order)
    domain = 3,         // value outside the range of an inverse map
    parameter = 4,      // construction parameters violate a stated bound
    horizon = 5,        // integration reached a blow-up or decay horizon
    integration = 6,    // ODE or quadrature failure
    singularity = 7,    // a denominator vanished
    focal_point = 8,    // characteristic rays crossed
    periodization = 9,  // packet window does not fit one period
    resolution = 10,    // grid does not resolve the field
    configuration = 11, // inconsistent run configuration (CFL, grid size, ...)
    cadence = 12,       // snapshot cadence too coarse for time differencing
    parse = 13,         // malformed spec string or config file
    io = 14,            // file system error
    internal = 15
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace degenwave
