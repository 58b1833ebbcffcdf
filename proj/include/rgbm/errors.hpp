#pragma once

#include <stdexcept>
#include <string>

namespace rgbm {

enum class ValidationCode {
    sigma_nonpositive,
    boundary_nonpositive,
    start_below_boundary,
    negative_rate,
    nonfinite_input,
    bad_time_grid,
    bad_option_spec,
    epsilon_nonpositive,
    bad_characteristics,
    bad_count,
};

enum class PricingCode {
    theta_zero_unsupported,
    domain_error,
    exponent_out_of_range,
};

inline const char* to_string(ValidationCode c) {
    switch (c) {
        case ValidationCode::sigma_nonpositive: return "sigma_nonpositive";
        case ValidationCode::boundary_nonpositive: return "boundary_nonpositive";
        case ValidationCode::start_below_boundary: return "start_below_boundary";
        case ValidationCode::negative_rate: return "negative_rate";
        case ValidationCode::nonfinite_input: return "nonfinite_input";
        case ValidationCode::bad_time_grid: return "bad_time_grid";
        case ValidationCode::bad_option_spec: return "bad_option_spec";
        case ValidationCode::epsilon_nonpositive: return "epsilon_nonpositive";
        case ValidationCode::bad_characteristics: return "bad_characteristics";
        case ValidationCode::bad_count: return "bad_count";
    }
    return "unknown";
}

inline const char* to_string(PricingCode c) {
    switch (c) {
        case PricingCode::theta_zero_unsupported: return "theta_zero_unsupported";
        case PricingCode::domain_error: return "domain_error";
        case PricingCode::exponent_out_of_range: return "exponent_out_of_range";
    }
    return "unknown";
}

class ValidationError : public std::invalid_argument {
public:
    ValidationError(ValidationCode code, const std::string& what)
        : std::invalid_argument(std::string(to_string(code)) + ": " + what), code_(code) {}
    ValidationCode code() const { return code_; }

private:
    ValidationCode code_;
};

class PricingError : public std::domain_error {
public:
    PricingError(PricingCode code, const std::string& what)
        : std::domain_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    PricingCode code() const { return code_; }

private:
    PricingCode code_;
};

}  // namespace rgbm
