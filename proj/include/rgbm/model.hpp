#pragma once

#include <cmath>
#include <string>

#include "rgbm/errors.hpp"

namespace rgbm {

/// Market model parameters: drift mu, volatility sigma, reflecting lower
/// boundary b, risk-free rate r, deferment rate q and initial price s0.
/// Time is measured in years; rates are continuously compounded.
struct ModelParams {
    double mu = 0.0;
    double sigma = 0.0;
    double b = 0.0;
    double r = 0.0;
    double q = 0.0;
    double s0 = 0.0;
};

enum class OptionKind { call, put, nneg };

inline const char* to_string(OptionKind k) {
    switch (k) {
        case OptionKind::call: return "call";
        case OptionKind::put: return "put";
        case OptionKind::nneg: return "nneg";
    }
    return "unknown";
}

/// A European-style contract: kind, strike K, maturity T and valuation time t.
struct OptionSpec {
    OptionKind kind = OptionKind::call;
    double strike = 0.0;
    double maturity = 0.0;
    double valuation_time = 0.0;

    double tau() const { return maturity - valuation_time; }
};

/// Intermediate arguments of the closed-form pricing expressions. The z
/// symbols are context-dependent: the vanilla (call/put) and the NNEG
/// formulas use different definitions, so intermediates are always built by
/// the pricer that consumes them and never shared across contexts.
struct PricingIntermediates {
    double z1 = 0.0;
    double z2 = 0.0;
    double z3 = 0.0;
    double z4 = 0.0;
    double theta = 0.0;
    double tau = 0.0;
};

/// theta = 2(r - q) / sigma^2. The vanilla pricing case is q = 0.
inline double theta_exponent(double r, double q, double sigma) {
    return 2.0 * (r - q) / (sigma * sigma);
}

inline const ModelParams& validate_params(const ModelParams& p) {
    const bool finite = std::isfinite(p.mu) && std::isfinite(p.sigma) && std::isfinite(p.b) &&
                        std::isfinite(p.r) && std::isfinite(p.q) && std::isfinite(p.s0);
    if (!finite)
        throw ValidationError(ValidationCode::nonfinite_input, "model parameters must be finite");
    if (!(p.sigma > 0.0))
        throw ValidationError(ValidationCode::sigma_nonpositive, "sigma must be > 0");
    if (!(p.b > 0.0))
        throw ValidationError(ValidationCode::boundary_nonpositive, "boundary b must be > 0");
    if (p.r < 0.0 || p.q < 0.0)
        throw ValidationError(ValidationCode::negative_rate, "rates r and q must be >= 0");
    if (p.s0 < p.b)
        throw ValidationError(ValidationCode::start_below_boundary, "s0 must be >= b");
    return p;
}

inline const OptionSpec& validate_spec(const OptionSpec& spec) {
    const bool finite = std::isfinite(spec.strike) && std::isfinite(spec.maturity) &&
                        std::isfinite(spec.valuation_time);
    if (!finite)
        throw ValidationError(ValidationCode::nonfinite_input, "option spec must be finite");
    if (spec.valuation_time < 0.0 || spec.maturity < spec.valuation_time)
        throw ValidationError(ValidationCode::bad_option_spec, "need 0 <= t <= T");
    if (!(spec.strike > 0.0))
        throw ValidationError(ValidationCode::bad_option_spec, "strike must be > 0");
    return spec;
}

}  // namespace rgbm
