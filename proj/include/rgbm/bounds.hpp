#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rgbm/errors.hpp"
#include "rgbm/model.hpp"
#include "rgbm/pricing.hpp"

namespace rgbm {

/// Tolerance on the model-independent bound checks. All violations of
/// interest are orders of magnitude larger.
inline constexpr double kBoundTolerance = 1e-12;

struct BoundVerdict {
    double bound_value = 0.0;
    double price = 0.0;
    bool violated = false;
    double margin = 0.0;  // positive = violated (price - bound for upper, bound - price for lower)
};

/// C(t,S) <= S.
inline BoundVerdict check_call_upper(double price, double s) {
    if (!(s > 0.0))
        throw PricingError(PricingCode::domain_error, "need s > 0");
    const double margin = price - s;
    return {s, price, margin > kBoundTolerance, margin};
}

/// P(t,S) >= K e^{-r tau} - S.
inline BoundVerdict check_put_lower(double price, double s, double strike, double r,
                                    double tau) {
    const double bound = strike * std::exp(-r * tau) - s;
    const double margin = bound - price;
    return {bound, price, margin > kBoundTolerance, margin};
}

/// NNEG lower bound: P(t,S) >= K e^{-r tau} - S e^{-q tau}.
inline BoundVerdict check_nneg_lower(double price, double s, double strike, double r,
                                     double q, double tau) {
    const double bound = strike * std::exp(-r * tau) - s * std::exp(-q * tau);
    const double margin = bound - price;
    return {bound, price, margin > kBoundTolerance, margin};
}

/// Long-maturity limit of the NNEG price: K + (b/theta)(1 - theta - (K/b)^theta).
/// Independent of the current price and valuation time.
inline double nneg_asymptote(double strike, double b, double theta) {
    if (theta == 0.0)
        throw PricingError(PricingCode::theta_zero_unsupported,
                           "asymptote requires theta != 0");
    if (!(b > 0.0) || !(strike >= b))
        throw PricingError(PricingCode::domain_error, "need K >= b > 0");
    return strike + (b / theta) * (1.0 - theta - std::pow(strike / b, theta));
}

enum class SweepTarget { prop33, prop34, prop35 };

inline const char* to_string(SweepTarget t) {
    switch (t) {
        case SweepTarget::prop33: return "prop33";
        case SweepTarget::prop34: return "prop34";
        case SweepTarget::prop35: return "prop35";
    }
    return "unknown";
}

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

enum class CellStatus { ok, violated, undefined };

struct SweepCell {
    std::vector<double> coords;
    double price = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    CellStatus status = CellStatus::ok;
    std::string error;
};

struct SweepResult {
    SweepTarget target = SweepTarget::prop33;
    std::vector<SweepAxis> axes;
    std::vector<SweepCell> cells;
    std::optional<std::vector<double>> first_violation;
    std::optional<double> crossing;  // prop35: refined bound-crossing maturity
};

namespace detail {

inline void sweep_recurse(const std::vector<SweepAxis>& axes, std::size_t depth,
                          std::vector<double>& coords,
                          const std::function<void(const std::vector<double>&)>& visit) {
    if (depth == axes.size()) {
        visit(coords);
        return;
    }
    for (double v : axes[depth].values) {
        coords[depth] = v;
        sweep_recurse(axes, depth + 1, coords, visit);
    }
}

}  // namespace detail

/// Locates the maturity at which the NNEG price crosses its lower bound, by
/// bisection on the margin to 1e-3 years. Requires a sign change on [lo, hi].
inline std::optional<double> locate_nneg_crossing(const ModelParams& params, double s,
                                                  double strike, double lo, double hi) {
    auto margin = [&](double maturity) {
        OptionSpec spec{OptionKind::nneg, strike, maturity, 0.0};
        const double price = rgbm_nneg(spec, s, params).value;
        return check_nneg_lower(price, s, strike, params.r, params.q, maturity).margin;
    };
    double flo = margin(lo), fhi = margin(hi);
    if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if ((margin(mid) > 0.0) == (flo > 0.0))
            lo = mid, flo = margin(mid);
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Grid scan for bound violations of the published formulas.
///   prop33: call at s (default b) over axes drawn from {strike, r}; theta is
///           locked to 1 by setting sigma = sqrt(2r) per cell unless
///           lock_theta is false.
///   prop34: put, same conventions.
///   prop35: NNEG over a maturity axis at the base parameters; also refines
///           the first crossing by bisection.
/// Cells whose pricing raises an error are marked undefined, not violated.
inline SweepResult violation_sweep(SweepTarget target, const std::vector<SweepAxis>& axes,
                                   const ModelParams& base, double s_eval,
                                   double strike_default, double maturity_default = 10.0,
                                   bool lock_theta = true) {
    if (axes.empty())
        throw ValidationError(ValidationCode::bad_count, "sweep needs at least one axis");
    for (const auto& ax : axes)
        if (ax.values.empty())
            throw ValidationError(ValidationCode::bad_count, "sweep axis has no values");

    SweepResult out;
    out.target = target;
    out.axes = axes;
    std::vector<double> coords(axes.size(), 0.0);

    auto lookup = [&](const std::vector<double>& c, const std::string& name,
                      double fallback) {
        for (std::size_t i = 0; i < axes.size(); ++i)
            if (axes[i].name == name) return c[i];
        return fallback;
    };

    detail::sweep_recurse(axes, 0, coords, [&](const std::vector<double>& c) {
        SweepCell cell;
        cell.coords = c;
        ModelParams p = base;
        p.r = lookup(c, "r", base.r);
        p.q = lookup(c, "q", base.q);
        p.sigma = lookup(c, "sigma", base.sigma);
        const double strike = lookup(c, "strike", strike_default);
        const double maturity = lookup(c, "maturity", maturity_default);
        const double s = lookup(c, "s", s_eval);
        if (lock_theta && (target == SweepTarget::prop33 || target == SweepTarget::prop34))
            p.sigma = std::sqrt(2.0 * p.r);
        try {
            validate_params(p);
            if (target == SweepTarget::prop33) {
                OptionSpec spec{OptionKind::call, strike, maturity, 0.0};
                cell.price = rgbm_call(spec, s, p).value;
                const BoundVerdict v = check_call_upper(cell.price, s);
                cell.bound = v.bound_value;
                cell.margin = v.margin;
                cell.status = v.violated ? CellStatus::violated : CellStatus::ok;
            } else if (target == SweepTarget::prop34) {
                OptionSpec spec{OptionKind::put, strike, maturity, 0.0};
                cell.price = rgbm_put(spec, s, p).value;
                const BoundVerdict v = check_put_lower(cell.price, s, strike, p.r, maturity);
                cell.bound = v.bound_value;
                cell.margin = v.margin;
                cell.status = v.violated ? CellStatus::violated : CellStatus::ok;
            } else {
                OptionSpec spec{OptionKind::nneg, strike, maturity, 0.0};
                cell.price = rgbm_nneg(spec, s, p).value;
                const BoundVerdict v =
                    check_nneg_lower(cell.price, s, strike, p.r, p.q, maturity);
                cell.bound = v.bound_value;
                cell.margin = v.margin;
                cell.status = v.violated ? CellStatus::violated : CellStatus::ok;
            }
        } catch (const std::exception& e) {
            cell.status = CellStatus::undefined;
            cell.error = e.what();
        }
        if (cell.status == CellStatus::violated && !out.first_violation)
            out.first_violation = c;
        out.cells.push_back(std::move(cell));
    });

    if (target == SweepTarget::prop35 && out.first_violation) {
        // Bracket the crossing between the last non-violated and first
        // violated maturities on the (single) maturity axis.
        double lo = 0.0, hi = out.first_violation->front();
        bool have_lo = false;
        for (const auto& cell : out.cells) {
            if (cell.status == CellStatus::ok && cell.coords.front() < hi &&
                cell.coords.front() > lo) {
                lo = cell.coords.front();
                have_lo = true;
            }
        }
        if (have_lo)
            out.crossing = locate_nneg_crossing(
                base, s_eval, lookup(*out.first_violation, "strike", strike_default), lo, hi);
    }
    return out;
}

}  // namespace rgbm
