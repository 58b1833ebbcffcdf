#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rgbm/model.hpp"
#include "rgbm/sde.hpp"

namespace rgbm {

/// Value and stock position of a self-financing portfolio along a path.
struct PortfolioTrajectory {
    std::vector<double> times;
    std::vector<double> value;
    std::vector<double> position;
    std::uint64_t seed = 0;
};

/// Piecewise-constant function of time: value(t) = values[k] on
/// [knots[k], knots[k+1]), with knots[0] = 0 implied by construction.
struct PiecewiseConstant {
    std::vector<double> knots;   // ascending, knots[0] == 0
    std::vector<double> values;  // same length as knots

    double at(double t) const {
        std::size_t k = 0;
        while (k + 1 < knots.size() && t >= knots[k + 1]) ++k;
        return values[k];
    }
};

/// Deterministic model characteristics (rate density rho, drift density b,
/// volatility density a, clock density dG/dt) on [0, horizon].
struct CharacteristicsSpec {
    PiecewiseConstant rho;
    PiecewiseConstant drift_b;
    PiecewiseConstant vol_a;
    PiecewiseConstant clock_density;
    double horizon = 0.0;
};

inline const CharacteristicsSpec& validate_characteristics(const CharacteristicsSpec& spec) {
    auto check = [](const PiecewiseConstant& f) {
        if (f.knots.empty() || f.knots.size() != f.values.size() || f.knots.front() != 0.0)
            return false;
        for (std::size_t k = 1; k < f.knots.size(); ++k)
            if (!(f.knots[k] > f.knots[k - 1])) return false;
        return true;
    };
    if (!(spec.horizon > 0.0) || !check(spec.rho) || !check(spec.drift_b) ||
        !check(spec.vol_a) || !check(spec.clock_density))
        throw ValidationError(ValidationCode::bad_characteristics,
                              "piecewise-constant specs need ascending knots starting at 0");
    for (double g : spec.clock_density.values)
        if (g < 0.0)
            throw ValidationError(ValidationCode::bad_characteristics,
                                  "clock density must be >= 0");
    return spec;
}

/// Masses of the discounted drift measure and quadratic-variation measure,
/// split into reflection-step and interior-step contributions and averaged
/// over the simulated paths.
struct DiagnosticsReport {
    double a_hat_interior_mass = 0.0;
    double a_hat_reflection_mass = 0.0;
    double qv_reflection_mass = 0.0;
    double dt_used = 0.0;
    std::int64_t n_paths = 0;
};

/// Boundary-harvesting strategy: hold one share exactly while the price sits
/// on the boundary, zero otherwise. Each projected step contributes its
/// reflection increment; the bank balance accrues interest with the exact
/// per-step factor e^{r dt}, which keeps the value non-decreasing in floating
/// point and makes value == l bit-for-bit when r = 0.
inline PortfolioTrajectory run_reflection_arbitrage(const ModelParams& params,
                                                    const TimeGrid& grid, std::uint64_t seed,
                                                    std::uint64_t path_index = 0) {
    const PathSample path = simulate_rgbm_path(params, grid, seed, path_index);
    const std::size_t n = path.s.size() - 1;
    const double growth = std::exp(params.r * grid.dt());
    PortfolioTrajectory out;
    out.seed = seed;
    out.times = path.times;
    out.value.resize(n + 1);
    out.position.resize(n + 1);
    out.value[0] = 0.0;
    out.position[0] = path.s[0] == params.b ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dl = path.l[i + 1] - path.l[i];
        out.value[i + 1] = params.r == 0.0 ? out.value[i] + dl : out.value[i] * growth + dl;
        out.position[i + 1] = path.s[i + 1] == params.b ? 1.0 : 0.0;
    }
    return out;
}

/// Two-rate construction on deterministic characteristics: the closed-form
/// value e^{rt} (exp(int 1{a=0, b != rho} |b - rho| dG) - 1), evaluated on
/// the union of all breakpoints plus a uniform refinement. The position
/// column records the indicator {a = 0 and b != rho}.
inline PortfolioTrajectory run_two_rate_increasing_profit(const CharacteristicsSpec& spec,
                                                          double r,
                                                          std::int64_t n_refine = 1000) {
    validate_characteristics(spec);
    if (n_refine <= 0)
        throw ValidationError(ValidationCode::bad_count, "n_refine must be >= 1");
    std::vector<double> ts;
    for (std::int64_t i = 0; i <= n_refine; ++i)
        ts.push_back(spec.horizon * static_cast<double>(i) / static_cast<double>(n_refine));
    auto add_knots = [&](const PiecewiseConstant& f) {
        for (double k : f.knots)
            if (k > 0.0 && k < spec.horizon) ts.push_back(k);
    };
    add_knots(spec.rho);
    add_knots(spec.drift_b);
    add_knots(spec.vol_a);
    add_knots(spec.clock_density);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    PortfolioTrajectory out;
    out.times = ts;
    out.value.resize(ts.size());
    out.position.resize(ts.size());
    double integral = 0.0;
    auto integrand = [&](double t) {
        const double a = spec.vol_a.at(t);
        const double b = spec.drift_b.at(t);
        const double rho = spec.rho.at(t);
        const double g = spec.clock_density.at(t);
        return (a == 0.0 && b != rho) ? std::fabs(b - rho) * g : 0.0;
    };
    out.value[0] = 0.0;
    out.position[0] = integrand(0.0) > 0.0 || (spec.vol_a.at(0.0) == 0.0 &&
                                               spec.drift_b.at(0.0) != spec.rho.at(0.0))
                          ? 1.0
                          : 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double mid = ts[i - 1];  // integrand is constant on [t_{i-1}, t_i)
        integral += integrand(mid) * (ts[i] - ts[i - 1]);
        out.value[i] = std::exp(r * ts[i]) * std::expm1(integral);
        const double a = spec.vol_a.at(mid);
        out.position[i] = (a == 0.0 && spec.drift_b.at(mid) != spec.rho.at(mid)) ? 1.0 : 0.0;
    }
    return out;
}

/// Empirical structure-condition diagnostic: accumulates the discounted
/// drift-measure mass on reflection steps (e^{-r t} dL), its interior part
/// ((mu - r) S/B dt), and the quadratic-variation mass restricted to
/// reflection steps (sigma^2 (S/B)^2 dt), averaged over n_paths paths.
inline DiagnosticsReport structure_condition_diagnostic(const ModelParams& params,
                                                        const TimeGrid& grid,
                                                        std::int64_t n_paths,
                                                        std::uint64_t seed) {
    validate_params(params);
    validate_grid(grid);
    if (n_paths <= 0)
        throw ValidationError(ValidationCode::bad_count, "n_paths must be >= 1");
    const double dt = grid.dt();
    double a_refl = 0.0, a_int = 0.0, qv_refl = 0.0;
    for (std::int64_t p = 0; p < n_paths; ++p) {
        const PathSample path = simulate_rgbm_path(params, grid, seed,
                                                   static_cast<std::uint64_t>(p));
        const std::size_t n = path.s.size() - 1;
        for (std::size_t i = 0; i < n; ++i) {
            const double disc = std::exp(-params.r * path.times[i + 1]);
            if (path.reflected[i + 1]) {
                a_refl += disc * (path.l[i + 1] - path.l[i]);
                const double shat = path.s[i] * std::exp(-params.r * path.times[i]);
                qv_refl += params.sigma * params.sigma * shat * shat * dt;
            } else {
                const double shat = path.s[i] * std::exp(-params.r * path.times[i]);
                a_int += (params.mu - params.r) * shat * dt;
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(n_paths);
    return {a_int * inv, a_refl * inv, qv_refl * inv, dt, n_paths};
}

}  // namespace rgbm
