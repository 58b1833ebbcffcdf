#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rgbm/errors.hpp"
#include "rgbm/model.hpp"
#include "rgbm/rng.hpp"

namespace rgbm {

/// Uniform time grid on [t0, horizon] with n_steps steps.
struct TimeGrid {
    double t0 = 0.0;
    double horizon = 0.0;
    std::int64_t n_steps = 0;

    double dt() const { return (horizon - t0) / static_cast<double>(n_steps); }
};

inline const TimeGrid& validate_grid(const TimeGrid& g) {
    if (!std::isfinite(g.t0) || !std::isfinite(g.horizon))
        throw ValidationError(ValidationCode::nonfinite_input, "time grid must be finite");
    if (g.n_steps <= 0 || !(g.horizon > g.t0))
        throw ValidationError(ValidationCode::bad_time_grid,
                              "need horizon > t0 and n_steps >= 1");
    return g;
}

/// One simulated trajectory. s[i] is the price at times[i], l[i] the
/// cumulative reflection up to times[i], and reflected[i] flags whether the
/// step ending at times[i] was projected back to the boundary.
struct PathSample {
    std::vector<double> times;
    std::vector<double> s;
    std::vector<double> l;
    std::vector<std::uint8_t> reflected;
    std::uint64_t seed = 0;
};

struct LocalTimeEstimate {
    double epsilon = 0.0;
    double value = 0.0;
};

/// Euler step with Skorokhod projection: the reflection increment is the
/// additive amount needed to lift the proposal back onto the boundary, so the
/// path satisfies s >= b exactly and l increases only on projected steps.
/// noise_scale is a test-only hook that scales the Brownian increments
/// (0 turns the noise off for deterministic-drift checks).
inline PathSample simulate_rgbm_path(const ModelParams& params, const TimeGrid& grid,
                                     std::uint64_t seed, std::uint64_t path_index = 0,
                                     double noise_scale = 1.0) {
    validate_params(params);
    validate_grid(grid);
    const auto n = static_cast<std::size_t>(grid.n_steps);
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);
    PathSample out;
    out.seed = seed;
    out.times.resize(n + 1);
    out.s.resize(n + 1);
    out.l.resize(n + 1);
    out.reflected.assign(n + 1, 0);
    out.times[0] = grid.t0;
    out.s[0] = params.s0;
    out.l[0] = 0.0;
    NormalStream normals(seed, path_index);
    std::vector<double> z(n);
    normals.fill(0, n, z.data());
    double s = params.s0;
    double l = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dw = sqdt * z[i] * noise_scale;
        const double proposal = s * (1.0 + params.mu * dt + params.sigma * dw);
        if (proposal < params.b) {
            l += params.b - proposal;
            s = params.b;  // exact, so s == b identifies reflection steps
            out.reflected[i + 1] = 1;
        } else {
            s = proposal;
        }
        out.times[i + 1] = grid.t0 + static_cast<double>(i + 1) * dt;
        out.s[i + 1] = s;
        out.l[i + 1] = l;
    }
    return out;
}

/// Plain GBM path with the exact-in-law log-space update, using the same
/// normal stream as simulate_rgbm_path for common-seed comparisons. The
/// boundary is ignored; l stays identically zero.
inline PathSample simulate_gbm_path(const ModelParams& params, const TimeGrid& grid,
                                    std::uint64_t seed, std::uint64_t path_index = 0,
                                    double noise_scale = 1.0) {
    validate_params(params);
    validate_grid(grid);
    const auto n = static_cast<std::size_t>(grid.n_steps);
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);
    const double drift = (params.mu - 0.5 * params.sigma * params.sigma) * dt;
    PathSample out;
    out.seed = seed;
    out.times.resize(n + 1);
    out.s.resize(n + 1);
    out.l.assign(n + 1, 0.0);
    out.reflected.assign(n + 1, 0);
    out.times[0] = grid.t0;
    out.s[0] = params.s0;
    NormalStream normals(seed, path_index);
    std::vector<double> z(n);
    normals.fill(0, n, z.data());
    double s = params.s0;
    for (std::size_t i = 0; i < n; ++i) {
        s *= std::exp(drift + params.sigma * sqdt * z[i] * noise_scale);
        out.times[i + 1] = grid.t0 + static_cast<double>(i + 1) * dt;
        out.s[i + 1] = s;
    }
    return out;
}

/// Occupation-density estimate of the local time at b: the band integral
/// (1/eps) * sum 1{b < s <= b+eps} sigma^2 s^2 dt over the path's steps.
/// The reflection term equals half of this in the eps, dt -> 0 limit.
inline LocalTimeEstimate local_time_occupation_estimate(const PathSample& path,
                                                        const ModelParams& params,
                                                        double epsilon) {
    if (!(epsilon > 0.0))
        throw ValidationError(ValidationCode::epsilon_nonpositive, "epsilon must be > 0");
    const std::size_t n = path.s.size() - 1;
    const double dt = (path.times.back() - path.times.front()) / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = path.s[i];
        if (s > params.b && s <= params.b + epsilon)
            acc += params.sigma * params.sigma * s * s * dt;
    }
    return {epsilon, acc / epsilon};
}

/// Earliest grid time at which the path is at or below the given level.
inline std::optional<double> first_passage_time(const PathSample& path, double level) {
    for (std::size_t i = 0; i < path.s.size(); ++i)
        if (path.s[i] <= level) return path.times[i];
    return std::nullopt;
}

/// Terminal state of a reflected Euler path, without storing the trajectory.
/// Used by the Monte Carlo pricer where only S_T matters.
inline double reflected_terminal_value(const ModelParams& params, const TimeGrid& grid,
                                       std::uint64_t seed, std::uint64_t path_index) {
    const auto n = static_cast<std::size_t>(grid.n_steps);
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);
    NormalStream normals(seed, path_index);
    constexpr std::size_t kChunk = 2048;
    double z[kChunk];
    double s = params.s0;
    std::uint64_t step = 0;
    std::size_t remaining = n;
    while (remaining > 0) {
        const std::size_t m = remaining < kChunk ? remaining : kChunk;
        normals.fill(step, m, z);
        for (std::size_t i = 0; i < m; ++i) {
            // same expression shape as simulate_rgbm_path so the two agree
            // bit for bit under any contraction the compiler picks
            const double dw = sqdt * z[i];
            const double proposal = s * (1.0 + params.mu * dt + params.sigma * dw);
            s = proposal < params.b ? params.b : proposal;
        }
        step += m;
        remaining -= m;
    }
    return s;
}

}  // namespace rgbm
