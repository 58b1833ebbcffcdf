#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "rgbm/errors.hpp"
#include "rgbm/math.hpp"
#include "rgbm/model.hpp"
#include "rgbm/sde.hpp"

namespace rgbm {

enum class PriceMethod { rgbm_formula, black_scholes, black76, monte_carlo };

inline const char* to_string(PriceMethod m) {
    switch (m) {
        case PriceMethod::rgbm_formula: return "rgbm_formula";
        case PriceMethod::black_scholes: return "black_scholes";
        case PriceMethod::black76: return "black76";
        case PriceMethod::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

struct PriceQuote {
    double value = 0.0;
    PriceMethod method = PriceMethod::rgbm_formula;
    std::optional<PricingIntermediates> intermediates;
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
};

namespace detail {

/// base^exponent via logs, with the exponent magnitude capped to keep the
/// result inside double range.
inline double guarded_pow(double base, double exponent) {
    const double x = exponent * std::log(base);
    if (std::fabs(x) > 700.0)
        throw PricingError(PricingCode::exponent_out_of_range,
                           "power term exponent exceeds double range");
    return std::exp(x);
}

inline void require_domain(double s, double strike, const ModelParams& params) {
    if (!(s >= params.b))
        throw PricingError(PricingCode::domain_error, "need s >= b");
    if (!(strike >= params.b))
        throw PricingError(PricingCode::domain_error, "need K >= b");
}

}  // namespace detail

/// z arguments and theta for the vanilla call/put expressions (z2 unused).
inline PricingIntermediates vanilla_intermediates(double s, double strike, double tau,
                                                  const ModelParams& params) {
    const double sig = params.sigma;
    const double srt = sig * std::sqrt(tau);
    const double m = (params.r + 0.5 * sig * sig) * tau;
    PricingIntermediates out;
    out.tau = tau;
    out.theta = theta_exponent(params.r, 0.0, sig);
    out.z1 = (std::log(s / strike) + m) / srt;
    out.z2 = std::numeric_limits<double>::quiet_NaN();
    out.z3 = (std::log(params.b * params.b / (strike * s)) + m) / srt;
    out.z4 = (std::log(params.b / s) - (params.r - 0.5 * sig * sig) * tau) / srt;
    return out;
}

/// z arguments and theta for the NNEG expression. Same symbol names as the
/// vanilla case but different formulas; never mix the two.
inline PricingIntermediates nneg_intermediates(double s, double strike, double tau,
                                               const ModelParams& params) {
    const double sig = params.sigma;
    const double srt = sig * std::sqrt(tau);
    const double m = (params.r - params.q + 0.5 * sig * sig) * tau;
    PricingIntermediates out;
    out.tau = tau;
    out.theta = theta_exponent(params.r, params.q, sig);
    out.z1 = (std::log(s / strike) + m) / srt;
    out.z2 = (std::log(params.b * params.b / (strike * s)) + m) / srt;
    out.z3 = (std::log(s / params.b) + m) / srt;
    out.z4 = (std::log(params.b / s) + m) / srt;
    return out;
}

/// Published RGBM call price. The 1/theta correction term is singular at
/// theta = 0 (r = 0) and no limiting form is published, so that case is
/// rejected outright.
inline PriceQuote rgbm_call(const OptionSpec& spec, double s, const ModelParams& params) {
    validate_params(params);
    validate_spec(spec);
    detail::require_domain(s, spec.strike, params);
    const double tau = spec.tau();
    if (tau == 0.0)
        return {std::max(s - spec.strike, 0.0), PriceMethod::rgbm_formula, std::nullopt};
    const double theta = theta_exponent(params.r, 0.0, params.sigma);
    if (theta == 0.0)
        throw PricingError(PricingCode::theta_zero_unsupported,
                           "rgbm call formula requires theta != 0 (r > 0)");
    const PricingIntermediates iv = vanilla_intermediates(s, spec.strike, tau, params);
    const double srt = params.sigma * std::sqrt(tau);
    const double df = std::exp(-params.r * tau);
    const double pow_bs = detail::guarded_pow(params.b / s, 1.0 + theta);
    const double pow_kb = detail::guarded_pow(spec.strike / params.b, theta - 1.0);
    const double value =
        s * norm_cdf(iv.z1) - spec.strike * df * norm_cdf(iv.z1 - srt) +
        (1.0 / theta) * (s * pow_bs * norm_cdf(iv.z3) -
                         spec.strike * df * pow_kb * norm_cdf(iv.z3 - theta * srt));
    return {value, PriceMethod::rgbm_formula, iv};
}

/// Published RGBM put price (amended form).
inline PriceQuote rgbm_put(const OptionSpec& spec, double s, const ModelParams& params) {
    validate_params(params);
    validate_spec(spec);
    detail::require_domain(s, spec.strike, params);
    const double tau = spec.tau();
    if (tau == 0.0)
        return {std::max(spec.strike - s, 0.0), PriceMethod::rgbm_formula, std::nullopt};
    const double theta = theta_exponent(params.r, 0.0, params.sigma);
    if (theta == 0.0)
        throw PricingError(PricingCode::theta_zero_unsupported,
                           "rgbm put formula requires theta != 0 (r > 0)");
    const PricingIntermediates iv = vanilla_intermediates(s, spec.strike, tau, params);
    const double srt = params.sigma * std::sqrt(tau);
    const double df = std::exp(-params.r * tau);
    const double pow_bs = detail::guarded_pow(params.b / s, 1.0 + theta);
    const double pow_kb = detail::guarded_pow(spec.strike / params.b, theta - 1.0);
    const double value =
        spec.strike * df * norm_cdf(-iv.z1 + srt) - params.b * df * norm_cdf(iv.z4) -
        s * (norm_cdf(-iv.z4 + srt) - norm_cdf(iv.z1)) -
        (1.0 / theta) *
            (s * pow_bs * (norm_cdf(iv.z4 + theta * srt) - norm_cdf(iv.z3)) -
             params.b * df * norm_cdf(iv.z4) +
             spec.strike * df * pow_kb * norm_cdf(iv.z3 - theta * srt));
    return {value, PriceMethod::rgbm_formula, iv};
}

/// Published RGBM NNEG price with deferment rate q. Singular at theta = 0
/// (r = q), which is rejected.
inline PriceQuote rgbm_nneg(const OptionSpec& spec, double s, const ModelParams& params) {
    validate_params(params);
    validate_spec(spec);
    detail::require_domain(s, spec.strike, params);
    const double tau = spec.tau();
    if (tau == 0.0)
        return {std::max(spec.strike - s, 0.0), PriceMethod::rgbm_formula, std::nullopt};
    const double theta = theta_exponent(params.r, params.q, params.sigma);
    if (theta == 0.0)
        throw PricingError(PricingCode::theta_zero_unsupported,
                           "rgbm nneg formula requires theta != 0 (r != q)");
    const PricingIntermediates iv = nneg_intermediates(s, spec.strike, tau, params);
    const double srt = params.sigma * std::sqrt(tau);
    const double dfr = std::exp(-params.r * tau);
    const double dfq = std::exp(-params.q * tau);
    const double pow_bs = detail::guarded_pow(params.b / s, 1.0 + theta);
    const double pow_kb = detail::guarded_pow(spec.strike / params.b, theta - 1.0);
    const double value =
        spec.strike * dfr * norm_cdf(-iv.z1 + srt) - s * dfq * norm_cdf(-iv.z1) -
        params.b * dfr * norm_cdf(-iv.z3 + srt) + s * dfq * norm_cdf(-iv.z3) +
        (1.0 / theta) *
            (params.b * dfr * norm_cdf(-iv.z3 + srt) -
             s * dfq * pow_bs * (norm_cdf(iv.z4) - norm_cdf(iv.z2)) -
             spec.strike * dfr * pow_kb * norm_cdf(iv.z2 - theta * srt));
    return {value, PriceMethod::rgbm_formula, iv};
}

/// Boundary evaluation of the call formula at s = b with theta = 1. Kept as
/// a separate code path so the general formula can be audited against it.
inline double call_boundary_display(double strike, double tau, double r, double sigma,
                                    double b) {
    const double srt = sigma * std::sqrt(tau);
    const double z = std::log(b / strike) / srt;
    return 2.0 * b * norm_cdf(z + srt) - 2.0 * strike * std::exp(-r * tau) * norm_cdf(z);
}

/// Boundary evaluation of the put formula at s = b with theta = 1.
inline double put_boundary_display(double strike, double tau, double r, double sigma,
                                   double b) {
    const double srt = sigma * std::sqrt(tau);
    const double z = std::log(b / strike) / srt;
    return strike * std::exp(-r * tau) * (1.0 - 2.0 * norm_cdf(z)) -
           2.0 * b * (norm_cdf(srt) - norm_cdf(z + srt));
}

inline void bs_domain_check(double s, double sigma) {
    if (!(s > 0.0))
        throw PricingError(PricingCode::domain_error, "need s > 0");
    if (!(sigma > 0.0))
        throw PricingError(PricingCode::domain_error, "need sigma > 0");
}

inline PriceQuote bs_call(const OptionSpec& spec, double s, double r, double sigma) {
    validate_spec(spec);
    bs_domain_check(s, sigma);
    const double tau = spec.tau();
    if (tau == 0.0)
        return {std::max(s - spec.strike, 0.0), PriceMethod::black_scholes, std::nullopt};
    const double srt = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / spec.strike) + (r + 0.5 * sigma * sigma) * tau) / srt;
    const double value = s * norm_cdf(d1) -
                         spec.strike * std::exp(-r * tau) * norm_cdf(d1 - srt);
    return {value, PriceMethod::black_scholes, std::nullopt};
}

inline PriceQuote bs_put(const OptionSpec& spec, double s, double r, double sigma) {
    validate_spec(spec);
    bs_domain_check(s, sigma);
    const double tau = spec.tau();
    if (tau == 0.0)
        return {std::max(spec.strike - s, 0.0), PriceMethod::black_scholes, std::nullopt};
    const double srt = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / spec.strike) + (r + 0.5 * sigma * sigma) * tau) / srt;
    const double value = spec.strike * std::exp(-r * tau) * norm_cdf(-d1 + srt) -
                         s * norm_cdf(-d1);
    return {value, PriceMethod::black_scholes, std::nullopt};
}

/// Black (1976) put on the deferment-discounted forward s e^{-q tau}.
inline PriceQuote black76_put(const OptionSpec& spec, double s, double r, double q,
                              double sigma) {
    validate_spec(spec);
    bs_domain_check(s, sigma);
    const double tau = spec.tau();
    if (tau == 0.0)
        return {std::max(spec.strike - s, 0.0), PriceMethod::black76, std::nullopt};
    const double srt = sigma * std::sqrt(tau);
    const double d1 =
        (std::log(s / spec.strike) + (r - q + 0.5 * sigma * sigma) * tau) / srt;
    const double d2 = d1 - srt;
    const double value = spec.strike * std::exp(-r * tau) * norm_cdf(-d2) -
                         s * std::exp(-q * tau) * norm_cdf(-d1);
    return {value, PriceMethod::black76, std::nullopt};
}

/// Monte Carlo price under the putative risk-neutral dynamics: reflected
/// Euler paths with drift r (call/put) or r - q (nneg), discounted payoff at
/// maturity. This is the hypothesis under test for the closed forms, not a
/// theorem; disagreement is reported, never tuned away.
///
/// The reduction is chunked so the estimate is bit-identical for any worker
/// count: each fixed 1024-path chunk is summed sequentially in path order and
/// chunk partials are combined in index order with compensated summation.
inline MCEstimate mc_price(const OptionSpec& spec, double s, const ModelParams& params,
                           std::int64_t n_paths, const TimeGrid& grid, std::uint64_t seed,
                           int n_threads = 1) {
    validate_params(params);
    validate_spec(spec);
    validate_grid(grid);
    if (n_paths < 2)
        throw ValidationError(ValidationCode::bad_count, "n_paths must be >= 2");
    if (n_threads < 1) n_threads = 1;

    ModelParams dyn = params;
    dyn.s0 = s;
    dyn.mu = spec.kind == OptionKind::nneg ? params.r - params.q : params.r;
    validate_params(dyn);

    const double tau = spec.tau();
    const double df = std::exp(-params.r * tau);
    const double strike = spec.strike;
    const bool is_call = spec.kind == OptionKind::call;

    constexpr std::int64_t kChunk = 1024;
    const std::int64_t n_chunks = (n_paths + kChunk - 1) / kChunk;
    std::vector<double> sums(static_cast<std::size_t>(n_chunks), 0.0);
    std::vector<double> sumsqs(static_cast<std::size_t>(n_chunks), 0.0);

    std::atomic<std::int64_t> next_chunk{0};
    auto worker = [&]() {
        for (;;) {
            const std::int64_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            const std::int64_t lo = c * kChunk;
            const std::int64_t hi = std::min(lo + kChunk, n_paths);
            double sum = 0.0, sumsq = 0.0;
            for (std::int64_t p = lo; p < hi; ++p) {
                const double st = reflected_terminal_value(
                    dyn, grid, seed, static_cast<std::uint64_t>(p));
                const double payoff = is_call ? std::max(st - strike, 0.0)
                                              : std::max(strike - st, 0.0);
                const double x = df * payoff;
                sum += x;
                sumsq += x * x;
            }
            sums[static_cast<std::size_t>(c)] = sum;
            sumsqs[static_cast<std::size_t>(c)] = sumsq;
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Neumaier-compensated combination in fixed chunk order.
    double sum = 0.0, comp = 0.0, sumsq = 0.0, compsq = 0.0;
    auto add = [](double& acc, double& c, double v) {
        const double t = acc + v;
        c += std::fabs(acc) >= std::fabs(v) ? (acc - t) + v : (v - t) + acc;
        acc = t;
    };
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        add(sum, comp, sums[static_cast<std::size_t>(c)]);
        add(sumsq, compsq, sumsqs[static_cast<std::size_t>(c)]);
    }
    sum += comp;
    sumsq += compsq;

    const double n = static_cast<double>(n_paths);
    const double mean = sum / n;
    const double var = std::max(0.0, (sumsq / n - mean * mean) * n / (n - 1.0));
    return {mean, std::sqrt(var / n), n_paths, seed};
}

}  // namespace rgbm
