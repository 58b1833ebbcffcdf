// Command-line front end: simulation, arbitrage demos, pricing queries,
// bound sweeps and figure-data emission. All outputs are deterministic given
// the resolved configuration, which is echoed into the output directory.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rgbm/rgbm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitPricing = 3;
constexpr int kExitIo = 4;

struct Config {
    // model
    double mu = 0.0;
    double sigma = 0.5;
    double b = 1.0;
    double r = 0.0;
    double q = 0.0;
    double s0 = 2.0;
    // grid
    double t0 = 0.0;
    double horizon = 10.0;
    std::int64_t steps = 10000;
    // run control
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = "out";
    std::string config_path;
    // simulate / arb
    std::int64_t n_paths = 1;
    int figure = 0;
    // price
    std::string kind = "call";
    double strike = 2.0;
    double maturity = 10.0;
    double valuation_time = 0.0;
    double s = 1.0;
    std::vector<std::string> methods;
    std::int64_t mc_paths = 100000;
    std::int64_t mc_steps = 1000;
    // sweep
    std::string target = "prop33";
};

void apply_figure_preset(Config& cfg, int figure) {
    switch (figure) {
        case 1:
            cfg.mu = 0.0; cfg.sigma = 0.5; cfg.b = 1.0; cfg.r = 0.0; cfg.q = 0.0;
            cfg.s0 = 2.0; cfg.t0 = 0.0; cfg.horizon = 10.0;
            break;
        case 2:
            cfg.sigma = 0.5; cfg.b = 1.0; cfg.r = 0.125; cfg.q = 0.0;
            cfg.strike = 2.0; cfg.maturity = 10.0; cfg.valuation_time = 0.0;
            break;
        case 3:
            cfg.sigma = 0.2; cfg.b = 1.0; cfg.r = 0.02; cfg.q = 0.0;
            cfg.strike = 2.0; cfg.maturity = 10.0; cfg.valuation_time = 0.0;
            break;
        case 4:
            cfg.sigma = 0.3; cfg.b = 0.5; cfg.r = 0.0; cfg.q = 0.03;
            cfg.s = 1.0; cfg.s0 = 1.0; cfg.strike = 0.9; cfg.valuation_time = 0.0;
            break;
        default:
            throw rgbm::ValidationError(rgbm::ValidationCode::bad_option_spec,
                                        "figure index must be 1..4");
    }
}

json config_to_json(const Config& c, const std::string& command) {
    return json{{"command", command},
                {"mu", c.mu}, {"sigma", c.sigma}, {"b", c.b}, {"r", c.r}, {"q", c.q},
                {"s0", c.s0}, {"t0", c.t0}, {"horizon", c.horizon}, {"steps", c.steps},
                {"seed", c.seed}, {"threads", c.threads}, {"out", c.out_dir},
                {"n_paths", c.n_paths}, {"figure", c.figure}, {"kind", c.kind},
                {"strike", c.strike}, {"maturity", c.maturity},
                {"valuation_time", c.valuation_time}, {"s", c.s},
                {"methods", c.methods}, {"mc_paths", c.mc_paths},
                {"mc_steps", c.mc_steps}, {"target", c.target}};
}

void load_config_file(Config& c) {
    if (c.config_path.empty()) return;
    std::ifstream in(c.config_path);
    if (!in) throw rgbm::IoError("cannot read config file " + c.config_path);
    json j = json::parse(in);
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("mu", c.mu); get("sigma", c.sigma); get("b", c.b); get("r", c.r); get("q", c.q);
    get("s0", c.s0); get("t0", c.t0); get("horizon", c.horizon); get("steps", c.steps);
    get("seed", c.seed); get("threads", c.threads); get("out", c.out_dir);
    get("n_paths", c.n_paths); get("figure", c.figure); get("kind", c.kind);
    get("strike", c.strike); get("maturity", c.maturity);
    get("valuation_time", c.valuation_time); get("s", c.s); get("methods", c.methods);
    get("mc_paths", c.mc_paths); get("mc_steps", c.mc_steps); get("target", c.target);
}

void prepare_out_dir(const Config& cfg, const std::string& command) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw rgbm::IoError("cannot create output directory " + cfg.out_dir);
    rgbm::write_text_file(cfg.out_dir + "/config_resolved.json",
                          config_to_json(cfg, command).dump(2) + "\n");
}

rgbm::ModelParams model_of(const Config& c) {
    return rgbm::validate_params({c.mu, c.sigma, c.b, c.r, c.q, c.s0});
}

rgbm::TimeGrid grid_of(const Config& c) {
    return rgbm::validate_grid({c.t0, c.horizon, c.steps});
}

json verdict_json(const rgbm::BoundVerdict& v, const char* bound_kind) {
    return json{{"kind", bound_kind}, {"bound_value", v.bound_value},
                {"margin", v.margin}, {"violated", v.violated}};
}

int cmd_simulate(Config cfg) {
    if (cfg.figure == 1) apply_figure_preset(cfg, 1);
    else if (cfg.figure != 0) apply_figure_preset(cfg, cfg.figure);
    const auto params = model_of(cfg);
    const auto grid = grid_of(cfg);
    if (cfg.n_paths < 1)
        throw rgbm::ValidationError(rgbm::ValidationCode::bad_count, "n_paths must be >= 1");
    prepare_out_dir(cfg, "simulate");

    std::int64_t hits = 0;
    double sum_l = 0.0;
    for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
        const auto path = rgbm::simulate_rgbm_path(params, grid, cfg.seed,
                                                   static_cast<std::uint64_t>(p));
        if (path.l.back() > 0.0) ++hits;
        sum_l += path.l.back();
        std::string name = cfg.out_dir + "/path_" + std::to_string(cfg.seed);
        if (cfg.n_paths > 1) name += "_p" + std::to_string(p);
        name += ".csv";
        rgbm::CsvWriter csv(name, {"time", "s", "l", "reflected"});
        for (std::size_t i = 0; i < path.s.size(); ++i)
            csv.row({path.times[i], path.s[i], path.l[i],
                     static_cast<double>(path.reflected[i])});
        if (cfg.figure == 1 && p == 0) {
            rgbm::CsvWriter fig(cfg.out_dir + "/figure1.csv", {"time", "s", "l", "position"});
            for (std::size_t i = 0; i < path.s.size(); ++i)
                fig.row({path.times[i], path.s[i], path.l[i],
                         path.s[i] == params.b ? 1.0 : 0.0});
        }
    }
    json summary{{"n_paths", cfg.n_paths},
                 {"hit_fraction", static_cast<double>(hits) / static_cast<double>(cfg.n_paths)},
                 {"mean_terminal_l", sum_l / static_cast<double>(cfg.n_paths)},
                 {"seed", cfg.seed}, {"dt", grid.dt()}};
    rgbm::write_text_file(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_arb(Config cfg) {
    if (cfg.figure != 0) apply_figure_preset(cfg, cfg.figure);
    const auto params = model_of(cfg);
    const auto grid = grid_of(cfg);
    if (cfg.n_paths < 1)
        throw rgbm::ValidationError(rgbm::ValidationCode::bad_count, "need n_paths >= 1");
    prepare_out_dir(cfg, "arb");

    std::int64_t positive = 0;
    double min_terminal = 0.0, max_terminal = 0.0;
    bool all_nondecreasing = true;
    bool all_value_eq_l = true;
    for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
        const auto traj = rgbm::run_reflection_arbitrage(params, grid, cfg.seed,
                                                         static_cast<std::uint64_t>(p));
        const double vt = traj.value.back();
        if (p == 0) { min_terminal = max_terminal = vt; }
        min_terminal = std::min(min_terminal, vt);
        max_terminal = std::max(max_terminal, vt);
        if (vt > 0.0) ++positive;
        for (std::size_t i = 1; i < traj.value.size(); ++i)
            if (traj.value[i] < traj.value[i - 1]) all_nondecreasing = false;
        if (params.r == 0.0) {
            const auto path = rgbm::simulate_rgbm_path(params, grid, cfg.seed,
                                                       static_cast<std::uint64_t>(p));
            if (traj.value.back() != path.l.back()) all_value_eq_l = false;
        }
        if (p == 0) {
            rgbm::CsvWriter csv(cfg.out_dir + "/trajectory_" + std::to_string(cfg.seed) + ".csv",
                                {"time", "value", "position"});
            for (std::size_t i = 0; i < traj.value.size(); ++i)
                csv.row({traj.times[i], traj.value[i], traj.position[i]});
        }
    }
    json verdict{{"n_seeds", cfg.n_paths},
                 {"positive_fraction",
                  static_cast<double>(positive) / static_cast<double>(cfg.n_paths)},
                 {"min_terminal", min_terminal}, {"max_terminal", max_terminal},
                 {"all_nondecreasing", all_nondecreasing},
                 {"seed", cfg.seed}, {"dt", grid.dt()}};
    if (params.r == 0.0) verdict["value_equals_reflection_term"] = all_value_eq_l;
    rgbm::write_text_file(cfg.out_dir + "/verdict.json", verdict.dump(2) + "\n");
    std::cout << verdict.dump(2) << "\n";
    return kExitOk;
}

json intermediates_json(const rgbm::PricingIntermediates& iv) {
    json j{{"z1", iv.z1}, {"z3", iv.z3}, {"z4", iv.z4}, {"theta", iv.theta},
           {"tau", iv.tau}};
    if (std::isfinite(iv.z2)) j["z2"] = iv.z2;
    return j;
}

int cmd_price(Config cfg) {
    if (cfg.figure != 0) apply_figure_preset(cfg, cfg.figure);
    const auto params = model_of(cfg);
    rgbm::OptionKind kind;
    if (cfg.kind == "call") kind = rgbm::OptionKind::call;
    else if (cfg.kind == "put") kind = rgbm::OptionKind::put;
    else if (cfg.kind == "nneg") kind = rgbm::OptionKind::nneg;
    else throw rgbm::ValidationError(rgbm::ValidationCode::bad_option_spec,
                                     "kind must be call|put|nneg");
    const rgbm::OptionSpec spec{kind, cfg.strike, cfg.maturity, cfg.valuation_time};
    rgbm::validate_spec(spec);
    const double tau = spec.tau();
    prepare_out_dir(cfg, "price");

    std::vector<std::string> methods = cfg.methods;
    if (methods.empty()) {
        methods = {"rgbm", kind == rgbm::OptionKind::nneg ? "black76" : "bs", "mc"};
    }

    auto bound_of = [&](double price) {
        switch (kind) {
            case rgbm::OptionKind::call:
                return verdict_json(rgbm::check_call_upper(price, cfg.s), "call_upper");
            case rgbm::OptionKind::put:
                return verdict_json(
                    rgbm::check_put_lower(price, cfg.s, cfg.strike, params.r, tau),
                    "put_lower");
            case rgbm::OptionKind::nneg:
                return verdict_json(rgbm::check_nneg_lower(price, cfg.s, cfg.strike,
                                                           params.r, params.q, tau),
                                    "nneg_lower");
        }
        return json{};
    };

    json quotes = json::array();
    double rgbm_value = 0.0, black76_value = 0.0;
    bool have_rgbm = false, have_b76 = false;
    for (const auto& m : methods) {
        json q;
        if (m == "rgbm") {
            rgbm::PriceQuote quote;
            if (kind == rgbm::OptionKind::call) quote = rgbm::rgbm_call(spec, cfg.s, params);
            else if (kind == rgbm::OptionKind::put) quote = rgbm::rgbm_put(spec, cfg.s, params);
            else quote = rgbm::rgbm_nneg(spec, cfg.s, params);
            q = {{"method", "rgbm_formula"}, {"value", quote.value}};
            if (quote.intermediates) q["intermediates"] = intermediates_json(*quote.intermediates);
            q["bound_status"] = bound_of(quote.value);
            rgbm_value = quote.value;
            have_rgbm = true;
        } else if (m == "bs") {
            const auto quote = kind == rgbm::OptionKind::call
                                   ? rgbm::bs_call(spec, cfg.s, params.r, params.sigma)
                                   : rgbm::bs_put(spec, cfg.s, params.r, params.sigma);
            q = {{"method", "black_scholes"}, {"value", quote.value},
                 {"bound_status", bound_of(quote.value)}};
        } else if (m == "black76") {
            const auto quote = rgbm::black76_put(spec, cfg.s, params.r, params.q, params.sigma);
            q = {{"method", "black76"}, {"value", quote.value},
                 {"bound_status", bound_of(quote.value)}};
            black76_value = quote.value;
            have_b76 = true;
        } else if (m == "mc") {
            const rgbm::TimeGrid grid{cfg.valuation_time, cfg.maturity, cfg.mc_steps};
            const auto est = rgbm::mc_price(spec, cfg.s, params, cfg.mc_paths, grid,
                                            cfg.seed, cfg.threads);
            q = {{"method", "monte_carlo"}, {"value", est.mean},
                 {"std_error", est.std_error}, {"n_paths", est.n_paths},
                 {"seed", est.seed}, {"bound_status", bound_of(est.mean)}};
        } else {
            throw rgbm::ValidationError(rgbm::ValidationCode::bad_option_spec,
                                        "unknown method " + m);
        }
        quotes.push_back(q);
    }
    json result{{"spec", {{"kind", cfg.kind}, {"strike", cfg.strike},
                          {"maturity", cfg.maturity}, {"valuation_time", cfg.valuation_time},
                          {"s", cfg.s}}},
                {"quotes", quotes}};
    if (kind == rgbm::OptionKind::nneg && have_rgbm) {
        const double bound = cfg.strike * std::exp(-params.r * tau) -
                             cfg.s * std::exp(-params.q * tau);
        if (bound > 0.0) result["rgbm_over_bound"] = rgbm_value / bound;
        if (have_b76 && black76_value > 0.0)
            result["rgbm_over_black76"] = rgbm_value / black76_value;
    }
    rgbm::write_text_file(cfg.out_dir + "/price.json", result.dump(2) + "\n");
    std::cout << result.dump(2) << "\n";
    return kExitOk;
}

int cmd_figure(Config cfg, int figure) {
    apply_figure_preset(cfg, figure);
    cfg.figure = figure;
    if (figure == 1) {
        cfg.n_paths = 1;
        return cmd_simulate(cfg);
    }
    const auto params = model_of(cfg);
    prepare_out_dir(cfg, "figure");
    if (figure == 2 || figure == 3) {
        const rgbm::OptionSpec spec{figure == 2 ? rgbm::OptionKind::call : rgbm::OptionKind::put,
                                    cfg.strike, cfg.maturity, cfg.valuation_time};
        const double tau = spec.tau();
        rgbm::CsvWriter csv(cfg.out_dir + "/figure" + std::to_string(figure) + ".csv",
                            {"s", "rgbm", "bs", "bound"});
        const int n_points = 500;
        for (int i = 0; i < n_points; ++i) {
            const double s = params.b + (5.0 * params.b - params.b) *
                                            static_cast<double>(i) /
                                            static_cast<double>(n_points - 1);
            if (figure == 2) {
                csv.row({s, rgbm::rgbm_call(spec, s, params).value,
                         rgbm::bs_call(spec, s, params.r, params.sigma).value, s});
            } else {
                csv.row({s, rgbm::rgbm_put(spec, s, params).value,
                         rgbm::bs_put(spec, s, params.r, params.sigma).value,
                         cfg.strike * std::exp(-params.r * tau) - s});
            }
        }
        return kExitOk;
    }
    // figure 4: NNEG price vs maturity
    const double theta = rgbm::theta_exponent(params.r, params.q, params.sigma);
    const double asym = rgbm::nneg_asymptote(cfg.strike, params.b, theta);
    rgbm::CsvWriter csv(cfg.out_dir + "/figure4.csv",
                        {"T", "rgbm", "black76", "bound", "asymptote"});
    const int n_points = 400;
    for (int i = 1; i <= n_points; ++i) {
        const double maturity = 40.0 * static_cast<double>(i) / static_cast<double>(n_points);
        const rgbm::OptionSpec spec{rgbm::OptionKind::nneg, cfg.strike, maturity, 0.0};
        csv.row({maturity, rgbm::rgbm_nneg(spec, cfg.s, params).value,
                 rgbm::black76_put(spec, cfg.s, params.r, params.q, params.sigma).value,
                 cfg.strike * std::exp(-params.r * maturity) -
                     cfg.s * std::exp(-params.q * maturity),
                 asym});
    }
    return kExitOk;
}

int cmd_sweep(Config cfg) {
    rgbm::SweepTarget target;
    if (cfg.target == "prop33") target = rgbm::SweepTarget::prop33;
    else if (cfg.target == "prop34") target = rgbm::SweepTarget::prop34;
    else if (cfg.target == "prop35") target = rgbm::SweepTarget::prop35;
    else throw rgbm::ValidationError(rgbm::ValidationCode::bad_option_spec,
                                     "target must be prop33|prop34|prop35");
    prepare_out_dir(cfg, "sweep");

    rgbm::ModelParams base;
    std::vector<rgbm::SweepAxis> axes;
    double s_eval, strike_default;
    auto linspace = [](double lo, double hi, int n) {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i)
            v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        return v;
    };
    if (target == rgbm::SweepTarget::prop33) {
        base = {0.0, 0.5, 1.0, 0.125, 0.0, 1.0};
        s_eval = base.b;
        strike_default = 2.0;
        axes = {{"strike", linspace(1.05, 3.0, 40)}, {"r", linspace(0.02, 0.25, 24)}};
    } else if (target == rgbm::SweepTarget::prop34) {
        base = {0.0, 0.2, 1.0, 0.02, 0.0, 1.0};
        s_eval = base.b;
        strike_default = 2.0;
        axes = {{"strike", linspace(1.05, 6.0, 60)}, {"r", linspace(0.005, 0.1, 20)}};
    } else {
        base = {0.0, 0.3, 0.5, 0.0, 0.03, 1.0};
        s_eval = 1.0;
        strike_default = 0.9;
        axes = {{"maturity", linspace(1.0, 40.0, 79)}};
    }
    const auto result = rgbm::violation_sweep(target, axes, base, s_eval, strike_default);

    std::vector<std::string> header;
    for (const auto& ax : result.axes) header.push_back(ax.name);
    header.insert(header.end(), {"price", "bound", "margin", "violated"});
    rgbm::CsvWriter csv(cfg.out_dir + "/sweep_" + cfg.target + ".csv", header);
    std::int64_t n_violated = 0, n_undefined = 0;
    for (const auto& cell : result.cells) {
        std::vector<double> row = cell.coords;
        if (cell.status == rgbm::CellStatus::undefined) {
            ++n_undefined;
            row.insert(row.end(), {std::nan(""), std::nan(""), std::nan(""), -1.0});
        } else {
            if (cell.status == rgbm::CellStatus::violated) ++n_violated;
            row.insert(row.end(), {cell.price, cell.bound, cell.margin,
                                   cell.status == rgbm::CellStatus::violated ? 1.0 : 0.0});
        }
        csv.row(row);
    }
    json summary{{"target", cfg.target}, {"n_cells", result.cells.size()},
                 {"n_violated", n_violated}, {"n_undefined", n_undefined}};
    if (result.first_violation) summary["first_violation"] = *result.first_violation;
    if (result.crossing) summary["crossing_maturity"] = *result.crossing;
    rgbm::write_text_file(cfg.out_dir + "/sweep_" + cfg.target + ".json",
                          summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    Config cfg;
    CLI::App app{"Reflected geometric Brownian motion: simulation, arbitrage "
                 "demonstrations, pricing formula audits and figure data"};
    app.require_subcommand(1);

    // Two-phase parse: pick up --config first so file values become defaults
    // that explicit flags then override.
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config") cfg.config_path = argv[i + 1];
    try {
        load_config_file(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", cfg.config_path, "JSON config file");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--threads", cfg.threads, "worker threads");
        sub->add_option("--mu", cfg.mu, "drift");
        sub->add_option("--sigma", cfg.sigma, "volatility");
        sub->add_option("--b", cfg.b, "reflecting boundary");
        sub->add_option("--r", cfg.r, "risk-free rate");
        sub->add_option("--q", cfg.q, "deferment rate");
        sub->add_option("--s0", cfg.s0, "initial price");
        sub->add_option("--t0", cfg.t0, "grid start time");
        sub->add_option("--horizon", cfg.horizon, "grid end time");
        sub->add_option("--steps", cfg.steps, "number of grid steps");
    };

    auto* sim = app.add_subcommand("simulate", "simulate RGBM paths");
    add_common(sim);
    sim->add_option("--n-paths", cfg.n_paths, "number of paths");
    sim->add_option("--figure", cfg.figure, "figure preset (1)");

    auto* arb = app.add_subcommand("arb", "run the boundary-harvesting strategy");
    add_common(arb);
    arb->add_option("--n-seeds,--n-paths", cfg.n_paths, "number of seeds");
    arb->add_option("--figure", cfg.figure, "figure preset (1)");

    auto* price = app.add_subcommand("price", "price a contract by several methods");
    add_common(price);
    price->add_option("--kind", cfg.kind, "call|put|nneg");
    price->add_option("--strike", cfg.strike, "strike / loan principal");
    price->add_option("--maturity", cfg.maturity, "maturity T");
    price->add_option("--t", cfg.valuation_time, "valuation time");
    price->add_option("--s", cfg.s, "current price");
    price->add_option("--methods", cfg.methods, "subset of rgbm,bs,black76,mc");
    price->add_option("--mc-paths", cfg.mc_paths, "Monte Carlo paths");
    price->add_option("--mc-steps", cfg.mc_steps, "Monte Carlo grid steps");
    price->add_option("--figure", cfg.figure, "figure preset (2|3|4)");

    auto* fig = app.add_subcommand("figure", "emit data for one of the four figures");
    add_common(fig);
    int figure_index = 0;
    fig->add_option("index", figure_index, "figure number 1..4")->required();

    auto* sweep = app.add_subcommand("sweep", "bound-violation parameter sweep");
    add_common(sweep);
    sweep->add_option("--target", cfg.target, "prop33|prop34|prop35");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(cfg);
        if (arb->parsed()) return cmd_arb(cfg);
        if (price->parsed()) return cmd_price(cfg);
        if (fig->parsed()) return cmd_figure(cfg, figure_index);
        if (sweep->parsed()) return cmd_sweep(cfg);
    } catch (const rgbm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const rgbm::PricingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPricing;
    } catch (const rgbm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
