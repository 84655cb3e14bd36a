#include "carma/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "carma/alpha.hpp"
#include "carma/errors.hpp"
#include "carma/recovery.hpp"
#include "carma/riemann.hpp"
#include "carma/rng.hpp"
#include "carma/spectral.hpp"

#ifndef CARMA_VERSION
#define CARMA_VERSION "unknown"
#endif

namespace carma {

namespace {

namespace fs = std::filesystem;

std::vector<double> positive_list(const Json& j, const char* key) {
    const Json& v = j.at(key);
    if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be a list of numbers");
    std::vector<double> out;
    for (const Json& e : v) {
        if (!e.is_number() || !(e.get<double>() > 0.0))
            throw ConfigError(std::string("'") + key + "' entries must be positive numbers");
        out.push_back(e.get<double>());
    }
    if (out.empty()) throw ConfigError(std::string("'") + key + "' must not be empty");
    return out;
}

Json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

std::vector<std::string> header_lines(const ExperimentConfig& c) {
    return {"version: " + version(), "config: " + c.echo.dump(), "seed: " + std::to_string(c.seed)};
}

std::ofstream open_artifact(const ExperimentConfig& c, const std::string& name) {
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + c.out_dir.string() + ": " + ec.message());
    const fs::path path = c.out_dir / name;
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    return os;
}

void write_json_artifact(const ExperimentConfig& c, const std::string& name, const Json& result) {
    if (c.out_dir.empty()) return;
    std::ofstream os = open_artifact(c, name);
    for (const auto& line : header_lines(c)) os << "# " << line << '\n';
    os << result.dump(2) << '\n';
    if (!os) throw IoError("failed while writing " + name);
}

const CarmaModel& need_model(const ExperimentConfig& c) {
    if (!c.model) throw ConfigError("this experiment needs a 'model'");
    return *c.model;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

Json run_simulate(const ExperimentConfig& c, std::ostream& out) {
    const CarmaModel& model = need_model(c);
    require_valid(model);
    Json result = Json::array();
    std::uint64_t stream = 0;
    for (std::size_t di = 0; di < c.deltas.size(); ++di) {
        for (const Driver& driver : c.drivers) {
            const std::uint64_t seed = derive_seed(c.seed, stream++);
            const IncrementSeries inc = generate_increments(driver, seed, c.deltas[di], c.n, c.subgrid);
            SimulationOptions opt;
            opt.init = c.init;
            opt.keep_states = c.keep_states;
            const PathGrid path = simulate_path(model, inc, opt);
            std::vector<std::string> header = header_lines(c);
            header.push_back("delta: " + format_double(c.deltas[di]));
            header.push_back("driver: " + to_json(driver).dump());
            header.push_back("path_seed: " + std::to_string(seed));
            const std::string name = "path_" + driver.name() + "_" + std::to_string(di) + ".csv";
            if (c.out_dir.empty()) {
                write_path_csv(out, path, header);
            } else {
                std::ofstream os = open_artifact(c, name);
                write_path_csv(os, path, header);
                if (!os) throw IoError("failed while writing " + name);
            }
            result.push_back({{"delta", c.deltas[di]},
                              {"driver", to_json(driver)},
                              {"path_seed", seed},
                              {"points", path.size()},
                              {"burn_in", path.burn_in},
                              {"file", c.out_dir.empty() ? "" : name}});
        }
    }
    return result;
}

Json run_sample_arma(const ExperimentConfig& c) {
    const CarmaModel& model = need_model(c);
    require_valid(model);
    Json result = Json::array();
    for (const double delta : c.deltas) {
        Json entry = {{"delta", delta}, {"exact", to_json(sampled_arma(model, delta))}};
        if (is_invertible(model)) entry["asymptotic"] = to_json(asymptotic_arma(model, delta));
        result.push_back(entry);
    }
    return result;
}

Json run_alpha(const ExperimentConfig& c) {
    const ExactAlpha exact = alpha_exact_by_recursion(c.alpha_n);
    Json numerator = Json::array(), numerator_exact = Json::array();
    for (const BigInt& v : exact.numerator) {
        numerator.push_back(v.convert_to<double>());
        numerator_exact.push_back(v.str());
    }
    Json result = {{"n", c.alpha_n}, {"numerator", numerator}, {"numerator_exact", numerator_exact},
                   {"normalization", "(2n+1)! x^(n+1)"}};
    if (c.alpha_n >= 1) {
        const std::vector<double> roots = xi_roots(c.alpha_n);
        Json etas = Json::array();
        for (const double xi : roots) etas.push_back(eta(xi));
        result["roots"] = roots;
        result["eta"] = etas;
    } else {
        result["roots"] = Json::array();
        result["eta"] = Json::array();
    }
    return result;
}

Json run_riemann(const ExperimentConfig& c) {
    const CarmaModel& model = need_model(c);
    require_valid(model);
    Json result = Json::array();
    for (const double delta : c.deltas)
        for (const double h : c.h) result.push_back(to_json(riemann_arma_coefficients(model, delta, h)));
    return result;
}

Json run_riemann_match(const ExperimentConfig& c) {
    const OptimalRules rules = optimal_rules(c.pq);
    Json result = {{"pq", c.pq},
                   {"all_h", rules.all_h},
                   {"matching_h", rules.matching_h},
                   {"invertible_matching_h", rules.invertible_matching_h}};
    if (c.pq == 2 || c.pq == 3) result["numeric_h"] = match_h_numerically(c.pq);
    return result;
}

Json run_recover(const ExperimentConfig& c) {
    const CarmaModel& model = need_model(c);
    require_valid(model);
    if (c.paths < 2) throw ConfigError("'paths' must be at least 2");
    const bool closed = model.p() == 2 && model.q() <= 1 && model.has_distinct_ar_roots();
    Json result = Json::array();
    std::uint64_t stream = 0;
    for (const double delta : c.deltas)
        for (const Driver& driver : c.drivers)
            for (const double t : c.t) {
                RecoveryMcOptions opt;
                opt.workers = c.workers;
                opt.subgrid_factor = c.subgrid;
                const std::uint64_t seed = derive_seed(c.seed, stream++);
                const McEstimate est = recovery_error_mc(model, delta, t, c.paths, driver, seed, opt);
                Json entry = {{"delta", delta},
                              {"driver", to_json(driver)},
                              {"t", t},
                              {"paths", est.paths},
                              {"mse", est.mean},
                              {"stderr", est.mc_stderr},
                              {"run_seed", seed}};
                if (closed) {
                    entry["closed_form"] = carma2_error_closed_form(model, delta, t);
                    entry["limit"] = carma2_error_limit(model, t);
                }
                // Product check against the largest horizon, reported only.
                const double s = *std::max_element(c.t.begin(), c.t.end());
                if (t < s) {
                    const McEstimate prod = recovery_product_error_mc(model, delta, t, s, c.paths, driver, seed, opt);
                    entry["product_l1"] = {{"s", s}, {"mean", prod.mean}, {"stderr", prod.mc_stderr}};
                }
                result.push_back(entry);
            }
    return result;
}

std::vector<double> study_rules(const CarmaModel& model) {
    const int d = model.p() - model.q();
    if (d < 2 || d > 3) return {};
    return optimal_rules(d).matching_h;
}

Json run_kernel_study(const ExperimentConfig& c) {
    if (c.out_dir.empty()) throw ConfigError("kernel-study needs an output directory ('out' or --out)");
    Json result = Json::array();
    std::uint64_t stream = 0;
    for (const StudyModel& sm : kernel_study_models()) {
        for (std::size_t di = 0; di < c.deltas.size(); ++di) {
            const double delta = c.deltas[di];
            std::vector<double> grid(c.kernel_points);
            for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = delta * static_cast<double>(j);
            KernelEstimate est;
            std::uint64_t seed = 0;
            if (c.kernel_mode == KernelMode::Theoretical) {
                est = estimate_kernel(sm.model, delta, grid);
            } else {
                seed = derive_seed(c.seed, stream++);
                const IncrementSeries inc = generate_increments(Driver::brownian(), seed, delta, c.n);
                const PathGrid path = simulate_path(sm.model, inc, {});
                est = estimate_kernel(path, sm.model.p(), grid);
            }
            std::vector<std::string> header = header_lines(c);
            header.push_back("model: " + sm.name + " " + to_json(sm.model).dump());
            header.push_back("delta: " + format_double(delta));
            header.push_back(std::string("mode: ") +
                             (c.kernel_mode == KernelMode::Theoretical ? "theoretical" : "empirical"));
            if (c.kernel_mode == KernelMode::Empirical) header.push_back("path_seed: " + std::to_string(seed));
            const std::string name = "kernel_" + sm.name + "_d" + std::to_string(di) + ".csv";
            std::ofstream os = open_artifact(c, name);
            write_kernel_study_csv(os, sm.model, delta, est.ghat, header);
            if (!os) throw IoError("failed while writing " + name);
            result.push_back({{"model", sm.name}, {"delta", delta}, {"file", name}, {"ghat", est.ghat}});
        }
        // True kernel on a fine grid for the solid curve.
        const std::string curve = "kernel_curve_" + sm.name + ".csv";
        std::ofstream os = open_artifact(c, curve);
        std::vector<std::string> header = header_lines(c);
        header.push_back("model: " + sm.name + " " + to_json(sm.model).dump());
        for (const auto& line : header) os << "# " << line << '\n';
        os << "t,g\n" << std::setprecision(17);
        for (int i = 0; i <= 500; ++i) {
            const double t = 2.5 * i / 500.0;
            os << t << ',' << (t > 0.0 ? kernel(sm.model, t) : sm.model.sigma() * sm.model.b()[sm.model.p() - 1])
               << '\n';
        }
        if (!os) throw IoError("failed while writing " + curve);
    }
    return result;
}

}  // namespace

std::string version() { return CARMA_VERSION; }

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::SampleArma: return "sample_arma";
        case ExperimentKind::Alpha: return "alpha";
        case ExperimentKind::Riemann: return "riemann";
        case ExperimentKind::RiemannMatch: return "riemann_match";
        case ExperimentKind::Recover: return "recover";
        case ExperimentKind::KernelStudy: return "kernel_study";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    for (const auto k : {ExperimentKind::Simulate, ExperimentKind::SampleArma, ExperimentKind::Alpha,
                         ExperimentKind::Riemann, ExperimentKind::RiemannMatch, ExperimentKind::Recover,
                         ExperimentKind::KernelStudy})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown experiment kind '" + s +
                      "' (simulate, sample_arma, alpha, riemann, riemann_match, recover, kernel_study)");
}

std::vector<StudyModel> kernel_study_models() {
    return {{"carma21", CarmaModel({-0.7, -1.2}, {3.0}, 1.0)},
            {"car2", CarmaModel({-0.7, -1.2}, {}, 1.0)},
            {"car3", CarmaModel({-0.7, -1.2, -2.6}, {}, 1.0)}};
}

void write_kernel_study_csv(std::ostream& os, const CarmaModel& model, double delta, std::span<const double> ghat,
                            const std::vector<std::string>& header) {
    const std::vector<double> rules = study_rules(model);
    for (const auto& line : header) os << "# " << line << '\n';
    for (std::size_t r = 0; r < rules.size(); ++r)
        os << "# rule" << (r + 1) << ": h = " << std::setprecision(17) << rules[r] << '\n';
    os << "j,t,ghat,g_h0,g_h0.5,g_h1";
    for (std::size_t r = 0; r < rules.size(); ++r) os << ",g_rule" << (r + 1);
    os << '\n' << std::setprecision(17);
    auto g_at = [&](double t) { return t > 0.0 ? kernel(model, t) : model.sigma() * model.b()[model.p() - 1]; };
    for (std::size_t j = 0; j < ghat.size(); ++j) {
        const double t = delta * static_cast<double>(j);
        os << j << ',' << t << ',' << ghat[j] << ',' << g_at(t) << ',' << g_at(t + 0.5 * delta) << ','
           << g_at(t + delta);
        for (const double h : rules) os << ',' << g_at(t + h * delta);
        os << '\n';
    }
}

ExperimentConfig parse_config(const Json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("config needs a string field 'kind'");
    ExperimentConfig c;
    c.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    c.echo = j;

    try {
        if (j.contains("model")) {
            const Json& m = j.at("model");
            if (m.is_string()) {
                fs::path path = m.get<std::string>();
                if (path.is_relative()) path = base_dir / path;
                c.model = model_from_json(read_json_file(path));
            } else {
                c.model = model_from_json(m);
            }
        }
    } catch (const ModelError& e) {
        throw ConfigError(std::string("invalid model: ") + e.what());
    }

    if (j.contains("deltas")) c.deltas = positive_list(j, "deltas");
    if (j.contains("h")) {
        for (const Json& e : j.at("h")) {
            if (!e.is_number() || e.get<double>() < 0.0 || e.get<double>() > 1.0)
                throw ConfigError("'h' entries must be numbers in [0, 1]");
            c.h.push_back(e.get<double>());
        }
    }
    if (j.contains("t")) c.t = positive_list(j, "t");
    if (j.contains("drivers")) {
        if (!j.at("drivers").is_array()) throw ConfigError("'drivers' must be a list");
        for (const Json& d : j.at("drivers")) c.drivers.push_back(driver_from_json(d));
    }
    if (c.drivers.empty()) c.drivers.push_back(Driver::brownian());

    auto non_negative_int = [&j](const char* key, long long fallback) -> long long {
        if (!j.contains(key)) return fallback;
        const Json& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
        return v.get<long long>();
    };
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            throw ConfigError("'seed' must be an integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.paths = static_cast<std::size_t>(non_negative_int("paths", 0));
    c.workers = static_cast<int>(std::max<long long>(1, non_negative_int("workers", 1)));
    c.subgrid = static_cast<int>(non_negative_int("subgrid", 0));
    c.keep_states = j.value("keep_states", false);
    c.kernel_points = static_cast<std::size_t>(non_negative_int("points", 8));
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();

    const std::string init = j.value("init", "stationary");
    if (init == "stationary") c.init = Init::stationary();
    else if (init == "zero") c.init = Init::zero();
    else if (init == "burn_in") c.init = Init::burn_in(static_cast<std::size_t>(non_negative_int("burn_in", 0)));
    else throw ConfigError("'init' must be stationary, zero or burn_in");

    auto need = [&](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string(to_string(c.kind)) + " needs " + what);
    };
    switch (c.kind) {
        case ExperimentKind::Simulate:
            need(c.model.has_value(), "a 'model'");
            need(!c.deltas.empty(), "a non-empty 'deltas' list");
            c.n = static_cast<std::size_t>(non_negative_int("n", 0));
            need(c.n > 0, "a positive path length 'n'");
            break;
        case ExperimentKind::SampleArma:
            need(c.model.has_value(), "a 'model'");
            need(!c.deltas.empty(), "a non-empty 'deltas' list");
            break;
        case ExperimentKind::Alpha:
            c.alpha_n = static_cast<int>(non_negative_int("n", -1));
            need(j.contains("n"), "an index 'n'");
            need(c.alpha_n <= 40, "'n' <= 40");
            break;
        case ExperimentKind::Riemann:
            need(c.model.has_value(), "a 'model'");
            need(!c.deltas.empty(), "a non-empty 'deltas' list");
            need(!c.h.empty(), "a non-empty rule list 'h'");
            break;
        case ExperimentKind::RiemannMatch:
            need(j.contains("pq"), "'pq' (p - q)");
            c.pq = static_cast<int>(non_negative_int("pq", 0));
            need(c.pq >= 1, "'pq' >= 1");
            break;
        case ExperimentKind::Recover:
            need(c.model.has_value(), "a 'model'");
            need(!c.deltas.empty(), "a non-empty 'deltas' list");
            need(!c.t.empty(), "a non-empty horizon list 't'");
            need(c.paths >= 2, "'paths' >= 2");
            break;
        case ExperimentKind::KernelStudy: {
            if (!j.contains("deltas")) c.deltas = {0.25, 1.0 / 64.0};
            const std::string mode = j.value("mode", "theoretical");
            if (mode == "theoretical") c.kernel_mode = KernelMode::Theoretical;
            else if (mode == "empirical") c.kernel_mode = KernelMode::Empirical;
            else throw ConfigError("'mode' must be theoretical or empirical");
            c.n = static_cast<std::size_t>(non_negative_int("n", 1 << 20));
            need(c.kernel_points >= 1, "'points' >= 1");
            need(!c.out_dir.empty(), "an output directory ('out' or --out)");
            break;
        }
    }
    return c;
}

int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    try {
        Json result;
        switch (c.kind) {
            case ExperimentKind::Simulate: result = run_simulate(c, out); break;
            case ExperimentKind::SampleArma: result = run_sample_arma(c); break;
            case ExperimentKind::Alpha: result = run_alpha(c); break;
            case ExperimentKind::Riemann: result = run_riemann(c); break;
            case ExperimentKind::RiemannMatch: result = run_riemann_match(c); break;
            case ExperimentKind::Recover: result = run_recover(c); break;
            case ExperimentKind::KernelStudy: result = run_kernel_study(c); break;
        }
        write_json_artifact(c, to_string(c.kind) + ".json", result);
        if (!(c.kind == ExperimentKind::Simulate && c.out_dir.empty())) out << result.dump(2) << '\n';
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        err << "numeric error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace carma
