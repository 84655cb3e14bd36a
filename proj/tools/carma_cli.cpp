// carma: command-line front end for the experiments in carma/experiment.hpp.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "carma/errors.hpp"
#include "carma/experiment.hpp"

namespace {

using carma::Json;

struct Common {
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
};

int resolve_workers(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("CARMA_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw carma::IoError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw carma::ConfigError("invalid JSON in " + path + ": " + e.what());
    }
}

struct DriverFlags {
    std::string name = "brownian";
    double rate = 10.0, shape = 1.0, scale = 1.0, nu = 0.5;

    void add(CLI::App* app) {
        app->add_option("--driver", name, "brownian, compound_poisson, gamma or variance_gamma")
            ->check(CLI::IsMember({"brownian", "compound_poisson", "gamma", "variance_gamma"}));
        app->add_option("--rate", rate, "compound Poisson jump rate");
        app->add_option("--shape", shape, "gamma shape");
        app->add_option("--scale", scale, "gamma scale");
        app->add_option("--nu", nu, "variance-gamma clock variance");
    }
    Json json() const { return {{"kind", name}, {"rate", rate}, {"shape", shape}, {"scale", scale}, {"nu", nu}}; }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampled CARMA processes: simulation, sampled ARMA, noise recovery, Riemann-sum rules"};
    app.require_subcommand(1);
    app.set_version_flag("--version", carma::version());
    // -h is taken by the Riemann rule option.
    app.set_help_flag("--help", "print this help message and exit");

    Common common;
    app.add_option("--out", common.out, "output directory for artifacts")->envname("CARMA_OUT");
    app.add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { common.seed = s; common.seed_set = true; }, "master seed");
    app.add_option("--workers", common.workers, "worker threads (default: $CARMA_WORKERS, then all cores)");
    app.fallthrough();

    Json cfg;
    std::string model_path, config_path;
    std::vector<double> deltas, hs, ts;
    std::size_t n = 0, burn_in = 0;
    std::size_t paths = 2000;
    int subgrid = 0, alpha_n = 0, pq = 0;
    std::string init = "stationary", mode = "theoretical";
    bool states = false;
    DriverFlags driver;

    auto* sim = app.add_subcommand("simulate", "simulate a sampled CARMA path (CSV)");
    sim->add_option("--model", model_path, "model JSON file")->required();
    sim->add_option("--delta", deltas, "sampling step(s)")->required();
    sim->add_option("--n", n, "number of output points plus burn-in")->required();
    sim->add_option("--init", init, "stationary, zero or burn_in")
        ->check(CLI::IsMember({"stationary", "zero", "burn_in"}));
    sim->add_option("--burn-in", burn_in, "burn-in steps for --init burn_in (0: default rule)");
    sim->add_option("--subgrid", subgrid, "subgrid factor for jump drivers (0: default)");
    sim->add_flag("--states", states, "write state components");
    driver.add(sim);

    auto* sa = app.add_subcommand("sample-arma", "exact and asymptotic sampled ARMA (JSON)");
    sa->add_option("--model", model_path, "model JSON file")->required();
    sa->add_option("--delta", deltas, "sampling step(s)")->required();

    auto* al = app.add_subcommand("alpha", "P_n coefficients and roots (JSON)");
    al->add_option("--n", alpha_n, "index n")->required()->check(CLI::Range(0, 40));

    auto* ri = app.add_subcommand("riemann", "ARMA form of the approximating Riemann sum (JSON)");
    ri->add_option("--model", model_path, "model JSON file");
    ri->add_option("--delta", deltas, "sampling step(s)");
    ri->add_option("--h", hs, "rule(s) in [0, 1]");
    auto* rm = ri->add_subcommand("match", "matching rules for p - q");
    rm->add_option("--pq", pq, "p - q")->required();

    auto* rc = app.add_subcommand("recover", "Monte Carlo noise-recovery error (JSON)");
    rc->add_option("--model", model_path, "model JSON file")->required();
    rc->add_option("--delta", deltas, "sampling step(s)")->required();
    rc->add_option("--t", ts, "horizon(s)")->required();
    rc->add_option("--paths", paths, "number of paths");
    rc->add_option("--subgrid", subgrid, "subgrid factor for jump drivers (0: default)");
    driver.add(rc);

    auto* ks = app.add_subcommand("kernel-study", "kernel estimates for the three study models (CSV)");
    ks->add_option("--delta", deltas, "sampling step(s), default 0.25 and 1/64");
    ks->add_option("--mode", mode, "theoretical or empirical")->check(CLI::IsMember({"theoretical", "empirical"}));
    ks->add_option("--n", n, "path length in empirical mode");

    auto* rn = app.add_subcommand("run", "run an experiment described by a JSON config");
    rn->add_option("--config", config_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::path base_dir;
        auto model_json = [&]() -> Json {
            if (model_path.empty()) throw carma::ConfigError("--model is required");
            return read_json(model_path);
        };
        if (*sim) {
            cfg = {{"kind", "simulate"}, {"model", model_json()}, {"deltas", deltas}, {"n", n},
                   {"init", init},       {"burn_in", burn_in},    {"subgrid", subgrid},
                   {"keep_states", states}, {"drivers", Json::array({driver.json()})}};
        } else if (*sa) {
            cfg = {{"kind", "sample_arma"}, {"model", model_json()}, {"deltas", deltas}};
        } else if (*al) {
            cfg = {{"kind", "alpha"}, {"n", alpha_n}};
        } else if (*rm) {
            cfg = {{"kind", "riemann_match"}, {"pq", pq}};
        } else if (*ri) {
            if (deltas.empty() || hs.empty()) throw carma::ConfigError("riemann needs --delta and --h");
            cfg = {{"kind", "riemann"}, {"model", model_json()}, {"deltas", deltas}, {"h", hs}};
        } else if (*rc) {
            cfg = {{"kind", "recover"}, {"model", model_json()}, {"deltas", deltas}, {"t", ts},
                   {"paths", paths},    {"subgrid", subgrid},    {"drivers", Json::array({driver.json()})}};
        } else if (*ks) {
            cfg = {{"kind", "kernel_study"}, {"mode", mode}};
            if (!deltas.empty()) cfg["deltas"] = deltas;
            if (n > 0) cfg["n"] = n;
        } else if (*rn) {
            cfg = read_json(config_path);
            base_dir = std::filesystem::path(config_path).parent_path();
        }
        if (!common.out.empty()) cfg["out"] = common.out;
        if (common.seed_set) cfg["seed"] = common.seed;
        if (common.workers > 0 || !cfg.contains("workers")) cfg["workers"] = resolve_workers(common.workers);

        const carma::ExperimentConfig config = carma::parse_config(cfg, base_dir);
        return carma::run(config, std::cout, std::cerr);
    } catch (const carma::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const carma::ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 2;
    } catch (const carma::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
