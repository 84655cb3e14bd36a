#pragma once

// Config-driven experiments behind the command-line tool. Every artifact
// starts with '#' lines carrying the version, the config echo and the seed.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "carma/json_io.hpp"
#include "carma/levy.hpp"
#include "carma/model.hpp"

namespace carma {

enum class ExperimentKind { Simulate, SampleArma, Alpha, Riemann, RiemannMatch, Recover, KernelStudy };

enum class KernelMode { Theoretical, Empirical };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Simulate;
    std::optional<CarmaModel> model;
    std::vector<double> deltas;
    std::vector<Driver> drivers;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::vector<double> h;
    std::vector<double> t;
    std::filesystem::path out_dir;  // empty: results on the output stream only
    int workers = 1;

    std::size_t n = 0;  // simulate: path length; empirical kernel study: path length
    int alpha_n = 0;
    int pq = 0;
    Init init = Init::stationary();
    int subgrid = 0;
    bool keep_states = false;
    KernelMode kernel_mode = KernelMode::Theoretical;
    std::size_t kernel_points = 8;

    Json echo;  // normalized config as given
};

std::string version();
std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

/// Validates and fills defaults. A string "model" is read as a path relative
/// to base_dir. Throws ConfigError (and IoError for unreadable model files).
ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base_dir = {});

/// Runs the experiment, prints its JSON summary to out and writes artifact
/// files into out_dir. Returns 0, or 2 (config), 3 (numeric), 4 (I/O);
/// the error message goes to err.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Study models: CARMA(2,1) with mu = 3, CAR(2) and CAR(3) with AR roots
/// -0.7, -1.2, -2.6 and sigma = 1.
struct StudyModel {
    std::string name;
    CarmaModel model;
};
std::vector<StudyModel> kernel_study_models();

/// Columns j, t, ghat, g_h0, g_h0.5, g_h1 and g_rule1.. for the rule
/// candidates; rule values go in the header.
void write_kernel_study_csv(std::ostream& os, const CarmaModel& model, double delta, std::span<const double> ghat,
                            const std::vector<std::string>& header);

}  // namespace carma
