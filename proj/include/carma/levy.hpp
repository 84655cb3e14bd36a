#pragma once

// Driving-noise increments and exact / near-exact CARMA path simulation.
//
// Every driver is normalized so that L_1 has mean 0 and variance 1; an
// increment over a step dt therefore has mean 0 and variance dt.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "carma/model.hpp"

namespace carma {

struct Driver {
    enum class Kind { BrownianMotion, CompoundPoissonNormal, GammaCentered, VarianceGamma };

    Kind kind = Kind::BrownianMotion;
    double rate = 0.0;   // CompoundPoissonNormal: jump intensity
    double shape = 0.0;  // GammaCentered
    double scale = 1.0;  // GammaCentered
    double nu = 0.0;     // VarianceGamma: variance rate of the gamma clock

    static Driver brownian() { return {}; }
    static Driver compound_poisson(double rate);
    static Driver gamma(double shape, double scale);
    static Driver variance_gamma(double nu);

    /// Throws ModelError on non-positive parameters.
    void validate() const;
    bool is_gaussian() const { return kind == Kind::BrownianMotion; }
    /// 1 for Brownian motion (exact scheme), 16 for jump drivers.
    int default_subgrid() const { return is_gaussian() ? 1 : 16; }
    std::string name() const;
};

struct IncrementSeries {
    double delta = 0.0;
    std::vector<double> values;  // increments over the delta grid
    std::vector<double> fine;    // subgrid increments (size n*m) when subgrid_factor > 1
    Driver driver;
    std::uint64_t seed = 0;
    int subgrid_factor = 1;

    std::size_t size() const { return values.size(); }
};

/// i.i.d. increments with mean 0 and variance delta. subgrid_factor = 0
/// selects the driver default; coarse values are sums of m subgrid values.
IncrementSeries generate_increments(const Driver& driver, std::uint64_t seed, double delta, std::size_t n,
                                    int subgrid_factor = 0);

enum class InitKind { Zero, StationaryGaussian, BurnIn };

struct Init {
    InitKind kind = InitKind::StationaryGaussian;
    std::size_t burn_in_steps = 0;  // BurnIn only; 0 selects default_burn_in

    static Init zero() { return {InitKind::Zero, 0}; }
    static Init stationary() { return {InitKind::StationaryGaussian, 0}; }
    static Init burn_in(std::size_t k = 0) { return {InitKind::BurnIn, k}; }
};

/// How a subgrid increment enters the state for non-Gaussian drivers.
enum class JumpScheme {
    RandomizedNode,     // injected at a uniform random time inside its subinterval
    ExponentialEuler,   // injected at the right end of its subinterval
};

struct SimulationOptions {
    Init init = Init::stationary();
    JumpScheme scheme = JumpScheme::RandomizedNode;
    bool keep_states = false;
};

/// Path on the delta grid. y[i] is Y at the end of the step whose driving
/// increment is driving[i]; x_states (p x n) is filled when requested.
struct PathGrid {
    double delta = 0.0;
    std::vector<double> y;
    Eigen::MatrixXd x_states;
    std::vector<double> driving;
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;
    std::string driver;

    std::size_t size() const { return y.size(); }
};

/// ceil(20 / (min_j |Re lambda_j| * delta)).
std::size_t default_burn_in(const CarmaModel& model, double delta);

/// Exact Gaussian transition for Brownian increments (conditioned on the
/// given increments); subgrid scheme for the other drivers.
PathGrid simulate_path(const CarmaModel& model, const IncrementSeries& increments,
                       const SimulationOptions& options = {});

/// Columns: index, t, y, x1..xp (when kept), increment. Lines in header are
/// emitted first, each prefixed with '#'.
void write_path_csv(std::ostream& os, const PathGrid& path, const std::vector<std::string>& header = {});

}  // namespace carma
