#include "carma/levy.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "carma/errors.hpp"
#include "carma/linalg.hpp"
#include "carma/rng.hpp"

namespace carma {

Driver Driver::compound_poisson(double rate) {
    Driver d;
    d.kind = Kind::CompoundPoissonNormal;
    d.rate = rate;
    d.validate();
    return d;
}

Driver Driver::gamma(double shape, double scale) {
    Driver d;
    d.kind = Kind::GammaCentered;
    d.shape = shape;
    d.scale = scale;
    d.validate();
    return d;
}

Driver Driver::variance_gamma(double nu) {
    Driver d;
    d.kind = Kind::VarianceGamma;
    d.nu = nu;
    d.validate();
    return d;
}

void Driver::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    switch (kind) {
        case Kind::BrownianMotion:
            return;
        case Kind::CompoundPoissonNormal:
            if (!positive(rate)) throw ModelError("compound Poisson driver needs rate > 0");
            return;
        case Kind::GammaCentered:
            if (!positive(shape) || !positive(scale)) throw ModelError("gamma driver needs shape > 0 and scale > 0");
            return;
        case Kind::VarianceGamma:
            if (!positive(nu)) throw ModelError("variance-gamma driver needs nu > 0");
            return;
    }
}

std::string Driver::name() const {
    switch (kind) {
        case Kind::BrownianMotion: return "brownian";
        case Kind::CompoundPoissonNormal: return "compound_poisson";
        case Kind::GammaCentered: return "gamma";
        case Kind::VarianceGamma: return "variance_gamma";
    }
    return "unknown";
}

IncrementSeries generate_increments(const Driver& driver, std::uint64_t seed, double delta, std::size_t n,
                                    int subgrid_factor) {
    driver.validate();
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ModelError("increment step must be positive");
    if (n == 0) throw ModelError("increment count must be at least 1");
    if (subgrid_factor < 0) throw ModelError("subgrid factor must be positive");
    const int m = subgrid_factor == 0 ? driver.default_subgrid() : subgrid_factor;

    IncrementSeries out;
    out.delta = delta;
    out.driver = driver;
    out.seed = seed;
    out.subgrid_factor = m;

    const std::size_t total = n * static_cast<std::size_t>(m);
    const double dt = delta / m;
    std::vector<double> fine(total, 0.0);

    Philox rng(seed, kIncrementStream);
    std::normal_distribution<double> normal;
    switch (driver.kind) {
        case Driver::Kind::BrownianMotion: {
            const double s = std::sqrt(dt);
            for (double& v : fine) v = s * normal(rng);
            break;
        }
        case Driver::Kind::CompoundPoissonNormal: {
            // Arrival times from exponential gaps; jumps N(0, 1/rate).
            std::exponential_distribution<double> gap(driver.rate);
            std::vector<std::uint32_t> counts(total, 0);
            const double horizon = delta * static_cast<double>(n);
            for (double t = gap(rng); t < horizon; t += gap(rng)) {
                const auto bin = std::min(total - 1, static_cast<std::size_t>(t / dt));
                ++counts[bin];
            }
            for (std::size_t k = 0; k < total; ++k)
                if (counts[k] > 0) fine[k] = std::sqrt(counts[k] / driver.rate) * normal(rng);
            break;
        }
        case Driver::Kind::GammaCentered: {
            // Gamma(shape*dt, scale) centered and divided by scale*sqrt(shape).
            std::gamma_distribution<double> g(driver.shape * dt, 1.0);
            const double mean = driver.shape * dt;
            const double norm = 1.0 / std::sqrt(driver.shape);
            for (double& v : fine) v = (g(rng) - mean) * norm;
            break;
        }
        case Driver::Kind::VarianceGamma: {
            std::gamma_distribution<double> g(dt / driver.nu, driver.nu);
            for (double& v : fine) v = std::sqrt(g(rng)) * normal(rng);
            break;
        }
    }

    out.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < m; ++k) out.values[i] += fine[i * m + k];
    if (m > 1) out.fine = std::move(fine);
    return out;
}

std::size_t default_burn_in(const CarmaModel& model, double delta) {
    return static_cast<std::size_t>(std::ceil(20.0 / (model.min_abs_ar_real() * delta)));
}

namespace {

// Symmetric square root factor F with F F^T = M; negative eigenvalues from
// rounding are clamped.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal();
}

// v(s) = e^{A dt s} e_p for s in [0, 1]: Taylor expansion about the nearest
// node below s, with enough nodes that each expansion step is short.
class ColumnExp {
public:
    ColumnExp(const Eigen::MatrixXd& a, double dt) : p_(a.rows()) {
        const double norm = a.cwiseAbs().rowwise().sum().maxCoeff() * dt;
        nodes_ = std::max(1, static_cast<int>(std::ceil(4.0 * norm)));
        width_ = 1.0 / nodes_;
        coeffs_.resize(nodes_);
        Eigen::VectorXd ep = Eigen::VectorXd::Zero(p_);
        ep(p_ - 1) = 1.0;
        const Eigen::MatrixXd adt = a * dt;
        for (int i = 0; i < nodes_; ++i) {
            Eigen::VectorXd w = linalg::expm(adt * (i * width_)) * ep;
            auto& c = coeffs_[i];
            c.resize(kTerms);
            for (int j = 0; j < kTerms; ++j) {
                c[j] = w;
                w = adt * w / static_cast<double>(j + 1);
            }
        }
    }

    void eval(double s, double* out) const {
        const int i = std::min(nodes_ - 1, static_cast<int>(s / width_));
        const double r = s - i * width_;
        const auto& c = coeffs_[i];
        for (Eigen::Index k = 0; k < p_; ++k) out[k] = c[kTerms - 1](k);
        for (int j = kTerms - 2; j >= 0; --j)
            for (Eigen::Index k = 0; k < p_; ++k) out[k] = out[k] * r + c[j](k);
    }

private:
    static constexpr int kTerms = 18;
    Eigen::Index p_;
    int nodes_;
    double width_;
    std::vector<std::vector<Eigen::VectorXd>> coeffs_;
};

}  // namespace

PathGrid simulate_path(const CarmaModel& model, const IncrementSeries& inc, const SimulationOptions& options) {
    const std::size_t n = inc.size();
    const int m = inc.subgrid_factor;
    if (n == 0) throw ModelError("empty increment series");
    if (m < 1) throw ModelError("subgrid factor must be positive");
    if (m > 1 && inc.fine.size() != n * static_cast<std::size_t>(m))
        throw ModelError("subgrid increments do not match subgrid factor");

    const int p = model.p();
    const double sigma = model.sigma();
    const double dt = inc.delta / m;
    const Eigen::MatrixXd& a = model.companion();
    const Eigen::MatrixXd trans = linalg::expm(a * dt);

    std::size_t burn = 0;
    if (options.init.kind == InitKind::BurnIn)
        burn = options.init.burn_in_steps > 0 ? options.init.burn_in_steps : default_burn_in(model, inc.delta);
    if (burn >= n) throw ModelError("burn-in consumes the whole increment series");

    Philox aux(inc.seed, kPathAuxStream);
    std::normal_distribution<double> normal;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
    if (options.init.kind == InitKind::StationaryGaussian) {
        const Eigen::MatrixXd f = psd_factor(sigma * sigma * stationary_state_covariance(model));
        Eigen::VectorXd z(p);
        for (int k = 0; k < p; ++k) z(k) = normal(aux);
        x = f * z;
    }

    // Gaussian transition conditioned on the driving increment: joint law of
    // (xi, dL) from the Gramian of the augmented system (A, 0; sigma e_p, 1).
    const bool gaussian = inc.driver.is_gaussian();
    Eigen::VectorXd gain;
    Eigen::MatrixXd noise_factor;
    if (gaussian) {
        Eigen::MatrixXd at = Eigen::MatrixXd::Zero(p + 1, p + 1);
        at.topLeftCorner(p, p) = a;
        Eigen::VectorXd bt = Eigen::VectorXd::Zero(p + 1);
        bt(p - 1) = sigma;
        bt(p) = 1.0;
        const Eigen::MatrixXd c = linalg::integrated_covariance(at, bt * bt.transpose(), dt);
        const Eigen::VectorXd cross = c.topRightCorner(p, 1);
        gain = cross / dt;
        noise_factor = psd_factor(c.topLeftCorner(p, p) - cross * cross.transpose() / dt);
    }
    const ColumnExp column(a, dt);

    PathGrid out;
    out.delta = inc.delta;
    out.burn_in = burn;
    out.seed = inc.seed;
    out.driver = inc.driver.name();
    out.y.reserve(n - burn);
    out.driving.reserve(n - burn);
    if (options.keep_states) out.x_states.resize(p, static_cast<Eigen::Index>(n - burn));

    std::vector<double> next(p), v(p), z(p);
    const Eigen::VectorXd& bvec = model.b_vector();
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
            const double d = m == 1 ? inc.values[i] : inc.fine[i * m + k];
            for (int r = 0; r < p; ++r) {
                double acc = 0.0;
                for (int c = 0; c < p; ++c) acc += trans(r, c) * x(c);
                next[r] = acc;
            }
            if (gaussian) {
                for (int r = 0; r < p; ++r) z[r] = normal(aux);
                for (int r = 0; r < p; ++r) {
                    double acc = gain(r) * d;
                    for (int c = 0; c < p; ++c) acc += noise_factor(r, c) * z[c];
                    next[r] += acc;
                }
            } else if (d != 0.0) {
                if (options.scheme == JumpScheme::RandomizedNode) {
                    column.eval(aux.uniform(), v.data());
                    for (int r = 0; r < p; ++r) next[r] += sigma * d * v[r];
                } else {
                    next[p - 1] += sigma * d;
                }
            }
            for (int r = 0; r < p; ++r) x(r) = next[r];
        }
        if (i >= burn) {
            out.y.push_back(bvec.dot(x));
            out.driving.push_back(inc.values[i]);
            if (options.keep_states) out.x_states.col(static_cast<Eigen::Index>(i - burn)) = x;
        }
    }
    return out;
}

void write_path_csv(std::ostream& os, const PathGrid& path, const std::vector<std::string>& header) {
    for (const auto& line : header) os << "# " << line << '\n';
    const bool states = path.x_states.cols() == static_cast<Eigen::Index>(path.size()) && path.size() > 0;
    os << "index,t,y";
    if (states)
        for (Eigen::Index k = 0; k < path.x_states.rows(); ++k) os << ",x" << (k + 1);
    os << ",increment\n";
    os.precision(17);
    for (std::size_t i = 0; i < path.size(); ++i) {
        os << i << ',' << (static_cast<double>(i) + 1.0) * path.delta << ',' << path.y[i];
        if (states)
            for (Eigen::Index k = 0; k < path.x_states.rows(); ++k) os << ',' << path.x_states(k, static_cast<Eigen::Index>(i));
        os << ',' << path.driving[i] << '\n';
    }
}

}  // namespace carma
