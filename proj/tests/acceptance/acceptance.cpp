// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Set CARMA_WORKERS to spread the Monte Carlo runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "carma/alpha.hpp"
#include "carma/errors.hpp"
#include "carma/experiment.hpp"
#include "carma/recovery.hpp"
#include "carma/riemann.hpp"
#include "carma/spectral.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace carma;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects sub-checks; the first failing one is reported.
struct Checker {
    Outcome out;
    std::ostringstream notes;

    void expect(bool cond, const std::string& what) {
        if (!cond && out.ok) {
            out.ok = false;
            out.detail = what;
        }
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os.precision(15);
        os << what << ": got " << got << ", want " << want << " (tol " << tol << ")";
        expect(std::abs(got - want) <= tol, os.str());
    }
    Outcome finish() {
        if (out.ok) out.detail = notes.str();
        return out;
    }
};

int workers() {
    if (const char* env = std::getenv("CARMA_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

constexpr double kSqrt3 = std::numbers::sqrt3;

Outcome a1_alpha() {
    Checker c;
    const ExactAlpha p1 = alpha_exact_by_recursion(1);
    c.expect(p1.eval_numerator(Rational(3)) == 0, "P_1(3) is not exactly zero");
    const std::vector<double> r1 = xi_roots(1);
    c.expect(r1.size() == 1 && r1[0] == 3.0, "xi_roots(1) != {3}");
    const std::vector<double> r2 = xi_roots(2);
    c.expect(r2.size() == 2, "xi_roots(2) size");
    if (r2.size() == 2) {
        c.near(r2[0], (15.0 - std::sqrt(105.0)) / 2.0, 1e-10, "xi_2 lower");
        c.near(r2[1], (15.0 + std::sqrt(105.0)) / 2.0, 1e-10, "xi_2 upper");
        c.notes << "xi_2 = {" << r2[0] << ", " << r2[1] << "}";
    }
    return c.finish();
}

Outcome a2_eta() {
    Checker c;
    const std::vector<double> e1 = eta_values(1);
    c.expect(e1.size() == 1, "eta_values(1) size");
    if (!e1.empty()) c.near(e1[0], 2.0 - kSqrt3, 1e-12, "eta for p-q=2");
    const std::vector<double> e2 = eta_values(2);
    c.expect(e2.size() == 2, "eta_values(2) size");
    if (e2.size() == 2) {
        const double s = std::sqrt(105.0);
        const double hi = (13.0 - s - std::sqrt(270.0 - 26.0 * s)) / 2.0;
        const double lo = (13.0 + s - std::sqrt(270.0 + 26.0 * s)) / 2.0;
        // eta is decreasing in xi, so the smaller root gives the larger eta.
        c.near(e2[0], hi, 1e-6, "eta_1 for p-q=3");
        c.near(e2[1], lo, 1e-6, "eta_2 for p-q=3");
        c.notes.precision(9);
        c.notes << "eta(p-q=3) = {" << e2[0] << ", " << e2[1] << "}";
    }
    return c.finish();
}

Outcome a3_spectral() {
    Checker c;
    const CarmaModel car2({-0.7, -1.2}, {}, 1.0);
    const double d2 = 1e-3;
    const SampledArma a2 = sampled_arma(car2, d2);
    // Theta(z) = 1 - theta z, so the coefficient theta is -a2.theta[1].
    c.near(-a2.theta[1], kSqrt3 - 2.0, 1e-2, "CAR(2) MA coefficient");
    const double r2 = a2.sigma2_delta / (std::pow(d2, 3) * (2.0 + kSqrt3) / 6.0);
    c.expect(r2 >= 0.99 && r2 <= 1.01, "CAR(2) sigma_delta^2 ratio " + std::to_string(r2));

    const CarmaModel car3({-0.7, -1.2, -2.6}, {}, 1.0);
    const double d3 = std::ldexp(1.0, -10);
    const SampledArma a3 = sampled_arma(car3, d3);
    const std::vector<double> eta = eta_values(2);
    const double r3 = a3.sigma2_delta / (std::pow(d3, 5) / (120.0 * eta[0] * eta[1]));
    c.expect(r3 >= 0.95 && r3 <= 1.05, "CAR(3) sigma_delta^2 ratio " + std::to_string(r3));
    c.notes.precision(6);
    c.notes << "theta=" << -a2.theta[1] << " ratio2=" << r2 << " ratio3=" << r3;
    return c.finish();
}

Outcome a4_rules() {
    Checker c;
    const OptimalRules r2 = optimal_rules(2);
    const OptimalRules r3 = optimal_rules(3);
    const double h2[2] = {(3.0 - kSqrt3) / 6.0, (3.0 + kSqrt3) / 6.0};
    const double s = std::sqrt(225.0 - 30.0 * std::sqrt(30.0));
    const double h3[2] = {(15.0 - s) / 30.0, (15.0 + s) / 30.0};
    c.expect(r2.matching_h.size() == 2 && r3.matching_h.size() == 2, "rule counts");
    if (r2.matching_h.size() == 2 && r3.matching_h.size() == 2)
        for (int i = 0; i < 2; ++i) {
            c.near(r2.matching_h[i], h2[i], 1e-12, "p-q=2 rule");
            c.near(r3.matching_h[i], h3[i], 1e-12, "p-q=3 rule");
        }
    const std::vector<double> n2 = match_h_numerically(2);
    const std::vector<double> n3 = match_h_numerically(3);
    c.expect(n2.size() == 2 && n3.size() == 2, "numeric rule counts");
    if (n2.size() == 2 && n3.size() == 2)
        for (int i = 0; i < 2; ++i) {
            c.near(n2[i], h2[i], 1e-8, "numeric p-q=2 rule");
            c.near(n3[i], h3[i], 1e-8, "numeric p-q=3 rule");
        }
    const std::vector<double> chi = chi_roots(2, h2[1]);
    c.expect(chi.size() == 1, "chi_roots(2) size");
    if (chi.size() == 1) c.near(chi[0], kSqrt3 - 2.0, 1e-12, "chi at the invertible rule");
    c.notes.precision(12);
    c.notes << "h3 = {" << n3[0] << ", " << n3[1] << "}";
    return c.finish();
}

Outcome a5_riemann_oracle() {
    Checker c;
    const CarmaModel models[2] = {CarmaModel({-0.7, -1.2}, {3.0}, 1.0), CarmaModel({-0.7, -1.2, -2.6}, {}, 1.0)};
    double worst = 0.0;
    for (const CarmaModel& m : models)
        for (const double delta : {0.25, std::ldexp(1.0, -6)})
            for (const double h : {0.25, 0.5, 0.75}) {
                const RiemannArma r = riemann_arma_coefficients(m, delta, h);
                const std::vector<double> ma = r.ma_polynomial();
                const std::vector<double> lib = ma_autocovariance(ma, m.sigma() * m.sigma() * delta);
                const std::vector<long double> ref =
                    oracle::riemann_filtered_autocovariance(m, delta, h, m.p() + 1);
                for (int k = 0; k <= m.p(); ++k) {
                    const double got = k < static_cast<int>(lib.size()) ? lib[k] : 0.0;
                    const double err = std::abs(got - static_cast<double>(ref[k])) / static_cast<double>(ref[0]);
                    worst = std::max(worst, err);
                    c.expect(err <= 1e-6, "p=" + std::to_string(m.p()) + " delta=" + std::to_string(delta) +
                                              " h=" + std::to_string(h) + " lag " + std::to_string(k) +
                                              " rel err " + std::to_string(err));
                }
            }
    c.notes << "max rel err " << worst;
    return c.finish();
}

Outcome a6_invertible_recovery() {
    Checker c;
    const CarmaModel models[2] = {CarmaModel({-0.7, -1.2}, {}, 1.0), CarmaModel({-0.7, -1.2}, {1.0}, 1.0)};
    const char* names[2] = {"CAR(2)", "CARMA(2,1)"};
    const Driver drivers[2] = {Driver::brownian(), Driver::compound_poisson(10.0)};
    RecoveryMcOptions opt;
    opt.workers = workers();
    c.notes.precision(3);
    for (int mi = 0; mi < 2; ++mi)
        for (const Driver& d : drivers) {
            std::vector<McEstimate> est;
            for (const int e : {6, 8, 10})
                est.push_back(recovery_error_mc(models[mi], std::ldexp(1.0, -e), 1.0, 2000, d, 20240601, opt));
            const std::string tag = std::string(names[mi]) + "/" + d.name();
            c.expect(est[2].mean < 0.02, tag + " MSE at 2^-10 is " + std::to_string(est[2].mean));
            c.expect(est[0].mean > est[1].mean && est[1].mean > est[2].mean,
                     tag + " MSE does not decrease along delta");
            c.notes << tag << ":";
            for (const McEstimate& x : est) c.notes << ' ' << x.mean << "+-" << x.mc_stderr;
            c.notes << "; ";
        }
    return c.finish();
}

Outcome a7_noninvertible_recovery() {
    Checker c;
    const CarmaModel m({-0.7, -1.2}, {-1.0}, 1.0);
    RecoveryMcOptions opt;
    opt.workers = workers();
    c.notes.precision(4);
    for (const double t : {1.0, 2.0}) {
        const McEstimate est = recovery_error_mc(m, std::ldexp(1.0, -10), t, 2000, Driver::brownian(), 20240602, opt);
        const double want = 4.0 * (std::exp(-t) + t - 1.0);
        const double z = std::abs(est.mean - want) / est.mc_stderr;
        c.expect(z <= 3.0, "t=" + std::to_string(t) + " MSE " + std::to_string(est.mean) + " vs " +
                               std::to_string(want) + " (" + std::to_string(z) + " stderr)");
        c.notes << "t=" << t << ": " << est.mean << "+-" << est.mc_stderr << " vs " << want << "; ";
    }
    return c.finish();
}

// max_j |ghat_j - g(delta (j + h))| / |g(delta (j + h))| over the first eight points.
double kernel_max_rel_error(const CarmaModel& m, const KernelEstimate& est, double delta, double h) {
    double worst = 0.0;
    for (std::size_t j = 0; j < est.ghat.size(); ++j) {
        const double g = static_cast<double>(oracle::kernel(m, delta * (static_cast<double>(j) + h)));
        const double err = std::abs(est.ghat[j] - g);
        worst = std::max(worst, g != 0.0 ? err / std::abs(g) : (err == 0.0 ? 0.0 : INFINITY));
    }
    return worst;
}

Outcome a8_kernel_study() {
    Checker c;
    const double delta = std::ldexp(1.0, -6);
    std::vector<double> grid;
    for (int j = 0; j < 8; ++j) grid.push_back(j * delta);
    const CarmaModel car2({-0.7, -1.2}, {}, 1.0);
    const CarmaModel car3({-0.7, -1.2, -2.6}, {}, 1.0);

    const double hbar = (3.0 + kSqrt3) / 6.0;
    const double e2 = kernel_max_rel_error(car2, estimate_kernel(car2, delta, grid), delta, hbar);
    c.expect(e2 < 0.02, "CAR(2) max relative error " + std::to_string(e2));

    const KernelEstimate k3 = estimate_kernel(car3, delta, grid);
    double best = INFINITY, best_h = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double h = 0.05 * i;
        const double e = kernel_max_rel_error(car3, k3, delta, h);
        if (e < best) {
            best = e;
            best_h = h;
        }
    }
    c.expect(best >= 0.005, "CAR(3) h=" + std::to_string(best_h) + " reaches " + std::to_string(best));
    c.notes.precision(4);
    c.notes << "CAR(2) err " << e2 << "; CAR(3) best h=" << best_h << " err " << best;
    return c.finish();
}

Outcome a9_properties() {
    Checker c;
    using namespace carma::testing;
    const std::pair<const char*, std::function<PropertyResult()>> suites[] = {
        {"min-phase", [] { return min_phase_property(); }},
        {"factorization round-trip", [] { return factorization_round_trip_property(); }},
        {"Wold identity", [] { return wold_identity_property(); }},
        {"filter round-trip", [] { return filter_round_trip_property(); }},
        {"kernel equivalence", [] { return kernel_equivalence_property(); }},
        {"(p-1)-dependence", [] { return dependence_property(); }},
    };
    for (const auto& [name, run] : suites) {
        const PropertyResult r = run();
        c.expect(r.ok && r.cases == 100, std::string(name) + ": " + r.detail);
        c.notes << name << ' ' << r.cases << "/100; ";
    }
    return c.finish();
}

struct Criterion {
    const char* id;
    double budget_s;
    Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
    const Criterion all[] = {
        {"A1", 1.0, a1_alpha},
        {"A2", 1.0, a2_eta},
        {"A3", 10.0, a3_spectral},
        {"A4", 5.0, a4_rules},
        {"A5", 30.0, a5_riemann_oracle},
        {"A6", 600.0, a6_invertible_recovery},
        {"A7", 600.0, a7_noninvertible_recovery},
        {"A8", 60.0, a8_kernel_study},
        {"A9", 120.0, a9_properties},
    };
    std::vector<std::string> only(argv + 1, argv + argc);
    int failed = 0;
    for (const Criterion& cr : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), cr.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.ok && secs > cr.budget_s) {
            o.ok = false;
            o.detail = "over time budget of " + std::to_string(cr.budget_s) + " s";
        }
        failed += !o.ok;
        std::printf("%s %s (%.2f s) %s\n", cr.id, o.ok ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
    }
    if (only.empty()) {
        // Reported, not gated: no rate is known for the product convergence.
        const CarmaModel car2({-0.7, -1.2}, {}, 1.0);
        RecoveryMcOptions opt;
        opt.workers = workers();
        std::printf("info: L1 product error, CAR(2), t=1, s=2, 500 paths:");
        for (const int e : {6, 8, 10}) {
            const McEstimate est =
                recovery_product_error_mc(car2, std::ldexp(1.0, -e), 1.0, 2.0, 500, Driver::brownian(), 20240603, opt);
            std::printf(" 2^-%d: %.3g+-%.2g", e, est.mean, est.mc_stderr);
        }
        std::printf("\n");
    }
    return failed == 0 ? 0 : 1;
}
