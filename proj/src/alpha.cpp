#include "carma/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "carma/errors.hpp"

namespace carma {

namespace {

void require_index(int n) {
    if (n < 0) throw ModelError("alpha index must be non-negative");
}

template <class T>
T factorial(int k) {
    T f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

BigInt binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    BigInt c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

template <class T>
std::vector<T> recursion_numerator(int n) {
    std::vector<T> c{T(1)};
    for (int step = 0; step < n; ++step) {
        // c holds P_step; each x^k becomes m^2 x^{k+1} - m(2m-1) x^k with m = k - step - 1.
        std::vector<T> next(c.size() + 1, T(0));
        for (std::size_t k = 0; k < c.size(); ++k) {
            const long m = static_cast<long>(k) - step - 1;
            next[k + 1] += T(m * m) * c[k];
            next[k] -= T(m * (2 * m - 1)) * c[k];
        }
        c = std::move(next);
    }
    return c;
}

// Coefficient of z^{2k+1} in y S(z) / (1 + y u(z)), S = sinh, u = cosh - 1,
// as a polynomial in y; returns P_n via P_n = (2n+1)! sum_m d_m x^{n+1-m}.
template <class T>
std::vector<T> series_numerator(int n) {
    const int order = 2 * n + 1;
    using Poly = std::vector<T>;
    auto add_scaled = [](Poly& dst, const Poly& src, const T& s, std::size_t shift) {
        if (dst.size() < src.size() + shift) dst.resize(src.size() + shift, T(0));
        for (std::size_t i = 0; i < src.size(); ++i) dst[i + shift] += s * src[i];
    };

    // g = 1 / (1 + y u): g_j = -y sum_{i >= 2, even} u_i g_{j-i}.
    std::vector<Poly> g(order + 1);
    g[0] = Poly{T(1)};
    for (int j = 2; j <= order; j += 2) {
        Poly acc;
        for (int i = 2; i <= j; i += 2) add_scaled(acc, g[j - i], T(-1) / factorial<T>(i), 1);
        g[j] = acc;
    }
    // Coefficient of z^{order} in S g, times y.
    Poly d;
    for (int s = 1; s <= order; s += 2) {
        const int j = order - s;
        if (!g[j].empty()) add_scaled(d, g[j], T(1) / factorial<T>(s), 1);
    }
    // d[m] multiplies y^m = x^{-m}; P_n[k] = (2n+1)! d[n+1-k].
    const T scale = factorial<T>(order);
    std::vector<T> p(n + 1, T(0));
    for (int k = 0; k <= n; ++k) {
        const std::size_t m = static_cast<std::size_t>(n + 1 - k);
        if (m < d.size()) p[k] = scale * d[m];
    }
    return p;
}

Rational pow_minus_two(int e) {
    Rational r = 1;
    if (e >= 0) {
        for (int i = 0; i < e; ++i) r *= -2;
    } else {
        for (int i = 0; i < -e; ++i) r /= -2;
    }
    return r;
}

}  // namespace

double AlphaFunction::normalization() const { return factorial<double>(2 * n + 1); }

double AlphaFunction::eval_numerator(double x) const {
    double acc = 0.0;
    for (auto it = numerator.rbegin(); it != numerator.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double AlphaFunction::operator()(double x) const {
    return eval_numerator(x) / (normalization() * std::pow(x, n + 1));
}

Rational ExactAlpha::eval_numerator(const Rational& x) const {
    Rational acc = 0;
    for (auto it = numerator.rbegin(); it != numerator.rend(); ++it) acc = acc * x + Rational(*it);
    return acc;
}

AlphaFunction ExactAlpha::to_double() const {
    AlphaFunction out;
    out.n = n;
    out.numerator.reserve(numerator.size());
    for (const BigInt& c : numerator) out.numerator.push_back(c.convert_to<double>());
    return out;
}

AlphaFunction alpha_by_recursion(int n) {
    require_index(n);
    return {n, recursion_numerator<double>(n)};
}

ExactAlpha alpha_exact_by_recursion(int n) {
    require_index(n);
    return {n, recursion_numerator<BigInt>(n)};
}

AlphaFunction alpha_by_series(int n) {
    require_index(n);
    return {n, series_numerator<double>(n)};
}

ExactAlpha alpha_exact_by_series(int n) {
    require_index(n);
    const std::vector<Rational> r = series_numerator<Rational>(n);
    ExactAlpha out{n, {}};
    for (const Rational& c : r) {
        if (boost::multiprecision::denominator(c) != 1)
            throw NumericError("series numerator has a non-integer coefficient");
        out.numerator.push_back(boost::multiprecision::numerator(c));
    }
    return out;
}

BigInt stirling2(int n, int k) {
    if (n < 0 || k < 0 || k > n) return 0;
    // Row recursion S(i, j) = j S(i-1, j) + S(i-1, j-1).
    std::vector<BigInt> row(k + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= n; ++i) {
        for (int j = std::min(i, k); j >= 1; --j) row[j] = j * row[j] + row[j - 1];
        row[0] = 0;
    }
    return row[k];
}

ExactAlpha alpha_exact_by_stirling(int n) {
    require_index(n);
    if (n > 4) throw UnsupportedError("explicit Stirling formula is only evaluated for n <= 4");
    std::vector<Rational> coeff(n + 1, 0);
    for (int j = 0; j <= n; ++j) {
        Rational total = 0;
        for (int k = j + 1; k <= n; ++k) {
            Rational inner = 0;
            for (int i = j; i <= k; ++i)
                inner += Rational(binomial(i + 1, j + 1) * binomial(2 * k, 2 * i + 1) -
                                  binomial(i, j + 1) * binomial(2 * k, 2 * i));
            total += Rational(factorial<BigInt>(2 * k) * stirling2(2 * n + 1, 2 * k)) * inner *
                     pow_minus_two(j + 1 - 2 * k);
        }
        for (int k = j; k <= n; ++k) {
            Rational inner = 0;
            for (int i = j; i <= k; ++i)
                inner += Rational(binomial(i + 1, j + 1) * binomial(2 * k + 1, 2 * i + 1) -
                                  binomial(i, j + 1) * binomial(2 * k + 1, 2 * i));
            total += Rational(factorial<BigInt>(2 * k + 1) * stirling2(2 * n + 1, 2 * k + 1)) * inner *
                     pow_minus_two(j - 2 * k);
        }
        coeff[n - j] = total;
    }
    ExactAlpha out{n, {}};
    for (const Rational& c : coeff) {
        if (boost::multiprecision::denominator(c) != 1)
            throw NumericError("Stirling formula produced a non-integer coefficient");
        out.numerator.push_back(boost::multiprecision::numerator(c));
    }
    return out;
}

std::vector<double> xi_roots(int n) {
    if (n < 1) throw ModelError("xi_roots needs n >= 1");
    const ExactAlpha exact = alpha_exact_by_recursion(n);
    // Integer coefficients are exact in long double for the orders used here;
    // the extra bits keep Horner's rounding below the residual tolerance.
    std::vector<long double> c, dc;
    for (const BigInt& v : exact.numerator) c.push_back(v.convert_to<long double>());
    for (std::size_t k = 1; k < c.size(); ++k) dc.push_back(static_cast<long double>(k) * c[k]);
    auto horner = [](const std::vector<long double>& coef, long double x) {
        long double acc = 0.0L;
        for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * x + *it;
        return acc;
    };
    auto f = [&](double x) { return horner(c, x); };
    const Rational p0 = abs(Rational(exact.numerator[0]));

    // Scan x = 2 + e^w on a uniform w grid; widen and refine until n sign
    // changes are bracketed and P_n(B) has the sign of the leading term.
    std::vector<std::pair<double, double>> brackets;
    double upper = 4.0;
    int points = 256;
    for (int attempt = 0; attempt < 40; ++attempt) {
        brackets.clear();
        const double w_lo = std::log(1e-12), w_hi = std::log(upper - 2.0);
        double x_prev = 2.0 + std::exp(w_lo);
        long double f_prev = f(x_prev);
        for (int i = 1; i <= points; ++i) {
            const double x = 2.0 + std::exp(w_lo + (w_hi - w_lo) * i / points);
            const long double fx = f(x);
            if ((fx < 0.0L) != (f_prev < 0.0L)) brackets.emplace_back(x_prev, x);
            x_prev = x;
            f_prev = fx;
        }
        if (static_cast<int>(brackets.size()) == n && f(upper) > 0.0L) break;
        upper *= 2.0;
        points = std::min(points * 2, 1 << 20);
    }
    if (static_cast<int>(brackets.size()) != n)
        throw NumericError("found " + std::to_string(brackets.size()) + " roots of P_" + std::to_string(n) +
                           " above 2, expected " + std::to_string(n));

    std::vector<double> roots;
    for (auto [lo, hi] : brackets) {
        long double flo = f(lo);
        while (hi - lo > 1e-13 * std::max(1.0, std::abs(lo))) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const long double fm = f(mid);
            if ((fm < 0.0L) == (flo < 0.0L)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        double x = 0.5 * (lo + hi);
        const long double d = horner(dc, x);
        if (d != 0.0L) {
            const double polished = static_cast<double>(x - f(x) / d);
            if (std::abs(f(polished)) <= std::abs(f(x))) x = polished;
        }
        // Exact residual at the returned double. Large roots of higher P_n have
        // |P_n'(xi)| ulp(xi) above the tolerance; there a sign change between
        // the neighbouring doubles certifies x to one ulp instead.
        const Rational res = abs(exact.eval_numerator(Rational(x)));
        bool ok = res < p0 / Rational(BigInt(10000000000LL));
        if (!ok) {
            const Rational below = exact.eval_numerator(Rational(std::nextafter(x, 0.0)));
            const Rational above = exact.eval_numerator(Rational(std::nextafter(x, 2.0 * x)));
            ok = res == 0 || (below < 0) != (above < 0);
        }
        if (!ok || !(x > 2.0)) throw NumericError("root of P_" + std::to_string(n) + " failed its residual check");
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double eta(double xi) {
    if (!(xi > 2.0)) throw ModelError("eta requires xi > 2");
    const double u = xi - 1.0;
    return 1.0 / (u + std::sqrt((u - 1.0) * (u + 1.0)));
}

std::vector<double> eta_values(int n) {
    if (n <= 0) return {};
    std::vector<double> out;
    for (double xi : xi_roots(n)) out.push_back(eta(xi));
    return out;
}

}  // namespace carma
