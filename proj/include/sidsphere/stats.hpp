#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "sidsphere/errors.hpp"

namespace sidsphere {

// ---------------------------------------------------------------------------
// Special functions (series / continued-fraction evaluations).
// ---------------------------------------------------------------------------

namespace detail {

inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericalError("incomplete gamma series did not converge");
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericalError("incomplete gamma continued fraction did not converge");
}

inline double beta_contfrac(double a, double b, double x) {
    const double tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

} // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw NumericalError("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_contfrac(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw NumericalError("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

/// Regularized incomplete beta I_x(a, b).
inline double beta_inc(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw NumericalError("beta_inc: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    double front = std::exp(lbeta + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::beta_contfrac(a, b, x) / a;
    return 1.0 - front * detail::beta_contfrac(b, a, 1.0 - x) / b;
}

/// Survival function of the chi-square distribution with k degrees of freedom.
inline double chi_square_sf(double x, int k) {
    return gamma_q(0.5 * k, 0.5 * x);
}

/// Kolmogorov distribution survival function Q_KS(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum) + 1e-300) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// One-sample KS p-value with the usual finite-sample scaling of the statistic.
inline double ks_p_value(double d_stat, std::size_t n_samples) {
    double sn = std::sqrt(static_cast<double>(n_samples));
    double lambda = (sn + 0.12 + 0.11 / sn) * d_stat;
    return kolmogorov_sf(lambda);
}

/// KS statistic of samples against a CDF given as a callable.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
    if (samples.empty()) throw NumericalError("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        double lo = f - static_cast<double>(i) / n;
        double hi = (static_cast<double>(i) + 1.0) / n - f;
        d = std::max({d, lo, hi});
    }
    return d;
}

/// CDF of a single coordinate of a uniform point on S^n (density ~ (1-u^2)^{(n-2)/2} on [-1,1]).
inline double sphere_coordinate_cdf(double u, int n) {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return beta_inc(0.5 * n, 0.5 * n, 0.5 * (1.0 + u));
}

// ---------------------------------------------------------------------------
// Ordinary least squares for rate fits.
// ---------------------------------------------------------------------------

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t n = 0;
};

inline OlsFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw NumericalError("ols_fit: size mismatch");
    std::size_t k = xs.size();
    if (k < 2) throw NumericalError("ols_fit: need at least 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) { mx += xs[i]; my += ys[i]; }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw NumericalError("ols_fit: degenerate abscissae");
    OlsFit fit;
    fit.n = k;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ssr += e * e;
    }
    fit.slope_stderr = (k > 2) ? std::sqrt(ssr / (static_cast<double>(k - 2) * sxx)) : 0.0;
    return fit;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw NumericalError("median of empty set");
    std::sort(v.begin(), v.end());
    std::size_t k = v.size();
    if (k % 2 == 1) return v[k / 2];
    return 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

} // namespace sidsphere
