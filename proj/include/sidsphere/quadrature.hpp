#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "sidsphere/errors.hpp"

namespace sidsphere {

namespace detail {

// Gauss-Kronrod 15-point nodes/weights on [-1,1]; the embedded 7-point Gauss
// rule uses the even-indexed Kronrod nodes.
struct Gk15 {
    static constexpr std::array<double, 8> xk = {
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wk = {
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327};
};

template <typename F>
void gk15_panel(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double res_k = Gk15::wk[7] * fc;
    double res_g = Gk15::wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double dx = h * Gk15::xk[i];
        double fsum = f(c - dx) + f(c + dx);
        res_k += Gk15::wk[i] * fsum;
        if (i % 2 == 1) res_g += Gk15::wg[i / 2] * fsum;
    }
    result = res_k * h;
    err = std::abs((res_k - res_g) * h);
}

} // namespace detail

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
};

/// Globally adaptive Gauss-Kronrod integration of f over [a, b].
/// Subdivides the interval with the largest error estimate until
/// sum(err) <= max(abs_tol, rel_tol * |integral|).
template <typename F>
QuadResult integrate_adaptive(const F& f, double a, double b,
                              double abs_tol = 1e-12, double rel_tol = 1e-10,
                              int max_panels = 4000) {
    struct Panel {
        double a, b, value, err;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    std::priority_queue<Panel> queue;
    double v0, e0;
    detail::gk15_panel(f, a, b, v0, e0);
    queue.push({a, b, v0, e0});
    double total = v0, total_err = e0;
    int panels = 1;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (panels >= max_panels)
            throw NumericalError("adaptive quadrature: panel limit reached (err=" +
                                 std::to_string(total_err) + ")");
        Panel p = queue.top();
        queue.pop();
        double m = 0.5 * (p.a + p.b);
        if (m <= p.a || m >= p.b)
            throw NumericalError("adaptive quadrature: interval underflow");
        double vl, el, vr, er;
        detail::gk15_panel(f, p.a, m, vl, el);
        detail::gk15_panel(f, m, p.b, vr, er);
        total += vl + vr - p.value;
        total_err += el + er - p.err;
        queue.push({p.a, m, vl, el});
        queue.push({m, p.b, vr, er});
        ++panels;
    }
    return {total, total_err, panels};
}

} // namespace sidsphere
