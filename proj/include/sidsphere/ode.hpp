#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "sidsphere/errors.hpp"

namespace sidsphere {

/// Scalar Dormand-Prince 5(4) integrator with dense output.
/// Steps are stored so the solution can be evaluated anywhere in [t0, t_end].
class Dopri5Dense {
public:
    template <typename F>
    Dopri5Dense(const F& f, double t0, double y0, double t_end,
                double rtol = 1e-11, double atol = 1e-11, double max_step = 0.02)
        : t0_(t0), t_end_(t_end) {
        if (t_end <= t0) throw NumericalError("Dopri5Dense: t_end must exceed t0");
        integrate(f, t0, y0, t_end, rtol, atol, max_step);
    }

    double t0() const { return t0_; }
    double t_end() const { return t_end_; }

    double eval(double t) const {
        if (t < t0_ - 1e-12 || t > t_end_ + 1e-9)
            throw NumericalError("Dopri5Dense: evaluation outside integration range");
        t = std::clamp(t, t0_, t_end_);
        // find the step with t in [t_begin, t_begin + h]
        auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
        std::size_t idx = (it == starts_.begin()) ? 0 : static_cast<std::size_t>(it - starts_.begin() - 1);
        const Step& s = steps_[idx];
        double theta = (t - s.t) / s.h;
        theta = std::clamp(theta, 0.0, 1.0);
        double th1 = 1.0 - theta;
        return s.c1 + theta * (s.c2 + th1 * (s.c3 + theta * (s.c4 + th1 * s.c5)));
    }

    double final_value() const { return y_final_; }

private:
    struct Step {
        double t, h;
        double c1, c2, c3, c4, c5; // dense-output coefficients
    };

    template <typename F>
    void integrate(const F& f, double t, double y, double t_end,
                   double rtol, double atol, double max_step) {
        // DOPRI5 tableau
        constexpr double a21 = 1.0 / 5.0;
        constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                         a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
        constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                         a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
        constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                         b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
        constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                         e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
        // dense output coefficients (Hairer, Norsett & Wanner)
        constexpr double d1 = -12715105075.0 / 11282082432.0;
        constexpr double d3 = 87487479700.0 / 32700410799.0;
        constexpr double d4 = -10690763975.0 / 1880347072.0;
        constexpr double d5 = 701980252875.0 / 199316789632.0;
        constexpr double d6 = -1453857185.0 / 822651844.0;
        constexpr double d7 = 69997945.0 / 29380423.0;

        double k1 = f(t, y);
        double h = std::min(max_step, (t_end - t) / 8.0);
        if (h <= 0.0) h = max_step;
        int rejected_in_a_row = 0;
        while (t < t_end) {
            h = std::min(h, t_end - t);
            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw NumericalError("Dopri5Dense: step size underflow at t=" + std::to_string(t));
            double k2 = f(t + h / 5.0, y + h * (a21 * k1));
            double k3 = f(t + 3.0 * h / 10.0, y + h * (a31 * k1 + a32 * k2));
            double k4 = f(t + 4.0 * h / 5.0, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            double k5 = f(t + 8.0 * h / 9.0, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            double k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            double y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            double k7 = f(t + h, y1); // FSAL
            double err_abs = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double sc = atol + rtol * std::max(std::abs(y), std::abs(y1));
            double err = std::abs(err_abs) / sc;
            if (err <= 1.0) {
                double dy = y1 - y;
                Step s;
                s.t = t;
                s.h = h;
                s.c1 = y;
                s.c2 = dy;
                s.c3 = h * k1 - dy;
                s.c4 = dy - h * k7 - s.c3;
                s.c5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                steps_.push_back(s);
                starts_.push_back(t);
                t += h;
                y = y1;
                k1 = k7;
                rejected_in_a_row = 0;
                double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                h = std::min(max_step, h * std::clamp(fac, 0.2, 5.0));
            } else {
                if (++rejected_in_a_row > 60)
                    throw NumericalError("Dopri5Dense: repeated step rejection at t=" + std::to_string(t));
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            }
        }
        y_final_ = y;
    }

    double t0_, t_end_, y_final_ = 0.0;
    std::vector<Step> steps_;
    std::vector<double> starts_;
};

} // namespace sidsphere
