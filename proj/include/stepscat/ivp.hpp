#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>

#include "stepscat/errors.hpp"
#include "stepscat/types.hpp"

namespace stepscat {

// State of the second-order problem y'' = m(x) y, stored as (y, y').
struct OdeState {
    cplx y{}, yp{};
};

// Exact propagation of y'' = -k2 y over a shift d (either sign), valid for
// complex k2 = λ²ρ.  Uses the entire-function pair cos(k d), sin(k d)/k so the
// k → 0 limit is regular.
inline OdeState free_transfer(const OdeState& s, cplx k2, double d) {
    const cplx k = std::sqrt(k2);
    cplx c, snc;  // cos(k d), sin(k d)/k
    if (std::abs(k) * std::abs(d) < 1e-8) {
        const cplx z = k2 * d * d;
        c = 1.0 - z / 2.0 + z * z / 24.0;
        snc = d * (1.0 - z / 6.0 + z * z / 120.0);
    } else {
        c = std::cos(k * d);
        snc = std::sin(k * d) / k;
    }
    return {c * s.y + snc * s.yp, -k2 * snc * s.y + c * s.yp};
}

// Adaptive Dormand–Prince 5(4) for y'' = m(x) y from x0 to x1 (either
// direction).  `m` is called with abscissae inside [min(x0,x1), max(x0,x1)]
// and must be smooth there; callers split at breakpoints beforehand.
template <class M>
OdeState dp45_integrate(OdeState s, double x0, double x1, M&& m,
                        double rtol, double atol) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                            e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const double span = x1 - x0;
    if (span == 0.0) return s;
    const double dir = span > 0 ? 1.0 : -1.0;
    double x = x0;
    double h = dir * std::min(0.05, std::abs(span));
    const double hmin = std::abs(span) * 1e-14 + 1e-300;

    auto f = [&m](double xx, const OdeState& v) -> OdeState {
        return {v.yp, m(xx) * v.y};
    };

    OdeState k1 = f(x, s);
    while (dir * (x1 - x) > 0) {
        if (dir * (x + h - x1) > 0) h = x1 - x;
        const OdeState k2s = f(x + c2 * h, {s.y + h * a21 * k1.y, s.yp + h * a21 * k1.yp});
        const OdeState k3s = f(x + c3 * h, {s.y + h * (a31 * k1.y + a32 * k2s.y),
                                            s.yp + h * (a31 * k1.yp + a32 * k2s.yp)});
        const OdeState k4s = f(x + c4 * h,
                               {s.y + h * (a41 * k1.y + a42 * k2s.y + a43 * k3s.y),
                                s.yp + h * (a41 * k1.yp + a42 * k2s.yp + a43 * k3s.yp)});
        const OdeState k5s = f(x + c5 * h,
                               {s.y + h * (a51 * k1.y + a52 * k2s.y + a53 * k3s.y + a54 * k4s.y),
                                s.yp + h * (a51 * k1.yp + a52 * k2s.yp + a53 * k3s.yp + a54 * k4s.yp)});
        const OdeState k6s = f(x + h,
                               {s.y + h * (a61 * k1.y + a62 * k2s.y + a63 * k3s.y + a64 * k4s.y + a65 * k5s.y),
                                s.yp + h * (a61 * k1.yp + a62 * k2s.yp + a63 * k3s.yp + a64 * k4s.yp + a65 * k5s.yp)});
        const OdeState ynew = {s.y + h * (b1 * k1.y + b3 * k3s.y + b4 * k4s.y + b5 * k5s.y + b6 * k6s.y),
                               s.yp + h * (b1 * k1.yp + b3 * k3s.yp + b4 * k4s.yp + b5 * k5s.yp + b6 * k6s.yp)};
        const OdeState k7s = f(x + h, ynew);
        const cplx erry = h * (e1 * k1.y + e3 * k3s.y + e4 * k4s.y + e5 * k5s.y + e6 * k6s.y + e7 * k7s.y);
        const cplx errp = h * (e1 * k1.yp + e3 * k3s.yp + e4 * k4s.yp + e5 * k5s.yp + e6 * k6s.yp + e7 * k7s.yp);
        const double sy = atol + rtol * std::max(std::abs(s.y), std::abs(ynew.y));
        const double sp = atol + rtol * std::max(std::abs(s.yp), std::abs(ynew.yp));
        const double err = std::max(std::abs(erry) / sy, std::abs(errp) / sp);

        if (err <= 1.0) {
            x += h;
            s = ynew;
            k1 = k7s;  // FSAL
        }
        const double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, fac));
        if (std::abs(h) < hmin)
            throw StepRejected("step size underflow near x = " + std::to_string(x));
    }
    return s;
}

}  // namespace stepscat
