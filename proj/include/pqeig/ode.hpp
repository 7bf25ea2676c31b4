// SPDX-License-Identifier: Apache-2.0
//
// Embedded Dormand-Prince 5(4) Runge-Kutta pair with step-size control.

#ifndef PQEIG_ODE_HPP
#define PQEIG_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace pqeig {

template <std::size_t Dim>
using OdeState = std::array<double, Dim>;

template <std::size_t Dim>
struct OdeTolerance {
    double rtol = 1e-10;
    OdeState<Dim> atol{};
};

/// One attempted step: the fifth-order solution and the scaled error norm
/// (accept when error <= 1).
template <std::size_t Dim>
struct RkTrial {
    OdeState<Dim> y;
    double error;
};

template <std::size_t Dim, class Rhs>
class DormandPrince45 {
public:
    using State = OdeState<Dim>;

    DormandPrince45(Rhs rhs, OdeTolerance<Dim> tol) : rhs_(std::move(rhs)), tol_(tol) {}

    RkTrial<Dim> attempt(double t, const State& y, double h) const
    {
        // Butcher tableau (Hairer, Norsett & Wanner, table 5.2).
        constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
        constexpr double a21 = 1.0 / 5.0;
        constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                         a54 = -212.0 / 729.0;
        constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                         a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
        constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                         b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
        constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                         e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

        State k1 = rhs_(t, y);
        State tmp;
        auto combine = [&](auto... terms) {
            for (std::size_t i = 0; i < Dim; ++i)
                tmp[i] = y[i] + h * (0.0 + ... + (terms.first * (*terms.second)[i]));
            return tmp;
        };
        using P = std::pair<double, const State*>;
        State k2 = rhs_(t + c2 * h, combine(P{a21, &k1}));
        State k3 = rhs_(t + c3 * h, combine(P{a31, &k1}, P{a32, &k2}));
        State k4 = rhs_(t + c4 * h, combine(P{a41, &k1}, P{a42, &k2}, P{a43, &k3}));
        State k5 = rhs_(t + c5 * h, combine(P{a51, &k1}, P{a52, &k2}, P{a53, &k3}, P{a54, &k4}));
        State k6 = rhs_(t + h, combine(P{a61, &k1}, P{a62, &k2}, P{a63, &k3}, P{a64, &k4},
                                       P{a65, &k5}));
        RkTrial<Dim> out;
        out.y = combine(P{b1, &k1}, P{b3, &k3}, P{b4, &k4}, P{b5, &k5}, P{b6, &k6});
        State k7 = rhs_(t + h, out.y);

        double sum = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            const double err =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale =
                tol_.atol[i] + tol_.rtol * std::max(std::abs(y[i]), std::abs(out.y[i]));
            sum += (err / scale) * (err / scale);
        }
        out.error = std::sqrt(sum / Dim);
        if (!std::isfinite(out.error))
            out.error = 1e10;
        return out;
    }

    /// Next step size from the last error norm.
    static double propose(double h, double error)
    {
        constexpr double safety = 0.9;
        const double factor =
            error == 0.0 ? 5.0 : std::clamp(safety * std::pow(error, -0.2), 0.2, 5.0);
        return h * factor;
    }

    const Rhs& rhs() const { return rhs_; }

private:
    Rhs rhs_;
    OdeTolerance<Dim> tol_;
};

} // namespace pqeig

#endif // PQEIG_ODE_HPP
