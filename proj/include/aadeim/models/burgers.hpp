#pragma once

#include <cmath>
#include <numbers>

#include "aadeim/model.hpp"

namespace aadeim {

// Time-varying viscosity nu(t) = mu * (sin(20 pi t) + cos(60 pi t) + 2).
inline double viscosity(double t, double mu) {
    return mu * (std::sin(20.0 * std::numbers::pi * t) +
                 std::cos(60.0 * std::numbers::pi * t) + 2.0);
}

// Transport direction sign(sin(20 pi t) + cos(60 pi t) + 1); sign(0) -> +1.
inline double transport_direction(double t) {
    const double v = std::sin(20.0 * std::numbers::pi * t) +
                     std::cos(60.0 * std::numbers::pi * t) + 1.0;
    return v >= 0.0 ? 1.0 : -1.0;
}

// Burgers' equation q_t + eta(t) q q_x = nu(t) q_xx on (-1, 1) with Dirichlet
// boundaries, implicit Euler:
//   f(q)_i = q_i + dt * (eta q_i (q_x)_i - nu (q_xx)_i)
// Convection uses direction-aware second-order upwind, switching on the sign
// of eta * q_i, dropping to first order at the interior node next to the
// upwind boundary; diffusion is second-order central. Boundary rows are
// identity rows, which holds the boundary values at their initial-condition
// values through the implicit solve. Initial condition: 1 on [-1/2, -1/3],
// 0 elsewhere (the domain excludes x = -2, so that clause of the setup never
// applies and the boundaries start at 0).
class BurgersModel final : public FullModel {
public:
    BurgersModel(int n, double mu, double dt, long num_steps)
        : n_(n), mu_(mu), dt_(dt), steps_(num_steps), dx_(2.0 / (n - 1)) {}

    int dim() const override { return n_; }
    double dt() const override { return dt_; }
    long num_steps() const override { return steps_; }
    double parameter() const override { return mu_; }

    Vector initial_condition() const override {
        Vector q0 = Vector::Zero(n_);
        for (int i = 0; i < n_; ++i) {
            const double x = -1.0 + dx_ * i;
            if (x >= -0.5 && x <= -1.0 / 3.0) q0(i) = 1.0;
        }
        return q0;
    }

    int bandwidth_lower() const override { return 2; }
    int bandwidth_upper() const override { return 2; }

    void evaluate(const Vector& q, double t, Vector& out) const override {
        const Coeffs c = coeffs(t);
        out.resize(n_);
        for (int i = 0; i < n_; ++i) out(i) = row_value(q, c, i);
    }

    void evaluate_rows(const Vector& q, double t, std::span<const int> rows,
                       Vector& out) const override {
        const Coeffs c = coeffs(t);
        out.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
            out(static_cast<Eigen::Index>(r)) = row_value(q, c, rows[r]);
    }

    void jacobian_rows(const Vector& q, double t, std::span<const int> rows,
                       StencilRows& out) const override {
        const Coeffs c = coeffs(t);
        const double diff = dt_ * c.nu / (dx_ * dx_);
        out.reset(rows.size(), rows.size() * 5);
        for (int i : rows) {
            if (i == 0 || i == n_ - 1) {
                out.push(i, 1.0);
                out.close_row();
                continue;
            }
            // diffusion + identity
            out.push(i - 1, -diff);
            out.push(i, 1.0 + 2.0 * diff);
            out.push(i + 1, -diff);
            // convection eta * q_i * (q_x)_i, upwind switch frozen at q
            const double ce = dt_ * c.eta;
            if (c.eta * q(i) >= 0.0) {
                if (i >= 2) {
                    const double dq = (3.0 * q(i) - 4.0 * q(i - 1) + q(i - 2)) / (2.0 * dx_);
                    out.push(i, ce * (dq + q(i) * 3.0 / (2.0 * dx_)));
                    out.push(i - 1, ce * q(i) * (-4.0 / (2.0 * dx_)));
                    out.push(i - 2, ce * q(i) * (1.0 / (2.0 * dx_)));
                } else {
                    const double dq = (q(i) - q(i - 1)) / dx_;
                    out.push(i, ce * (dq + q(i) / dx_));
                    out.push(i - 1, ce * q(i) * (-1.0 / dx_));
                }
            } else {
                if (i <= n_ - 3) {
                    const double dq = (-3.0 * q(i) + 4.0 * q(i + 1) - q(i + 2)) / (2.0 * dx_);
                    out.push(i, ce * (dq - q(i) * 3.0 / (2.0 * dx_)));
                    out.push(i + 1, ce * q(i) * (4.0 / (2.0 * dx_)));
                    out.push(i + 2, ce * q(i) * (-1.0 / (2.0 * dx_)));
                } else {
                    const double dq = (q(i + 1) - q(i)) / dx_;
                    out.push(i, ce * (dq - q(i) / dx_));
                    out.push(i + 1, ce * q(i) * (1.0 / dx_));
                }
            }
            out.close_row();
        }
    }

    void stencil_cols(int row, std::vector<int>& cols) const override {
        cols.clear();
        if (row == 0 || row == n_ - 1) {
            cols.push_back(row);
            return;
        }
        for (int j = std::max(0, row - 2); j <= std::min(n_ - 1, row + 2); ++j)
            cols.push_back(j);
    }

private:
    struct Coeffs {
        double nu;
        double eta;
    };

    Coeffs coeffs(double t) const {
        const double nu = viscosity(t, mu_);
        if (mu_ > 0.0 && nu < mu_ * (2.0 - std::numbers::sqrt2) * 0.99)
            throw numeric_error("burgers: viscosity positivity violated at t = " +
                                std::to_string(t));
        return {nu, transport_direction(t)};
    }

    double row_value(const Vector& q, const Coeffs& c, int i) const {
        if (i == 0 || i == n_ - 1) return q(i);
        double dq;
        if (c.eta * q(i) >= 0.0)
            dq = i >= 2 ? (3.0 * q(i) - 4.0 * q(i - 1) + q(i - 2)) / (2.0 * dx_)
                        : (q(i) - q(i - 1)) / dx_;
        else
            dq = i <= n_ - 3 ? (-3.0 * q(i) + 4.0 * q(i + 1) - q(i + 2)) / (2.0 * dx_)
                             : (q(i + 1) - q(i)) / dx_;
        const double lap = (q(i - 1) - 2.0 * q(i) + q(i + 1)) / (dx_ * dx_);
        return q(i) + dt_ * (c.eta * q(i) * dq - c.nu * lap);
    }

    int n_;
    double mu_;
    double dt_;
    long steps_;
    double dx_;
};

} // namespace aadeim
