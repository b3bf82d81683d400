#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace ermakov {

/// Clamped cubic spline through (x_i, y_i); x strictly increasing.  End slopes
/// come from three-point one-sided differences.  Outside the knot span the
/// spline throws (`reject`) or continues with the first- or second-order
/// Taylor polynomial of the end knot.
class CubicSpline
{
public:
    enum class Extrapolation { reject, linear, quadratic };

    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y, Extrapolation ext = Extrapolation::reject)
        : x_(std::move(x)), y_(std::move(y)), ext_(ext)
    {
        const std::size_t n = x_.size();
        if (n < 3 || y_.size() != n)
            throw ValidationError("spline needs at least 3 knots and matching sample counts");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw ValidationError("spline knots must be strictly increasing");

        const double d0 = end_slope(0, 1, 2);
        const double dn = end_slope(n - 1, n - 2, n - 3);

        // Tridiagonal system for the second derivatives m_i.
        std::vector<double> a(n), b(n), c(n), r(n);
        b[0] = 2 * (x_[1] - x_[0]);
        c[0] = x_[1] - x_[0];
        r[0] = 6 * ((y_[1] - y_[0]) / (x_[1] - x_[0]) - d0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
            a[i] = h0;
            b[i] = 2 * (h0 + h1);
            c[i] = h1;
            r[i] = 6 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        }
        a[n - 1] = x_[n - 1] - x_[n - 2];
        b[n - 1] = 2 * (x_[n - 1] - x_[n - 2]);
        r[n - 1] = 6 * (dn - (y_[n - 1] - y_[n - 2]) / (x_[n - 1] - x_[n - 2]));
        for (std::size_t i = 1; i < n; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            r[i] -= w * r[i - 1];
        }
        m_.assign(n, 0.0);
        m_[n - 1] = r[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
    }

    double x_min() const noexcept { return x_.front(); }
    double x_max() const noexcept { return x_.back(); }
    std::span<const double> knots() const noexcept { return x_; }
    std::span<const double> values() const noexcept { return y_; }

    double operator()(double x) const { return eval(x, 0); }
    double derivative(double x) const { return eval(x, 1); }
    double second_derivative(double x) const { return eval(x, 2); }

private:
    double end_slope(std::size_t i0, std::size_t i1, std::size_t i2) const
    {
        // Derivative at x_{i0} of the parabola through three knots.
        const double x0 = x_[i0], x1 = x_[i1], x2 = x_[i2];
        return y_[i0] * (2 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
               y_[i1] * (x0 - x2) / ((x1 - x0) * (x1 - x2)) + y_[i2] * (x0 - x1) / ((x2 - x0) * (x2 - x1));
    }

    double eval(double x, int order) const
    {
        if (x < x_.front() || x > x_.back()) {
            if (ext_ == Extrapolation::reject)
                throw RangeError("evaluation point " + std::to_string(x) + " outside tabulated span [" +
                                 std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
            const bool left = x < x_.front();
            const double x0 = left ? x_.front() : x_.back();
            const double f0 = eval(x0, 0), f1 = eval(x0, 1), f2 = eval(x0, 2);
            const double d = x - x0;
            if (ext_ == Extrapolation::linear)
                return order == 0 ? f0 + f1 * d : order == 1 ? f1 : 0.0;
            switch (order) {
            case 0: return f0 + f1 * d + 0.5 * f2 * d * d;
            case 1: return f1 + f2 * d;
            default: return f2;
            }
        }
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        if (i >= x_.size() - 1)
            i = x_.size() - 2;
        const double h = x_[i + 1] - x_[i];
        const double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
        switch (order) {
        case 0:
            return A * y_[i] + B * y_[i + 1] + ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6;
        case 1:
            return (y_[i + 1] - y_[i]) / h - (3 * A * A - 1) * h * m_[i] / 6 + (3 * B * B - 1) * h * m_[i + 1] / 6;
        default:
            return A * m_[i] + B * m_[i + 1];
        }
    }

    std::vector<double> x_, y_, m_;
    Extrapolation ext_ = Extrapolation::reject;
};

} // namespace ermakov
