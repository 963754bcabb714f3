#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "loadshare/errors.hpp"

namespace loadshare {

namespace detail {

// Derivative at xs[0] of the cubic Lagrange interpolant through four points.
// One-sided analogue of the usual parabolic endpoint rule, one order better;
// the callers clip it afterwards, so monotonicity is preserved regardless.
inline double one_sided_cubic_slope(const double* xs, const double* ys) {
    double x0 = xs[0];
    double result = 0.0;
    for (int j = 0; j < 4; ++j) {
        double num = 1.0, den = 1.0;
        if (j == 0) {
            double s = 0.0;
            for (int k = 1; k < 4; ++k) s += 1.0 / (x0 - xs[k]);
            result += ys[0] * s;
            continue;
        }
        for (int k = 0; k < 4; ++k) {
            if (k == j) continue;
            den *= xs[j] - xs[k];
            if (k != 0) num *= x0 - xs[k];
        }
        result += ys[j] * num / den;
    }
    return result;
}

inline double clip_endpoint_slope(double m, double d) {
    if (d == 0.0) return 0.0;
    if ((m > 0.0) != (d > 0.0) || m == 0.0) return 0.0;
    if (std::abs(m) > 3.0 * std::abs(d)) return 3.0 * d;
    return m;
}

}

// Fritsch-Carlson monotone cubic Hermite interpolant. Interior slopes use the
// weighted harmonic mean; endpoint slopes use a one-sided cubic estimate with
// the standard clipping, so the interpolant is monotone wherever the data is.
class MonotoneCubic {
public:
    static MonotoneCubic fit(std::vector<double> x, std::vector<double> y) {
        size_t n = x.size();
        if (n < 2 || y.size() != n)
            throw ValidationError("interpolation needs at least 2 nodes and matching value count");
        for (size_t i = 0; i + 1 < n; ++i)
            if (!(x[i] < x[i + 1]))
                throw ValidationError("interpolation nodes must be strictly increasing (node " +
                                      std::to_string(i + 1) + ")");
        for (size_t i = 0; i < n; ++i)
            if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
                throw ValidationError("interpolation data must be finite");

        std::vector<double> h(n - 1), d(n - 1), m(n);
        for (size_t i = 0; i + 1 < n; ++i) {
            h[i] = x[i + 1] - x[i];
            d[i] = (y[i + 1] - y[i]) / h[i];
        }
        if (n == 2) {
            m[0] = m[1] = d[0];
        } else {
            for (size_t i = 1; i + 1 < n; ++i) {
                if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0.0) != (d[i] > 0.0)) {
                    m[i] = 0.0;
                } else {
                    double w1 = 2.0 * h[i] + h[i - 1];
                    double w2 = h[i] + 2.0 * h[i - 1];
                    m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
                }
            }
            if (n >= 4) {
                m[0] = detail::one_sided_cubic_slope(x.data(), y.data());
                // Reflected stencil: u = -x reverses orientation, so the slope
                // of the reflected interpolant at its left end is -L'(x_{n-1}).
                double rx[4], ry[4];
                for (int k = 0; k < 4; ++k) {
                    rx[k] = -x[n - 1 - k];
                    ry[k] = y[n - 1 - k];
                }
                m[n - 1] = -detail::one_sided_cubic_slope(rx, ry);
            } else {
                m[0] = ((2.0 * h[0] + h[1]) * d[0] - h[0] * d[1]) / (h[0] + h[1]);
                m[n - 1] = ((2.0 * h[n - 2] + h[n - 3]) * d[n - 2] - h[n - 2] * d[n - 3]) /
                           (h[n - 2] + h[n - 3]);
            }
            m[0] = detail::clip_endpoint_slope(m[0], d[0]);
            m[n - 1] = detail::clip_endpoint_slope(m[n - 1], d[n - 2]);
        }
        return MonotoneCubic(std::move(x), std::move(y), std::move(m));
    }

    double eval(double q) const {
        if (q == x_.back()) return y_.back();
        size_t i = locate(q);
        double s = q - x_[i];
        double h = x_[i + 1] - x_[i];
        double d = (y_[i + 1] - y_[i]) / h;
        double c2 = (3.0 * d - 2.0 * m_[i] - m_[i + 1]) / h;
        double c3 = (m_[i] + m_[i + 1] - 2.0 * d) / (h * h);
        return y_[i] + s * (m_[i] + s * (c2 + s * c3));
    }

    double derivative(double q) const {
        size_t i = locate(q);
        double s = q - x_[i];
        double h = x_[i + 1] - x_[i];
        double d = (y_[i + 1] - y_[i]) / h;
        double c2 = (3.0 * d - 2.0 * m_[i] - m_[i + 1]) / h;
        double c3 = (m_[i] + m_[i + 1] - 2.0 * d) / (h * h);
        return m_[i] + s * (2.0 * c2 + 3.0 * s * c3);
    }

    const std::vector<double>& knot_x() const noexcept { return x_; }
    const std::vector<double>& knot_y() const noexcept { return y_; }
    const std::vector<double>& slopes() const noexcept { return m_; }

private:
    MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> m)
        : x_(std::move(x)), y_(std::move(y)), m_(std::move(m)) {}

    size_t locate(double q) const {
        if (!(q >= x_.front() && q <= x_.back()))
            throw DomainError("interpolation query " + std::to_string(q) + " outside [" +
                              std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
        if (q == x_.back()) return x_.size() - 2;
        auto it = std::upper_bound(x_.begin(), x_.end(), q);
        return static_cast<size_t>(it - x_.begin()) - 1;
    }

    std::vector<double> x_, y_, m_;
};

}
