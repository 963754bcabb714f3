#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loadshare/errors.hpp"
#include "loadshare/monotone_cubic.hpp"

namespace loadshare {

enum class MapKind { linear, moebius, tabulated };

inline const char* to_string(MapKind k) {
    switch (k) {
        case MapKind::linear: return "linear";
        case MapKind::moebius: return "moebius";
        default: return "tabulated";
    }
}

// A force-force relation F_j = h(F_k) on [0, domain_max]: h(0) = 0, strictly
// increasing, a contraction (h(x) < x away from 0) with slope h'(0) in (0, 1).
// Three representations share the interface: the two analytic families used
// for synthetic data and round-trip checks, and a monotone-cubic fit through
// measured samples.
class MonotoneMap {
public:
    static MonotoneMap linear(double a, double domain_max) {
        MonotoneMap h(MapKind::linear, domain_max);
        h.a_ = a;
        h.slope0_ = a;
        h.validate_params();
        h.check_grid();
        return h;
    }

    static MonotoneMap moebius(double a, double b, double domain_max) {
        MonotoneMap h(MapKind::moebius, domain_max);
        h.a_ = a;
        h.b_ = b;
        h.slope0_ = a;
        h.validate_params();
        if (!(std::isfinite(b) && b >= 0.0))
            throw ValidationError("moebius parameter b must be finite and >= 0, got " + std::to_string(b));
        h.check_grid();
        return h;
    }

    // Fit from measured (F_k, F_j) samples, sorted strictly increasing in F_k.
    // A missing origin sample is added (h(0) = 0 is structural). domain_max = 0
    // means "up to the last sample"; a smaller positive value restricts the
    // domain; extrapolation beyond the data is never allowed.
    static MonotoneMap make_tabulated(const std::vector<std::array<double, 2>>& samples,
                                      double domain_max = 0.0) {
        std::vector<double> xs, ys;
        xs.reserve(samples.size() + 1);
        ys.reserve(samples.size() + 1);
        for (const auto& s : samples) {
            if (!(std::isfinite(s[0]) && std::isfinite(s[1])))
                throw ValidationError("samples must be finite");
            if (s[0] < 0.0 || s[1] < 0.0)
                throw ValidationError("forces are non-negative; got sample (" +
                                      std::to_string(s[0]) + ", " + std::to_string(s[1]) + ")");
            xs.push_back(s[0]);
            ys.push_back(s[1]);
        }
        for (size_t i = 0; i + 1 < xs.size(); ++i)
            if (!(xs[i] < xs[i + 1]))
                throw ValidationError("samples must be strictly increasing in F_k");
        if (!xs.empty() && xs.front() == 0.0) {
            if (ys.front() != 0.0)
                throw ValidationError("a zero-force sample must have zero response (h(0) = 0)");
        } else {
            xs.insert(xs.begin(), 0.0);
            ys.insert(ys.begin(), 0.0);
        }
        if (xs.size() < 4)
            throw ValidationError("need at least 4 distinct samples including the origin, got " +
                                  std::to_string(xs.size()));
        for (size_t i = 0; i + 1 < ys.size(); ++i)
            if (!(ys[i] < ys[i + 1]))
                throw NonMonotoneData("response values must be strictly increasing (sample " +
                                      std::to_string(i + 1) + ")");
        for (size_t i = 1; i < xs.size(); ++i)
            if (!(ys[i] < xs[i]))
                throw ContractionViolated("sample (" + std::to_string(xs[i]) + ", " +
                                          std::to_string(ys[i]) + ") has response >= force");

        double dm = domain_max;
        if (dm == 0.0) dm = xs.back();
        if (!(std::isfinite(dm) && dm > 0.0))
            throw ValidationError("domain_max must be positive, got " + std::to_string(domain_max));
        if (dm > xs.back())
            throw ValidationError("domain_max " + std::to_string(dm) + " exceeds last sample " +
                                  std::to_string(xs.back()) + "; extrapolation is not supported");

        MonotoneMap h(MapKind::tabulated, dm);
        h.cubic_.emplace(MonotoneCubic::fit(std::move(xs), std::move(ys)));
        h.slope0_ = h.cubic_->slopes().front();
        if (!(h.slope0_ > 0.0 && h.slope0_ < 1.0))
            throw SlopeOutOfRange("fitted slope at zero is " + std::to_string(h.slope0_) +
                                  ", outside (0, 1)");
        h.check_grid();
        return h;
    }

    double eval(double x) const {
        if (!(x >= 0.0 && x <= domain_max_ * (1.0 + 1e-12)))
            throw DomainError("argument " + std::to_string(x) + " outside [0, " +
                              std::to_string(domain_max_) + "]");
        if (x > domain_max_) x = domain_max_;
        switch (kind_) {
            case MapKind::linear: return a_ * x;
            case MapKind::moebius: return a_ * x / (1.0 + b_ * x);
            default: return cubic_->eval(x);
        }
    }

    double derivative_at_zero() const noexcept { return slope0_; }
    double domain_max() const noexcept { return domain_max_; }
    MapKind kind() const noexcept { return kind_; }
    double param_a() const noexcept { return a_; }
    double param_b() const noexcept { return b_; }
    const MonotoneCubic& interpolant() const { return *cubic_; }

private:
    MonotoneMap(MapKind kind, double domain_max) : kind_(kind), domain_max_(domain_max) {}

    void validate_params() const {
        if (!(std::isfinite(a_) && a_ > 0.0 && a_ < 1.0))
            throw SlopeOutOfRange("slope at zero must lie in (0, 1), got " + std::to_string(a_));
        if (!(std::isfinite(domain_max_) && domain_max_ > 0.0))
            throw ValidationError("domain_max must be positive, got " + std::to_string(domain_max_));
    }

    // Construction-time sweep: strict monotonicity and h(x) < x on a fixed
    // 256-point grid over (0, domain_max].
    void check_grid() const {
        double prev = 0.0;
        for (int k = 1; k <= 256; ++k) {
            double x = domain_max_ * k / 256.0;
            double v = eval(x);
            if (!(v > prev))
                throw NonMonotoneData("map is not strictly increasing near x = " + std::to_string(x));
            if (!(v < x))
                throw ContractionViolated("h(x) >= x at x = " + std::to_string(x));
            prev = v;
        }
    }

    MapKind kind_;
    double a_ = 0.0, b_ = 0.0;
    double domain_max_;
    double slope0_ = 0.0;
    std::optional<MonotoneCubic> cubic_;
};

}
