#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lpmk {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;

// Error taxonomy shared by all modules. Each condition that callers are
// expected to branch on gets its own type.
struct UnsupportedDimension : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateBody : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnboundedBody : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OriginNotInterior : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OriginOutside : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IntegrabilityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HemisphereViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NegativeSupport : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BoundaryBlowup : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutOfPatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularAtZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PointOutsideCone : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Volume of the k-dimensional unit ball, pi^(k/2) / Gamma(k/2 + 1).
inline double unit_ball_volume(int k) {
    if (k < 0) throw InvalidParams("unit_ball_volume: k must be >= 0");
    return std::pow(pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

/// Total surface measure of S^(n-1) in R^n, i.e. n * vol(B^n).
inline double sphere_surface_area(int n) {
    if (n < 1) throw InvalidParams("sphere_surface_area: n must be >= 1");
    return n * unit_ball_volume(n);
}

// Deterministic pairwise tree reduction. Summation order is independent of
// how the caller might later choose to parallelize, so results are
// reproducible bit for bit.
inline double tree_sum(std::span<const double> xs) {
    const size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n == 1) return xs[0];
    if (n == 2) return xs[0] + xs[1];
    const size_t half = n / 2;
    return tree_sum(xs.subspan(0, half)) + tree_sum(xs.subspan(half));
}

inline double tree_sum(const std::vector<double>& xs) {
    return tree_sum(std::span<const double>(xs));
}

// splitmix64, used to derive independent sub-streams from one master seed.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// Seed for the sub-stream `stream` of a master seed.
inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
    SplitMix64 sm(master);
    uint64_t s = sm.next();
    for (uint64_t i = 0; i <= stream; ++i) s = SplitMix64(s + stream).next();
    return s;
}

/// Antiderivative-based integral of sin(t)^m over [a, b], exact up to
/// roundoff. Used for tensor-grid cell weights and spherical cap areas.
inline double sin_power_integral(int m, double a, double b) {
    if (m < 0) throw InvalidParams("sin_power_integral: m must be >= 0");
    // F_m with F_0 = t, F_1 = -cos t, F_m = (-cos t sin^(m-1) t + (m-1) F_{m-2}) / m
    auto F = [m](double t) {
        std::vector<double> vals(static_cast<size_t>(m) + 1);
        vals[0] = t;
        if (m >= 1) vals[1] = -std::cos(t);
        for (int k = 2; k <= m; ++k)
            vals[k] = (-std::cos(t) * std::pow(std::sin(t), k - 1) + (k - 1) * vals[k - 2]) / k;
        return vals[m];
    };
    return F(b) - F(a);
}

inline bool nearly_equal(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace lpmk
