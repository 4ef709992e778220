#pragma once

#include <algorithm>
#include <vector>

#include "lpmk/common.hpp"

namespace lpmk {

// Seidel's randomized incremental LP for a handful of unknowns:
//   maximize c.x  subject to  A x <= b,  |x_j| <= bound.
// Expected O(d! m) time; d stays <= 6 here so the factorial is harmless.

struct LpResult {
    Vec x;
    bool feasible = false;
    bool bounded = false;
    double value = 0.0;
};

namespace detail {

struct LpRow {
    std::vector<double> a;
    double b;
};

inline bool lp_solve_rec(std::vector<LpRow> rows, std::vector<double> c, double bound,
                         SplitMix64& rng, std::vector<double>& x_out) {
    const int d = static_cast<int>(c.size());
    const double eps = 1e-11;

    if (d == 1) {
        double lo = -bound, hi = bound;
        for (const auto& r : rows) {
            const double a = r.a[0];
            if (std::abs(a) <= eps) {
                if (r.b < -eps) return false;
                continue;
            }
            if (a > 0)
                hi = std::min(hi, r.b / a);
            else
                lo = std::max(lo, r.b / a);
        }
        if (lo > hi + eps) return false;
        x_out.resize(1);
        x_out[0] = c[0] > 0 ? hi : (c[0] < 0 ? lo : std::clamp(0.0, lo, hi));
        return true;
    }

    // Fisher-Yates with the deterministic stream.
    for (size_t i = rows.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next() % i);
        std::swap(rows[i - 1], rows[j]);
    }

    std::vector<double> x(d);
    for (int j = 0; j < d; ++j) x[j] = c[j] > 0 ? bound : (c[j] < 0 ? -bound : 0.0);

    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& ri = rows[i];
        double lhs = 0.0;
        for (int j = 0; j < d; ++j) lhs += ri.a[j] * x[j];
        if (lhs <= ri.b + eps * (1.0 + std::abs(ri.b))) continue;

        // Optimum of the first i constraints lies on this hyperplane.
        int k = 0;
        for (int j = 1; j < d; ++j)
            if (std::abs(ri.a[j]) > std::abs(ri.a[k])) k = j;
        if (std::abs(ri.a[k]) <= eps) {
            if (ri.b < -eps) return false;
            continue;
        }
        const double ak = ri.a[k];

        auto project_row = [&](const std::vector<double>& a, double b) {
            LpRow out;
            out.a.resize(d - 1);
            const double f = a[k] / ak;
            int jj = 0;
            for (int j = 0; j < d; ++j) {
                if (j == k) continue;
                out.a[jj++] = a[j] - f * ri.a[j];
            }
            out.b = b - f * ri.b;
            return out;
        };

        std::vector<LpRow> sub;
        sub.reserve(i + 2);
        for (size_t t = 0; t < i; ++t) sub.push_back(project_row(rows[t].a, rows[t].b));
        {
            // Bounds of the eliminated variable become ordinary constraints.
            std::vector<double> e(d, 0.0);
            e[k] = 1.0;
            sub.push_back(project_row(e, bound));
            e[k] = -1.0;
            sub.push_back(project_row(e, bound));
        }
        std::vector<double> csub(d - 1);
        {
            const double f = c[k] / ak;
            int jj = 0;
            for (int j = 0; j < d; ++j) {
                if (j == k) continue;
                csub[jj++] = c[j] - f * ri.a[j];
            }
        }
        std::vector<double> xsub;
        if (!lp_solve_rec(std::move(sub), std::move(csub), bound, rng, xsub)) return false;
        int jj = 0;
        double xk = ri.b;
        for (int j = 0; j < d; ++j) {
            if (j == k) continue;
            x[j] = xsub[jj++];
            xk -= ri.a[j] * x[j];
        }
        x[k] = xk / ak;
    }
    x_out = std::move(x);
    return true;
}

}  // namespace detail

inline LpResult seidel_lp_max(const Mat& A, const Vec& b, const Vec& c, double bound = 1e8,
                              uint64_t seed = 0x5eed11u) {
    const int d = static_cast<int>(c.size());
    if (d < 1 || d > 6) throw UnsupportedDimension("seidel_lp_max: dimension must be in [1,6]");
    if (A.cols() != d || A.rows() != b.size())
        throw LengthMismatch("seidel_lp_max: inconsistent shapes");

    std::vector<detail::LpRow> rows(static_cast<size_t>(A.rows()));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        rows[i].a.assign(A.row(i).begin(), A.row(i).end());
        rows[i].b = b(i);
    }
    std::vector<double> cv(c.begin(), c.end());
    SplitMix64 rng(seed);

    LpResult res;
    std::vector<double> x;
    if (!detail::lp_solve_rec(std::move(rows), std::move(cv), bound, rng, x)) return res;
    res.feasible = true;
    res.x = Eigen::Map<Vec>(x.data(), d);
    res.bounded = res.x.cwiseAbs().maxCoeff() < bound * (1.0 - 1e-7);
    res.value = res.x.dot(c);
    return res;
}

}  // namespace lpmk
