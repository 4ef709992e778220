#pragma once

#include <vector>

#include "lpmk/sphere.hpp"

namespace lpmk {

// Discrete Laplace-Beltrami operator in stiffness/mass form. The stiffness
// matrix is symmetric negative-semidefinite with constants in its kernel;
// the operator itself acts as M^(-1) S. Eigenvalues solve S v = lambda M v.
struct LaplaceBeltrami {
    Mat stiffness;
    Vec mass;

    Vec apply(const Vec& f) const {
        if (f.size() != mass.size()) throw LengthMismatch("LaplaceBeltrami::apply size mismatch");
        return (stiffness * f).cwiseQuotient(mass);
    }

    /// Ascending generalized eigenvalues (most negative first, 0 last).
    Vec eigenvalues() const {
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(stiffness, Mat(mass.asDiagonal()));
        if (es.info() != Eigen::Success)
            throw std::runtime_error("LaplaceBeltrami eigensolver failed");
        return es.eigenvalues();
    }
};

namespace detail {

// Fourier second-derivative matrix on the uniform circle grid: circulant,
// exact on all modes the grid can represent.
inline Mat circle_second_derivative(int n) {
    Vec c = Vec::Zero(n);
    for (int m = 0; m < n; ++m) {
        double s = 0.0;
        const double t = 2.0 * pi * m / n;
        for (int k = 1; k < n / 2; ++k) s += -2.0 * k * k * std::cos(k * t);
        s += -0.25 * double(n) * n * std::cos(0.5 * n * t);
        c(m) = s / n;
    }
    Mat d2(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) d2(j, l) = c((j - l + n) % n);
    return d2;
}

}  // namespace detail

inline LaplaceBeltrami laplacian_matrix(const SphereGrid& grid) {
    if (grid.dim >= 4)
        throw UnsupportedDimension("laplacian_matrix: only dim 2 and 3 are supported");
    LaplaceBeltrami lb;
    if (grid.dim == 2) {
        const int n = grid.size();
        const double w = 2.0 * pi / n;
        const Mat d2 = detail::circle_second_derivative(n);
        lb.stiffness = w * 0.5 * (d2 + d2.transpose());  // symmetrize roundoff
        lb.mass = Vec::Constant(n, w);
        return lb;
    }
    // Cotangent stiffness on the triangulated sphere, Voronoi lumped mass.
    const int n = grid.size();
    lb.stiffness = Mat::Zero(n, n);
    lb.mass = grid.weights;
    for (const auto& f : grid.triangles) {
        const Eigen::Vector3d a = grid.nodes.row(f[0]), b = grid.nodes.row(f[1]),
                              c = grid.nodes.row(f[2]);
        auto cot = [](const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
            return u.dot(v) / u.cross(v).norm();
        };
        const double ca = cot(b - a, c - a);  // opposite edge (b,c)
        const double cb = cot(a - b, c - b);  // opposite edge (a,c)
        const double cc = cot(a - c, b - c);  // opposite edge (a,b)
        auto add = [&](int i, int j, double w) {
            lb.stiffness(i, j) += 0.5 * w;
            lb.stiffness(j, i) += 0.5 * w;
            lb.stiffness(i, i) -= 0.5 * w;
            lb.stiffness(j, j) -= 0.5 * w;
        };
        add(f[1], f[2], ca);
        add(f[0], f[2], cb);
        add(f[0], f[1], cc);
    }
    return lb;
}

/// Analytic Laplace-Beltrami eigenvalue -(k^2 + (n-2) k) on S^(n-1).
inline double sphere_eigenvalue(int n, int k) { return -(double(k) * k + (n - 2.0) * k); }

/// Multiplicity of the degree-k eigenspace on S^(n-1) for n in {2,3}.
inline int sphere_eigenvalue_multiplicity(int n, int k) {
    if (k == 0) return 1;
    if (n == 2) return 2;
    if (n == 3) return 2 * k + 1;
    throw UnsupportedDimension("sphere_eigenvalue_multiplicity: n must be 2 or 3");
}

/// Spherical-harmonic family up to maxDegree, re-orthonormalized against the
/// grid inner product so the discrete Gram matrix is the identity.
struct HarmonicBasis {
    int dim = 0;
    int maxDegree = 0;
    Mat evaluations;           // N x B
    std::vector<int> degrees;  // degree of each column
};

namespace detail {

inline double real_sh3(int idx, double x, double y, double z) {
    // Fully normalized real spherical harmonics, degrees 0..3.
    static const double c0 = 0.5 / std::sqrt(pi);
    switch (idx) {
        case 0: return c0;
        case 1: return std::sqrt(3.0 / (4 * pi)) * x;
        case 2: return std::sqrt(3.0 / (4 * pi)) * y;
        case 3: return std::sqrt(3.0 / (4 * pi)) * z;
        case 4: return 0.5 * std::sqrt(15.0 / pi) * x * y;
        case 5: return 0.5 * std::sqrt(15.0 / pi) * y * z;
        case 6: return 0.5 * std::sqrt(15.0 / pi) * x * z;
        case 7: return 0.25 * std::sqrt(15.0 / pi) * (x * x - y * y);
        case 8: return 0.25 * std::sqrt(5.0 / pi) * (3 * z * z - 1);
        case 9: return 0.25 * std::sqrt(35.0 / (2 * pi)) * y * (3 * x * x - y * y);
        case 10: return 0.5 * std::sqrt(105.0 / pi) * x * y * z;
        case 11: return 0.25 * std::sqrt(21.0 / (2 * pi)) * y * (5 * z * z - 1);
        case 12: return 0.25 * std::sqrt(7.0 / pi) * z * (5 * z * z - 3);
        case 13: return 0.25 * std::sqrt(21.0 / (2 * pi)) * x * (5 * z * z - 1);
        case 14: return 0.25 * std::sqrt(105.0 / pi) * z * (x * x - y * y);
        case 15: return 0.25 * std::sqrt(35.0 / (2 * pi)) * x * (x * x - 3 * y * y);
        default: throw InvalidParams("real_sh3: index out of range");
    }
}

}  // namespace detail

inline HarmonicBasis build_harmonic_basis(const SphereGrid& grid, int maxDegree) {
    if (maxDegree < 0) throw InvalidParams("build_harmonic_basis: maxDegree must be >= 0");
    HarmonicBasis hb;
    hb.dim = grid.dim;
    hb.maxDegree = maxDegree;
    const int n = grid.size();

    if (grid.dim == 2) {
        const int nb = 1 + 2 * maxDegree;
        hb.evaluations.resize(n, nb);
        hb.degrees.assign(nb, 0);
        for (int i = 0; i < n; ++i) {
            const double th = std::atan2(grid.nodes(i, 1), grid.nodes(i, 0));
            hb.evaluations(i, 0) = 1.0 / std::sqrt(2.0 * pi);
            for (int k = 1; k <= maxDegree; ++k) {
                hb.evaluations(i, 2 * k - 1) = std::cos(k * th) / std::sqrt(pi);
                hb.evaluations(i, 2 * k) = std::sin(k * th) / std::sqrt(pi);
            }
        }
        for (int k = 1; k <= maxDegree; ++k) hb.degrees[2 * k - 1] = hb.degrees[2 * k] = k;
    } else if (grid.dim == 3) {
        if (maxDegree > 3)
            throw UnsupportedDimension("build_harmonic_basis: dim 3 supports degree <= 3");
        const int per[4] = {1, 3, 5, 7};
        int nb = 0;
        for (int k = 0; k <= maxDegree; ++k) nb += per[k];
        hb.evaluations.resize(n, nb);
        hb.degrees.clear();
        for (int k = 0; k <= maxDegree; ++k)
            for (int j = 0; j < per[k]; ++j) hb.degrees.push_back(k);
        for (int i = 0; i < n; ++i)
            for (int b = 0; b < nb; ++b)
                hb.evaluations(i, b) =
                    detail::real_sh3(b, grid.nodes(i, 0), grid.nodes(i, 1), grid.nodes(i, 2));
    } else {
        throw UnsupportedDimension("build_harmonic_basis: only dim 2 and 3");
    }

    // Symmetric (Loewdin) orthonormalization against the quadrature inner
    // product; the analytic family is already orthonormal up to grid error.
    const Mat gram =
        hb.evaluations.transpose() * grid.weights.asDiagonal() * hb.evaluations;
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    const Mat ginvsqrt = es.operatorInverseSqrt();
    hb.evaluations = hb.evaluations * ginvsqrt;
    return hb;
}

}  // namespace lpmk
