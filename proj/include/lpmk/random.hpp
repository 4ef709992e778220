#pragma once

#include "lpmk/polytope.hpp"

namespace lpmk {

// Deterministic RNG built on splitmix64. std:: distributions are
// implementation-defined, which would break byte-identical experiment
// output, so the few draws needed are done by hand.
class Rng {
  public:
    explicit Rng(uint64_t seed) : sm_(seed) {}

    double uniform() { return static_cast<double>(sm_.next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * pi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * pi * u2);
    }

    Vec unit_vector(int dim) {
        Vec v(dim);
        do {
            for (int i = 0; i < dim; ++i) v(i) = normal();
        } while (v.norm() < 1e-8);
        return v / v.norm();
    }

    Mat rotation(int dim) {
        Mat g(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) g(i, j) = normal();
        Eigen::HouseholderQR<Mat> qr(g);
        Mat q = qr.householderQ();
        Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < dim; ++i)
            if (r(i, i) < 0) q.col(i) *= -1.0;
        if (q.determinant() < 0) q.col(0) *= -1.0;
        return q;
    }

  private:
    SplitMix64 sm_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Random bounded polytope with the origin well inside (inradius >= 0.7).
/// Directions are kept angularly separated so facets stay well-conditioned.
inline HPolytope random_polytope(int dim, int facets, Rng& rng) {
    if (dim != 2 && dim != 3) throw UnsupportedDimension("random_polytope: dim must be 2 or 3");
    HPolytope p;
    p.dim = dim;
    p.normals.resize(facets, dim);
    p.offsets.resize(facets);

    for (int attempt = 0; attempt < 64; ++attempt) {
        if (dim == 2) {
            for (int i = 0; i < facets; ++i) {
                const double th = 2.0 * pi * (i + 0.25 + 0.5 * rng.uniform()) / facets;
                p.normals(i, 0) = std::cos(th);
                p.normals(i, 1) = std::sin(th);
            }
        } else {
            const double min_dot = std::cos(0.35);
            int placed = 0;
            int guard = 0;
            while (placed < facets && ++guard < 20000) {
                const Vec u = rng.unit_vector(3);
                bool ok = true;
                for (int j = 0; j < placed && ok; ++j)
                    if (p.normals.row(j).dot(u) > min_dot) ok = false;
                if (ok) p.normals.row(placed++) = u.transpose();
            }
            if (placed < facets) continue;
        }
        if (!positively_spans(p.normals, dim)) continue;
        for (int i = 0; i < facets; ++i) p.offsets(i) = rng.uniform(0.7, 1.3);
        return p;
    }
    throw std::runtime_error("random_polytope: failed to place directions");
}

/// Origin-symmetric polygon: paired normals +-u with equal offsets.
inline HPolytope random_centered_polygon(int pairs, Rng& rng) {
    HPolytope p;
    p.dim = 2;
    p.normals.resize(2 * pairs, 2);
    p.offsets.resize(2 * pairs);
    for (int i = 0; i < pairs; ++i) {
        const double th = pi * (i + 0.25 + 0.5 * rng.uniform()) / pairs;
        const double off = rng.uniform(0.5, 1.5);
        p.normals(2 * i, 0) = std::cos(th);
        p.normals(2 * i, 1) = std::sin(th);
        p.normals(2 * i + 1, 0) = -std::cos(th);
        p.normals(2 * i + 1, 1) = -std::sin(th);
        p.offsets(2 * i) = off;
        p.offsets(2 * i + 1) = off;
    }
    return p;
}

/// Origin-symmetric polytope in dimension 2 or 3.
inline HPolytope random_symmetric_polytope(int dim, int pairs, Rng& rng) {
    if (dim == 2) return random_centered_polygon(pairs, rng);
    if (dim != 3) throw UnsupportedDimension("random_symmetric_polytope: dim must be 2 or 3");
    HPolytope p;
    p.dim = 3;
    p.normals.resize(2 * pairs, 3);
    p.offsets.resize(2 * pairs);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double min_dot = std::cos(0.4);
        int placed = 0;
        int guard = 0;
        while (placed < pairs && ++guard < 20000) {
            const Vec u = rng.unit_vector(3);
            bool ok = true;
            for (int j = 0; j < 2 * placed && ok; ++j)
                if (std::abs(p.normals.row(j).dot(u)) > min_dot) ok = false;
            if (!ok) continue;
            const double off = rng.uniform(0.6, 1.4);
            p.normals.row(2 * placed) = u.transpose();
            p.normals.row(2 * placed + 1) = -u.transpose();
            p.offsets(2 * placed) = off;
            p.offsets(2 * placed + 1) = off;
            ++placed;
        }
        if (placed == pairs && positively_spans(p.normals, 3)) return p;
    }
    throw std::runtime_error("random_symmetric_polytope: failed to place directions");
}

/// Axis-aligned box [-a1,a1] x ... as an HPolytope.
inline HPolytope box_polytope(const Vec& half_widths) {
    const int dim = static_cast<int>(half_widths.size());
    HPolytope p;
    p.dim = dim;
    p.normals = Mat::Zero(2 * dim, dim);
    p.offsets.resize(2 * dim);
    for (int i = 0; i < dim; ++i) {
        p.normals(2 * i, i) = 1.0;
        p.normals(2 * i + 1, i) = -1.0;
        p.offsets(2 * i) = half_widths(i);
        p.offsets(2 * i + 1) = half_widths(i);
    }
    return p;
}

inline HPolytope unit_cube(int dim) { return box_polytope(Vec::Ones(dim)); }

}  // namespace lpmk
