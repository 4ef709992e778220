#pragma once

#include <algorithm>
#include <array>
#include <concepts>
#include <map>
#include <utility>
#include <vector>

#include "lpmk/common.hpp"

namespace lpmk {

/// Quadrature nodes and weights on S^(n-1). Immutable after construction.
///
/// Grid families by dimension:
///   n = 2   uniformly spaced angles, 2^(level+4) nodes, equal weights
///   n = 3   subdivided icosahedron with spherical Voronoi-cell weights
///   n >= 4  angle tensor grid; each cell weight integrates the Jacobian in
///           closed form, so weights always sum to the exact surface measure
struct SphereGrid {
    int dim = 0;
    int level = 0;
    Mat nodes;    // N x dim, unit rows
    Vec weights;  // N, strictly positive

    // Mesh structure where one exists (n = 2 ring, n = 3 triangle mesh).
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::vector<int>> neighbors;

    int size() const { return static_cast<int>(nodes.rows()); }
    Vec node(int i) const { return nodes.row(i).transpose(); }
    double total_weight() const {
        std::vector<double> w(weights.begin(), weights.end());
        return tree_sum(w);
    }
};

namespace detail {

// Signed area of the spherical triangle (a,b,c) via Van Oosterom-Strackee.
inline double spherical_triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                      const Eigen::Vector3d& c) {
    const double num = a.dot(b.cross(c));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
}

inline Eigen::Vector3d normalized_mid(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return (a + b).normalized();
}

struct IcosaMesh {
    std::vector<Eigen::Vector3d> verts;
    std::vector<std::array<int, 3>> faces;
};

inline IcosaMesh base_icosahedron() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    IcosaMesh m;
    const double coords[12][3] = {
        {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
        {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& c : coords) m.verts.push_back(Eigen::Vector3d(c[0], c[1], c[2]).normalized());
    // Faces: mutually adjacent triples, oriented outward.
    const double edge_dot = m.verts[0].dot(m.verts[1]);  // cos of edge angle
    auto adjacent = [&](int i, int j) { return m.verts[i].dot(m.verts[j]) > edge_dot - 1e-9; };
    for (int i = 0; i < 12; ++i)
        for (int j = i + 1; j < 12; ++j)
            for (int k = j + 1; k < 12; ++k)
                if (adjacent(i, j) && adjacent(j, k) && adjacent(i, k)) {
                    std::array<int, 3> f = {i, j, k};
                    const Eigen::Vector3d n =
                        (m.verts[j] - m.verts[i]).cross(m.verts[k] - m.verts[i]);
                    if (n.dot(m.verts[i] + m.verts[j] + m.verts[k]) < 0) std::swap(f[1], f[2]);
                    m.faces.push_back(f);
                }
    return m;
}

inline void subdivide(IcosaMesh& m) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
        auto key = std::minmax(i, j);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int id = static_cast<int>(m.verts.size());
        m.verts.push_back(normalized_mid(m.verts[i], m.verts[j]));
        midpoint.emplace(key, id);
        return id;
    };
    std::vector<std::array<int, 3>> out;
    out.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
        const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
        out.push_back({f[0], ab, ca});
        out.push_back({f[1], bc, ab});
        out.push_back({f[2], ca, bc});
        out.push_back({ab, bc, ca});
    }
    m.faces = std::move(out);
}

inline SphereGrid build_circle_grid(int level) {
    SphereGrid g;
    g.dim = 2;
    g.level = level;
    const int n = 1 << (level + 4);
    g.nodes.resize(n, 2);
    g.weights = Vec::Constant(n, 2.0 * pi / n);
    g.neighbors.resize(n);
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * pi * i / n;
        g.nodes(i, 0) = std::cos(th);
        g.nodes(i, 1) = std::sin(th);
        g.neighbors[i] = {(i + n - 1) % n, (i + 1) % n};
    }
    return g;
}

inline SphereGrid build_icosa_grid(int level) {
    IcosaMesh m = base_icosahedron();
    for (int l = 0; l < level; ++l) subdivide(m);

    SphereGrid g;
    g.dim = 3;
    g.level = level;
    const int n = static_cast<int>(m.verts.size());
    g.nodes.resize(n, 3);
    for (int i = 0; i < n; ++i) g.nodes.row(i) = m.verts[i].transpose();
    g.triangles = m.faces;

    // Spherical Voronoi corner areas: split each geodesic triangle at its
    // circumcenter and the geodesic edge midpoints. Signed areas telescope,
    // so the weights sum to the exact sphere area.
    g.weights = Vec::Zero(n);
    for (const auto& f : m.faces) {
        const Eigen::Vector3d &a = m.verts[f[0]], &b = m.verts[f[1]], &c = m.verts[f[2]];
        Eigen::Vector3d cc = (b - a).cross(c - a).normalized();
        if (cc.dot(a) < 0) cc = -cc;
        const Eigen::Vector3d mab = normalized_mid(a, b), mbc = normalized_mid(b, c),
                              mca = normalized_mid(c, a);
        g.weights(f[0]) += spherical_triangle_area(a, mab, cc) + spherical_triangle_area(a, cc, mca);
        g.weights(f[1]) += spherical_triangle_area(b, mbc, cc) + spherical_triangle_area(b, cc, mab);
        g.weights(f[2]) += spherical_triangle_area(c, mca, cc) + spherical_triangle_area(c, cc, mbc);
    }

    g.neighbors.assign(n, {});
    auto link = [&](int i, int j) {
        auto& v = g.neighbors[i];
        if (std::find(v.begin(), v.end(), j) == v.end()) v.push_back(j);
    };
    for (const auto& f : m.faces)
        for (int e = 0; e < 3; ++e) {
            link(f[e], f[(e + 1) % 3]);
            link(f[(e + 1) % 3], f[e]);
        }
    return g;
}

// Tensor grid in spherical angles; polar cells get exact sin^m integrals as
// weights, so the weight total is the exact surface measure at every level.
inline SphereGrid build_tensor_grid(int dim, int level) {
    const int n_polar = 1 << (level + 2);
    const int n_azim = 1 << (level + 3);
    const int n_angles = dim - 1;

    std::vector<int> counts(n_angles, n_polar);
    counts[n_angles - 1] = n_azim;

    // Per-angle node positions and cell weights.
    std::vector<std::vector<double>> mids(n_angles), cellw(n_angles);
    for (int a = 0; a < n_angles; ++a) {
        const bool azim = (a == n_angles - 1);
        const double span = azim ? 2.0 * pi : pi;
        const int cnt = counts[a];
        const int sin_pow = dim - 2 - a;  // zero for the azimuthal angle
        mids[a].resize(cnt);
        cellw[a].resize(cnt);
        for (int i = 0; i < cnt; ++i) {
            const double lo = span * i / cnt, hi = span * (i + 1) / cnt;
            mids[a][i] = 0.5 * (lo + hi);
            cellw[a][i] = azim ? (hi - lo) : sin_power_integral(sin_pow, lo, hi);
        }
    }

    long total = 1;
    for (int a = 0; a < n_angles; ++a) total *= counts[a];

    SphereGrid g;
    g.dim = dim;
    g.level = level;
    g.nodes.resize(total, dim);
    g.weights.resize(total);

    std::vector<int> idx(n_angles, 0);
    for (long r = 0; r < total; ++r) {
        double w = 1.0, sinprod = 1.0;
        for (int a = 0; a < n_angles; ++a) {
            const double th = mids[a][idx[a]];
            w *= cellw[a][idx[a]];
            g.nodes(r, a) = sinprod * std::cos(th);
            sinprod *= std::sin(th);
        }
        g.nodes(r, n_angles) = sinprod;
        g.nodes.row(r).normalize();
        g.weights(r) = w;
        for (int a = n_angles - 1; a >= 0; --a) {
            if (++idx[a] < counts[a]) break;
            idx[a] = 0;
        }
    }
    return g;
}

}  // namespace detail

inline SphereGrid build_grid(int dim, int level) {
    if (dim < 2) throw InvalidParams("build_grid: dim must be >= 2");
    if (dim > 6) throw UnsupportedDimension("build_grid: dim > 6 is not supported");
    if (level < 0) throw InvalidParams("build_grid: level must be >= 0");
    if (dim == 2) return detail::build_circle_grid(level);
    if (dim == 3) return detail::build_icosa_grid(level);
    return detail::build_tensor_grid(dim, level);
}

/// Quadrature of per-node values against the grid weights.
inline double integrate(const SphereGrid& grid, const Vec& values) {
    if (values.size() != grid.weights.size())
        throw LengthMismatch("integrate: value count does not match node count");
    std::vector<double> terms(static_cast<size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) terms[i] = grid.weights(i) * values(i);
    return tree_sum(terms);
}

template <typename F>
concept NodeFunction = requires(F f, const Vec& u) {
    { f(u) } -> std::convertible_to<double>;
};

template <NodeFunction F>
Vec sample(const SphereGrid& grid, F&& f) {
    Vec v(grid.size());
    for (int i = 0; i < grid.size(); ++i) v(i) = f(grid.node(i));
    return v;
}

template <NodeFunction F>
double integrate(const SphereGrid& grid, F&& f) {
    return integrate(grid, sample(grid, std::forward<F>(f)));
}

}  // namespace lpmk
