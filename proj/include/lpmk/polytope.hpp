#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

#include "lpmk/lp.hpp"
#include "lpmk/sphere.hpp"

namespace lpmk {

/// Convex body as an intersection of halfspaces { x : <x, u_i> <= h_i }.
/// Normals are unit vectors; offsets are the support values of the facets.
struct HPolytope {
    int dim = 0;
    Mat normals;  // m x dim, unit rows
    Vec offsets;  // m

    int facet_count() const { return static_cast<int>(normals.rows()); }
    Vec normal(int i) const { return normals.row(i).transpose(); }
};

struct FacetGeometry {
    int normal_index = -1;
    double area = 0.0;            // H^(n-1) measure of the facet
    std::vector<int> vertex_ids;  // ordered along the facet boundary for n = 3
};

struct VertexComplex {
    int dim = 0;
    Mat vertices;  // V x dim
    std::vector<FacetGeometry> facets;
    std::vector<int> inactive_normals;

    double surface_area() const {
        std::vector<double> a;
        a.reserve(facets.size());
        for (const auto& f : facets) a.push_back(f.area);
        return tree_sum(a);
    }

    /// Sum of area_i * u_i; zero for every bounded polytope (closure).
    Vec area_normal_sum(const HPolytope& p) const {
        Vec s = Vec::Zero(p.dim);
        for (const auto& f : facets) s += f.area * p.normal(f.normal_index);
        return s;
    }

    /// Facet area per normal index, zero where inactive.
    Vec areas_by_normal(int normal_count) const {
        Vec a = Vec::Zero(normal_count);
        for (const auto& f : facets) a(f.normal_index) = f.area;
        return a;
    }
};

inline constexpr double kFacetAreaCutoff = 1e-12;
inline constexpr double kVertexMergeTol = 1e-9;

namespace detail {

inline const SphereGrid& span_test_grid(int dim) {
    static const SphereGrid g2 = build_grid(2, 2);
    static const SphereGrid g3 = build_grid(3, 2);
    if (dim == 2) return g2;
    if (dim == 3) return g3;
    throw UnsupportedDimension("span_test_grid: dim must be 2 or 3");
}

}  // namespace detail

/// Directions positively span R^n iff no test direction sees all normals in a
/// closed half-space. Probed on a level-2 grid.
inline bool positively_spans(const Mat& directions, int dim) {
    if (dim > 3) throw UnsupportedDimension("positively_spans: dim must be <= 3");
    const SphereGrid& g = detail::span_test_grid(dim);
    for (int t = 0; t < g.size(); ++t) {
        const Vec v = g.node(t);
        double best = -1.0;
        for (Eigen::Index i = 0; i < directions.rows(); ++i)
            best = std::max(best, directions.row(i).dot(v));
        if (best <= 1e-12) return false;
    }
    return true;
}

inline void validate_polytope(const HPolytope& p) {
    if (p.dim < 2) throw InvalidParams("HPolytope: dim must be >= 2");
    if (p.normals.cols() != p.dim || p.normals.rows() != p.offsets.size())
        throw LengthMismatch("HPolytope: inconsistent shapes");
    if (p.facet_count() < p.dim + 1) throw DegenerateBody("HPolytope: too few halfspaces");
    for (int i = 0; i < p.facet_count(); ++i) {
        if (std::abs(p.normals.row(i).norm() - 1.0) > 1e-12)
            throw InvalidParams("HPolytope: normals must be unit vectors");
        if (!std::isfinite(p.offsets(i))) throw InvalidParams("HPolytope: non-finite offset");
    }
    // Near-duplicate normals: lexicographic sort, then compare within a
    // sliding first-coordinate window.
    std::vector<int> order(p.facet_count());
    for (int i = 0; i < p.facet_count(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        for (int k = 0; k < p.dim; ++k) {
            if (p.normals(a, k) != p.normals(b, k)) return p.normals(a, k) < p.normals(b, k);
        }
        return false;
    });
    for (size_t i = 0; i < order.size(); ++i)
        for (size_t j = i + 1; j < order.size(); ++j) {
            if (p.normals(order[j], 0) - p.normals(order[i], 0) > 1e-10) break;
            if ((p.normals.row(order[i]) - p.normals.row(order[j])).norm() < 1e-10)
                throw InvalidParams("HPolytope: duplicate normals");
        }
    if (p.dim <= 3 && !positively_spans(p.normals, p.dim))
        throw UnboundedBody("HPolytope: normals do not positively span");
}

namespace detail {

template <int D>
VertexComplex enumerate_impl(const HPolytope& p) {
    using VecD = Eigen::Matrix<double, D, 1>;
    using MatD = Eigen::Matrix<double, D, D>;
    const int m = p.facet_count();

    std::vector<VecD> normals(m);
    for (int i = 0; i < m; ++i) normals[i] = p.normals.row(i).transpose().head<D>();
    const double scale = 1.0 + p.offsets.cwiseAbs().maxCoeff();
    const double feas_tol = 1e-9 * scale;

    std::vector<VecD> verts;
    auto try_combo = [&](const std::array<int, D>& ids) {
        MatD A;
        VecD b;
        for (int r = 0; r < D; ++r) {
            A.row(r) = normals[ids[r]].transpose();
            b(r) = p.offsets(ids[r]);
        }
        Eigen::FullPivLU<MatD> lu(A);
        if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-10) return;
        const VecD x = lu.solve(b);
        for (int k = 0; k < m; ++k)
            if (normals[k].dot(x) > p.offsets(k) + feas_tol) return;
        for (const auto& v : verts)
            if ((v - x).norm() <= kVertexMergeTol) return;
        verts.push_back(x);
    };

    if constexpr (D == 2) {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) try_combo({i, j});
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                for (int k = j + 1; k < m; ++k) try_combo({i, j, k});
    }

    if (verts.empty()) throw UnboundedBody("enumerate_vertices: no vertices found");

    VertexComplex vc;
    vc.dim = D;
    vc.vertices.resize(static_cast<Eigen::Index>(verts.size()), D);
    for (size_t i = 0; i < verts.size(); ++i) vc.vertices.row(static_cast<int>(i)) = verts[i].transpose();

    for (int i = 0; i < m; ++i) {
        std::vector<int> on;
        for (size_t v = 0; v < verts.size(); ++v)
            if (normals[i].dot(verts[v]) >= p.offsets(i) - feas_tol) on.push_back(static_cast<int>(v));

        FacetGeometry fg;
        fg.normal_index = i;
        if constexpr (D == 2) {
            if (on.size() >= 2) {
                const VecD tang(-normals[i](1), normals[i](0));
                std::sort(on.begin(), on.end(), [&](int a, int b) {
                    return tang.dot(verts[a]) < tang.dot(verts[b]);
                });
                fg.vertex_ids = on;
                fg.area = tang.dot(verts[on.back()]) - tang.dot(verts[on.front()]);
            }
        } else {
            if (on.size() >= 3) {
                // In-plane frame, vertices sorted by angle about the centroid.
                const VecD u = normals[i];
                VecD e1 = u.cross(std::abs(u(0)) < 0.9 ? VecD(1, 0, 0) : VecD(0, 1, 0));
                e1.normalize();
                const VecD e2 = u.cross(e1);
                VecD cen = VecD::Zero();
                for (int v : on) cen += verts[v];
                cen /= static_cast<double>(on.size());
                std::sort(on.begin(), on.end(), [&](int a, int b) {
                    const VecD da = verts[a] - cen, db = verts[b] - cen;
                    return std::atan2(e2.dot(da), e1.dot(da)) < std::atan2(e2.dot(db), e1.dot(db));
                });
                double twice_area = 0.0;
                for (size_t t = 0; t < on.size(); ++t) {
                    const VecD a = verts[on[t]] - cen, b = verts[on[(t + 1) % on.size()]] - cen;
                    twice_area += e1.dot(a) * e2.dot(b) - e2.dot(a) * e1.dot(b);
                }
                fg.vertex_ids = on;
                fg.area = 0.5 * std::abs(twice_area);
            }
        }
        if (fg.area >= kFacetAreaCutoff)
            vc.facets.push_back(std::move(fg));
        else
            vc.inactive_normals.push_back(i);
    }

    // Interior must be nonempty: probe the volume from the vertex centroid.
    Vec cen = vc.vertices.colwise().mean().transpose();
    std::vector<double> cones;
    for (const auto& f : vc.facets)
        cones.push_back((p.offsets(f.normal_index) - p.normal(f.normal_index).dot(cen)) * f.area);
    if (vc.facets.empty() || tree_sum(cones) / D <= 1e-12 * std::pow(scale, D))
        throw DegenerateBody("enumerate_vertices: empty interior");
    return vc;
}

}  // namespace detail

inline VertexComplex enumerate_vertices(const HPolytope& p) {
    validate_polytope(p);
    if (p.dim == 2) return detail::enumerate_impl<2>(p);
    if (p.dim == 3) return detail::enumerate_impl<3>(p);
    throw UnsupportedDimension("enumerate_vertices: dim must be 2 or 3");
}

/// h_P(x) = max { <x, y> : y in P }, evaluated by linear programming so it
/// works for facet counts far beyond what vertex enumeration can handle.
inline double support_eval(const HPolytope& p, const Vec& x) {
    if (x.size() != p.dim) throw LengthMismatch("support_eval: direction dimension mismatch");
    if (x.norm() == 0.0) return 0.0;
    const LpResult r = seidel_lp_max(p.normals, p.offsets, x);
    if (!r.feasible) throw DegenerateBody("support_eval: empty body");
    if (!r.bounded) throw UnboundedBody("support_eval: unbounded in the given direction");
    return r.value;
}

/// Max over stored vertices; the enumeration-backed route.
inline double support_eval(const VertexComplex& vc, const Vec& x) {
    return (vc.vertices * x).maxCoeff();
}

struct ChebyshevBall {
    Vec center;
    double radius = 0.0;
};

/// Largest inscribed ball via the LP  max r  s.t.  <c,u_i> + r <= h_i,
/// refined coordinate-by-coordinate to the lexicographically smallest center.
inline ChebyshevBall chebyshev_center(const HPolytope& p) {
    const int n = p.dim;
    const int m = p.facet_count();
    Mat A(m, n + 1);
    A.leftCols(n) = p.normals;
    A.col(n).setOnes();
    Vec b = p.offsets;

    Vec obj = Vec::Zero(n + 1);
    obj(n) = 1.0;
    LpResult r = seidel_lp_max(A, b, obj);
    if (!r.feasible) throw DegenerateBody("chebyshev_center: empty body");
    const double radius = r.x(n);
    if (radius <= 0.0) throw DegenerateBody("chebyshev_center: empty interior");

    // Lexicographic tie-break: fix r at its optimum, then minimize each
    // center coordinate in turn.
    Mat Af = A;
    Vec bf = b;
    auto append_row = [&](const Vec& row, double rhs) {
        Af.conservativeResize(Af.rows() + 1, Eigen::NoChange);
        Af.row(Af.rows() - 1) = row.transpose();
        bf.conservativeResize(bf.size() + 1);
        bf(bf.size() - 1) = rhs;
    };
    Vec row = Vec::Zero(n + 1);
    row(n) = -1.0;
    append_row(row, -radius + 1e-11);
    Vec center(n);
    for (int j = 0; j < n; ++j) {
        Vec cj = Vec::Zero(n + 1);
        cj(j) = -1.0;
        const LpResult rj = seidel_lp_max(Af, bf, cj);
        if (!rj.feasible) break;
        center(j) = rj.x(j);
        Vec fix = Vec::Zero(n + 1);
        fix(j) = 1.0;
        append_row(fix, center(j) + 1e-11);
        fix(j) = -1.0;
        append_row(fix, -center(j) + 1e-11);
    }
    return {center, radius};
}

/// Cone-decomposition volume, taken from the Chebyshev center so bodies with
/// the origin outside are handled by the same translation-invariant formula.
inline double volume(const HPolytope& p, const VertexComplex& vc, const Vec& base_point) {
    std::vector<double> cones;
    cones.reserve(vc.facets.size());
    for (const auto& f : vc.facets)
        cones.push_back((p.offsets(f.normal_index) - p.normal(f.normal_index).dot(base_point)) *
                        f.area);
    return tree_sum(cones) / p.dim;
}

inline double volume(const HPolytope& p) {
    if (p.dim > 3) throw UnsupportedDimension("volume: dim must be 2 or 3");
    const VertexComplex vc = enumerate_vertices(p);
    const ChebyshevBall ball = chebyshev_center(p);
    return volume(p, vc, ball.center);
}

inline HPolytope translate(const HPolytope& p, const Vec& t) {
    HPolytope q = p;
    q.offsets += p.normals * t;
    return q;
}

/// Polar body P* = { y : <y,x> <= 1 for x in P }. Facets of P* are the
/// vertices of P; requires the origin strictly inside.
inline HPolytope polar(const HPolytope& p) {
    if (p.offsets.minCoeff() <= 0.0)
        throw OriginNotInterior("polar: origin must be interior (all offsets positive)");
    const VertexComplex vc = enumerate_vertices(p);

    std::vector<Vec> dirs;
    std::vector<double> offs;
    for (Eigen::Index v = 0; v < vc.vertices.rows(); ++v) {
        const Vec x = vc.vertices.row(v).transpose();
        const double nx = x.norm();
        if (nx <= 1e-14) throw OriginNotInterior("polar: vertex at the origin");
        const Vec dir = x / nx;
        const double off = 1.0 / nx;
        bool merged = false;
        for (size_t k = 0; k < dirs.size(); ++k)
            if ((dirs[k] - dir).norm() < 1e-10) {
                offs[k] = std::min(offs[k], off);
                merged = true;
                break;
            }
        if (!merged) {
            dirs.push_back(dir);
            offs.push_back(off);
        }
    }
    HPolytope q;
    q.dim = p.dim;
    q.normals.resize(static_cast<Eigen::Index>(dirs.size()), p.dim);
    q.offsets.resize(static_cast<Eigen::Index>(dirs.size()));
    for (size_t k = 0; k < dirs.size(); ++k) {
        q.normals.row(static_cast<int>(k)) = dirs[k].transpose();
        q.offsets(static_cast<int>(k)) = offs[k];
    }
    return q;
}

enum class OriginLocation { interior, boundary, unknown };

/// Support-function samples on a sphere grid.
struct SupportField {
    SphereGrid grid;
    Vec values;
    OriginLocation originLocation = OriginLocation::unknown;
};

inline SupportField support_field_from_polytope(const HPolytope& p, const SphereGrid& grid) {
    if (grid.dim != p.dim) throw LengthMismatch("support_field_from_polytope: dimension mismatch");
    SupportField f;
    f.grid = grid;
    f.values.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) f.values(i) = support_eval(p, grid.node(i));
    const double mn = p.offsets.minCoeff();
    f.originLocation = mn > 1e-12    ? OriginLocation::interior
                       : mn > -1e-12 ? OriginLocation::boundary
                                     : OriginLocation::unknown;
    return f;
}

/// Worst violation of midpoint subadditivity of the 1-homogeneous extension,
/// measured over near-opposite neighbor pairs of every node. Nonpositive (up
/// to discretization slack) for genuine support functions.
inline double support_convexity_defect(const SupportField& f) {
    const SphereGrid& g = f.grid;
    if (g.neighbors.empty())
        throw UnsupportedDimension("support_convexity_defect: grid has no mesh structure");
    double edge = 0.0;
    for (int i = 0; i < g.size(); ++i)
        for (int j : g.neighbors[i]) edge = std::max(edge, (g.node(i) - g.node(j)).norm());
    const double radius_bound = f.values.cwiseAbs().maxCoeff();

    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.size(); ++i) {
        const auto& nb = g.neighbors[i];
        for (size_t a = 0; a < nb.size(); ++a)
            for (size_t b = a + 1; b < nb.size(); ++b) {
                const Vec v1 = g.node(nb[a]), v2 = g.node(nb[b]);
                Vec mid = v1 + v2;
                const double nm = mid.norm();
                if (nm < 1e-12) continue;
                const double drift = (mid / nm - g.node(i)).norm();
                if (drift > 0.1 * edge) continue;  // i is not the midpoint of (v1,v2)
                const double lhs = nm * f.values(i);
                const double rhs = f.values(nb[a]) + f.values(nb[b]) + 2.0 * radius_bound * drift;
                worst = std::max(worst, lhs - rhs);
            }
    }
    return worst;
}

}  // namespace lpmk
