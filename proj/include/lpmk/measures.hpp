#pragma once

#include <functional>

#include "lpmk/polytope.hpp"

namespace lpmk {

/// Atomic measure on S^(n-1): (direction, mass) pairs.
struct DiscreteMeasure {
    int dim = 0;
    Mat directions;  // k x dim, unit rows
    Vec masses;      // k, nonnegative

    int atom_count() const { return static_cast<int>(directions.rows()); }
    Vec direction(int i) const { return directions.row(i).transpose(); }

    double total_mass() const {
        std::vector<double> m(masses.begin(), masses.end());
        return tree_sum(m);
    }
    Vec barycenter() const {
        Vec b = Vec::Zero(dim);
        for (int i = 0; i < atom_count(); ++i) b += masses(i) * direction(i);
        return b;
    }
};

inline void validate_measure(const DiscreteMeasure& mu) {
    if (mu.directions.cols() != mu.dim || mu.directions.rows() != mu.masses.size())
        throw LengthMismatch("DiscreteMeasure: inconsistent shapes");
    for (int i = 0; i < mu.atom_count(); ++i) {
        if (std::abs(mu.directions.row(i).norm() - 1.0) > 1e-12)
            throw InvalidParams("DiscreteMeasure: directions must be unit vectors");
        if (!(mu.masses(i) >= 0.0) || !std::isfinite(mu.masses(i)))
            throw InvalidParams("DiscreteMeasure: masses must be finite and nonnegative");
    }
    for (int i = 0; i < mu.atom_count(); ++i)
        for (int j = i + 1; j < mu.atom_count(); ++j)
            if ((mu.directions.row(i) - mu.directions.row(j)).norm() <= 1e-10)
                throw InvalidParams("DiscreteMeasure: directions must be angularly distinct");
}

/// Density against the spherical Lebesgue measure, sampled on a grid.
struct DensityField {
    SphereGrid grid;
    Vec values;  // nonnegative
};

inline void validate_density(const DensityField& f) {
    if (f.values.size() != f.grid.weights.size())
        throw LengthMismatch("DensityField: value count does not match the grid");
    if (f.values.minCoeff() < 0.0) throw InvalidParams("DensityField: negative density");
}

/// Invertible linear map with its |det| cached.
struct LinearMap {
    Mat matrix;
    double detAbs = 0.0;
};

inline LinearMap linear_map(const Mat& a) {
    if (a.rows() != a.cols()) throw InvalidParams("linear_map: matrix must be square");
    const double d = a.determinant();
    if (std::abs(d) <= 1e-14) throw InvalidParams("linear_map: matrix is singular");
    return {a, std::abs(d)};
}

inline void validate_linear_map(const LinearMap& t) {
    if (t.detAbs <= 1e-14) throw InvalidParams("LinearMap: |det| too small");
    if (std::abs(t.detAbs - std::abs(t.matrix.determinant())) > 1e-12 * (1.0 + t.detAbs))
        throw InvalidParams("LinearMap: cached detAbs is stale");
}

// ---------------------------------------------------------------------------

/// Facet areas at facet normals.
inline DiscreteMeasure surface_area_measure(const HPolytope& p, const VertexComplex& vc) {
    DiscreteMeasure mu;
    mu.dim = p.dim;
    mu.directions.resize(static_cast<Eigen::Index>(vc.facets.size()), p.dim);
    mu.masses.resize(static_cast<Eigen::Index>(vc.facets.size()));
    for (size_t k = 0; k < vc.facets.size(); ++k) {
        mu.directions.row(static_cast<int>(k)) = p.normals.row(vc.facets[k].normal_index);
        mu.masses(static_cast<int>(k)) = vc.facets[k].area;
    }
    return mu;
}

inline DiscreteMeasure surface_area_measure(const HPolytope& p) {
    if (p.dim > 3) throw UnsupportedDimension("surface_area_measure: dim must be 2 or 3");
    return surface_area_measure(p, enumerate_vertices(p));
}

/// Atom masses h^(1-p) * area. For p = 1 the exponent is short-circuited so
/// zero offsets stay legal; for p < 1 a zero offset contributes zero mass;
/// for p > 1 a zero offset on an active facet is non-integrable.
inline DiscreteMeasure lp_measure(const HPolytope& p, double pexp, const VertexComplex& vc) {
    DiscreteMeasure mu;
    mu.dim = p.dim;
    mu.directions.resize(static_cast<Eigen::Index>(vc.facets.size()), p.dim);
    mu.masses.resize(static_cast<Eigen::Index>(vc.facets.size()));
    for (size_t k = 0; k < vc.facets.size(); ++k) {
        const auto& f = vc.facets[k];
        const double h = p.offsets(f.normal_index);
        mu.directions.row(static_cast<int>(k)) = p.normals.row(f.normal_index);
        double mass;
        if (pexp == 1.0) {
            mass = f.area;
        } else if (h <= 1e-12) {
            if (h < -1e-12)
                throw OriginOutside("lp_measure: negative offset on an active facet");
            if (pexp > 1.0)
                throw IntegrabilityViolation("lp_measure: zero offset with p > 1");
            mass = 0.0;
        } else {
            mass = std::pow(h, 1.0 - pexp) * f.area;
        }
        mu.masses(static_cast<int>(k)) = mass;
    }
    return mu;
}

inline DiscreteMeasure lp_measure(const HPolytope& p, double pexp) {
    if (p.dim > 3) throw UnsupportedDimension("lp_measure: dim must be 2 or 3");
    return lp_measure(p, pexp, enumerate_vertices(p));
}

/// (1/n) S_{0,K}; total mass equals the volume.
inline DiscreteMeasure cone_volume_measure(const HPolytope& p) {
    if (p.offsets.minCoeff() < -1e-12)
        throw OriginOutside("cone_volume_measure: origin must lie in the body");
    DiscreteMeasure mu = lp_measure(p, 0.0);
    mu.masses /= double(p.dim);
    return mu;
}

/// Push-forward: the atom at u is carried to T u / |T u| with its mass.
inline DiscreteMeasure pushforward(const LinearMap& t, const DiscreteMeasure& mu) {
    DiscreteMeasure out;
    out.dim = mu.dim;
    std::vector<Vec> dirs;
    std::vector<double> masses;
    for (int i = 0; i < mu.atom_count(); ++i) {
        Vec d = t.matrix * mu.direction(i);
        d.normalize();
        bool merged = false;
        for (size_t k = 0; k < dirs.size() && !merged; ++k)
            if ((dirs[k] - d).norm() <= 1e-10) {
                masses[k] += mu.masses(i);
                merged = true;
            }
        if (!merged) {
            dirs.push_back(d);
            masses.push_back(mu.masses(i));
        }
    }
    out.directions.resize(static_cast<Eigen::Index>(dirs.size()), mu.dim);
    out.masses.resize(static_cast<Eigen::Index>(dirs.size()));
    for (size_t k = 0; k < dirs.size(); ++k) {
        out.directions.row(static_cast<int>(k)) = dirs[k].transpose();
        out.masses(static_cast<int>(k)) = masses[k];
    }
    return out;
}

/// Image body T P in halfspace form: h_{TP}(x) = h_P(T^t x), so the facet
/// with normal u maps to normal T^{-t} u (normalized) with a rescaled offset.
inline HPolytope transform_body(const LinearMap& t, const HPolytope& p) {
    const Mat minv_t = t.matrix.inverse().transpose();
    HPolytope q;
    q.dim = p.dim;
    q.normals.resize(p.facet_count(), p.dim);
    q.offsets.resize(p.facet_count());
    for (int i = 0; i < p.facet_count(); ++i) {
        Vec w = minv_t * p.normal(i);
        const double nw = w.norm();
        q.normals.row(i) = (w / nw).transpose();
        q.offsets(i) = p.offsets(i) / nw;
    }
    return q;
}

/// Curvature function of the ellipsoid T B^n through its -(n+1)-homogeneous
/// extension: f(x) = (det T)^2 |T^t x|^(-(n+1)).
inline double curvature_function_ellipsoid(const LinearMap& t, const Vec& x) {
    const int n = static_cast<int>(t.matrix.rows());
    if (x.size() != n) throw LengthMismatch("curvature_function_ellipsoid: dimension mismatch");
    const double r = (t.matrix.transpose() * x).norm();
    if (r <= 0.0) throw InvalidParams("curvature_function_ellipsoid: x must be nonzero");
    return t.detAbs * t.detAbs * std::pow(r, -(n + 1.0));
}

/// Both sides of the change-of-variables law for a (-n)-homogeneous psi:
/// integral of psi(Tx) vs |det T|^{-1} integral of psi.
inline std::pair<double, double> check_equivariance(const LinearMap& t,
                                                    const std::function<double(const Vec&)>& psi,
                                                    const SphereGrid& grid) {
    const double lhs = integrate(grid, [&](const Vec& u) { return psi(Vec(t.matrix * u)); });
    const double rhs = integrate(grid, psi) / t.detAbs;
    return {lhs, rhs};
}

/// Discrete change-of-variables identity for the L_p measure. The left side
/// sums phi over the atoms of S_{p,P}; the right side is assembled from a
/// fresh enumeration of TP, so the two routes share no intermediate results.
inline std::pair<double, double> change_of_variables_lp(
    const LinearMap& t, const HPolytope& p, double pexp,
    const std::function<double(const Vec&)>& phi) {
    const DiscreteMeasure mu = lp_measure(p, pexp);
    std::vector<double> terms(static_cast<size_t>(mu.atom_count()));
    for (int i = 0; i < mu.atom_count(); ++i) terms[i] = phi(mu.direction(i)) * mu.masses(i);
    const double lhs = tree_sum(terms);

    const HPolytope tp = transform_body(t, p);
    const DiscreteMeasure nu = lp_measure(tp, pexp);
    std::vector<double> rterms(static_cast<size_t>(nu.atom_count()));
    for (int i = 0; i < nu.atom_count(); ++i) {
        const Vec y = t.matrix.transpose() * nu.direction(i);
        const double ny = y.norm();
        rterms[i] = phi(Vec(y / ny)) * nu.masses(i) * std::pow(ny, pexp);
    }
    const double rhs = tree_sum(rterms) / t.detAbs;
    return {lhs, rhs};
}

}  // namespace lpmk
