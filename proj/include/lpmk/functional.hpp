#pragma once

#include "lpmk/measures.hpp"

namespace lpmk {

/// Result of the inner translation infimum J_{p,mu}(M) = inf_x (1/n) sum
/// mu_i (h_M(u_i) - <x,u_i>)^p, for p < 0.
struct JFunctionalEval {
    double p = 0.0;
    Vec innerMinimizer;
    double value = 0.0;
    double gradientNorm = 0.0;
};

namespace detail {

inline double j_value(double p, const Vec& masses, const Vec& slack, int dim) {
    std::vector<double> terms(static_cast<size_t>(masses.size()));
    for (Eigen::Index i = 0; i < masses.size(); ++i)
        terms[i] = masses(i) * std::pow(slack(i), p);
    return tree_sum(terms) / dim;
}

}  // namespace detail

/// Damped Newton on the strictly convex translation functional. The feasible
/// set is where every support constraint h_M(u_i) - <x,u_i> stays positive;
/// the integrand blows up at its boundary, so the minimizer is interior.
inline JFunctionalEval eval_J(double p, const DiscreteMeasure& mu, const HPolytope& m,
                              double grad_tol = 1e-10) {
    if (p >= 0.0) throw InvalidParams("eval_J: requires p < 0");
    if (mu.dim != m.dim) throw LengthMismatch("eval_J: dimension mismatch");

    const int n = m.dim;
    const int k = mu.atom_count();

    // Support values of M at the atom directions; identical layouts skip the LPs.
    Vec offs(k);
    if (k == m.facet_count() && (mu.directions - m.normals).cwiseAbs().maxCoeff() <= 1e-12)
        offs = m.offsets;
    else
        for (int i = 0; i < k; ++i) offs(i) = support_eval(m, mu.direction(i));
    if (offs.minCoeff() < 0.0)
        throw OriginNotInterior("eval_J: origin must lie in the body");

    // Interior start: Chebyshev center of the slack region.
    HPolytope region;
    region.dim = n;
    region.normals = mu.directions;
    region.offsets = offs;
    ChebyshevBall ball;
    try {
        ball = chebyshev_center(region);
    } catch (const DegenerateBody&) {
        throw BoundaryBlowup("eval_J: slack region has empty interior");
    }
    Vec x = ball.center;

    auto slack_at = [&](const Vec& y) { return Vec(offs - mu.directions * y); };
    Vec slack = slack_at(x);
    if (slack.minCoeff() <= 0.0) throw BoundaryBlowup("eval_J: no interior starting point");
    double fx = detail::j_value(p, mu.masses, slack, n);

    Vec grad(n);
    for (int iter = 0; iter < 200; ++iter) {
        grad.setZero();
        Mat hess = Mat::Zero(n, n);
        for (int i = 0; i < k; ++i) {
            const double s = slack(i);
            const Vec u = mu.direction(i);
            grad += (-p / n) * mu.masses(i) * std::pow(s, p - 1.0) * u;
            hess += (p * (p - 1.0) / n) * mu.masses(i) * std::pow(s, p - 2.0) * u * u.transpose();
        }
        const double gnorm = grad.norm();
        if (gnorm <= grad_tol) return {p, x, fx, gnorm};

        Eigen::LDLT<Mat> ldlt(hess);
        Vec step = ldlt.solve(-grad);
        if (ldlt.info() != Eigen::Success || !step.allFinite() || grad.dot(step) >= 0.0) {
            hess += 1e-12 * hess.trace() * Mat::Identity(n, n);
            step = hess.ldlt().solve(-grad);
        }

        double t = 1.0;
        bool accepted = false;
        while (t > 1e-16) {
            const Vec xt = x + t * step;
            const Vec st = slack_at(xt);
            if (st.minCoeff() > 0.0) {
                const double ft = detail::j_value(p, mu.masses, st, n);
                if (ft < fx) {
                    x = xt;
                    slack = st;
                    fx = ft;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (gnorm <= 1e2 * grad_tol) return {p, x, fx, gnorm};
            throw BoundaryBlowup("eval_J: line search collapsed before reaching tolerance");
        }
    }
    throw BoundaryBlowup("eval_J: Newton did not reach the gradient tolerance");
}

/// J_p(M, L) = J_{p, S_{p,M}}(L).
inline JFunctionalEval eval_J_pair(double p, const HPolytope& m_body, const HPolytope& l_body) {
    return eval_J(p, lp_measure(m_body, p), l_body);
}

struct ProbeRow {
    double stretch = 1.0;
    double value = 0.0;
};

/// Volume-preserving stretch by t along d: factor t on the axis and
/// t^(-1/(n-1)) orthogonally, so the functional growth is purely shape-driven.
inline LinearMap stretch_map(const Vec& d, double t, int dim) {
    const double shrink = std::pow(t, -1.0 / (dim - 1.0));
    Mat a = shrink * (Mat::Identity(dim, dim) - d * d.transpose()) + t * d * d.transpose();
    return linear_map(a);
}

/// Sweep J_p(S_{p,P}, L_t) V(L_t)^(-p/n) over stretches of P along a
/// parallel-facet normal. The caller decides what growth to assert.
inline std::vector<ProbeRow> nonuniqueness_probe(const HPolytope& p_body, double p,
                                                 const std::vector<double>& stretch_factors) {
    if (p >= 0.0 || p <= -double(p_body.dim))
        throw InvalidParams("nonuniqueness_probe: requires -n < p < 0");
    if (p_body.offsets.minCoeff() <= 0.0)
        throw OriginNotInterior("nonuniqueness_probe: origin must be interior");

    // Stretch axis from a parallel-facet pair when one exists, else facet 0.
    Vec axis = p_body.normal(0);
    bool found = false;
    for (int i = 0; i < p_body.facet_count() && !found; ++i)
        for (int j = i + 1; j < p_body.facet_count() && !found; ++j)
            if (p_body.normals.row(i).dot(p_body.normals.row(j)) < -1.0 + 1e-9) {
                axis = p_body.normal(i);
                found = true;
            }

    const DiscreteMeasure mu = lp_measure(p_body, p);
    std::vector<ProbeRow> rows;
    rows.reserve(stretch_factors.size());
    for (double t : stretch_factors) {
        if (t <= 0.0) throw InvalidParams("nonuniqueness_probe: stretch factors must be positive");
        const HPolytope lt = transform_body(stretch_map(axis, t, p_body.dim), p_body);
        const JFunctionalEval ev = eval_J(p, mu, lt);
        rows.push_back({t, ev.value * std::pow(volume(lt), -p / p_body.dim)});
    }
    return rows;
}

/// Hoelder interpolation between exponents: with L' the inner-translated L,
///   J_p(K, L') <= J_q(K, L')^(p/q) V(K)^((q-p)/q)   for -n < q < p < 0.
/// Returns (lhs, rhs), both through eval_J.
inline std::pair<double, double> holder_interpolation_check(const HPolytope& k_body,
                                                            const HPolytope& l_body, double p,
                                                            double q) {
    const int n = k_body.dim;
    if (!(-double(n) < q && q < p && p < 0.0))
        throw InvalidParams("holder_interpolation_check: need -n < q < p < 0");
    if (k_body.offsets.minCoeff() <= 0.0 || l_body.offsets.minCoeff() <= 0.0)
        throw OriginNotInterior("holder_interpolation_check: origin must be interior");

    const JFunctionalEval eq = eval_J_pair(q, k_body, l_body);
    const HPolytope l_prime = translate(l_body, -eq.innerMinimizer);

    const double lhs = eval_J_pair(p, k_body, l_prime).value;
    const double jq = eval_J_pair(q, k_body, l_prime).value;
    const double rhs = std::pow(jq, p / q) * std::pow(volume(k_body), (q - p) / q);
    return {lhs, rhs};
}

}  // namespace lpmk
