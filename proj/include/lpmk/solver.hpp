#pragma once

#include <optional>
#include <set>

#include "lpmk/functional.hpp"
#include "lpmk/laplace.hpp"

namespace lpmk {

/// Discrete L_p Minkowski problem S_{p,P} = mu, solved over the offsets with
/// the target's directions as the fixed normal set.
struct MinkowskiProblem {
    double p = 1.0;
    DiscreteMeasure target;
    bool normalsFixed = true;
};

inline void validate_problem(const MinkowskiProblem& prob) {
    validate_measure(prob.target);
    if (!prob.normalsFixed)
        throw InvalidParams("solve_minkowski: only fixed-normal solving is implemented");
    if (prob.target.dim > 3) throw UnsupportedDimension("solve_minkowski: dim must be 2 or 3");
    if (prob.target.masses.minCoeff() <= 1e-12)
        throw InvalidParams("solve_minkowski: target atoms below 1e-12 are numerically zero");
    if (!positively_spans(prob.target.directions, prob.target.dim))
        throw HemisphereViolation("solve_minkowski: target directions lie in a closed hemisphere");
    if (prob.p > 1.0 || prob.p <= -double(prob.target.dim))
        throw InvalidParams("solve_minkowski: p must lie in (-n, 1]");
}

struct SolveConfig {
    double tol = 1e-4;          // terminal max relative atom-mass error
    int max_iter = 4000;
    double h_min = 1e-8;        // collapse clamp before flagging
    double diameter_cap = 1e6;  // at unit volume
    int stall_window = 400;     // iterations without residual progress
};

enum class DegeneracyFlag { origin_to_boundary, facet_vanished, diverging_diameter };

struct SolveReport {
    int iterations = 0;
    std::vector<double> residualHistory;      // best-so-far, nonincreasing
    std::vector<double> objectiveHistory;     // scale-invariant merit
    std::vector<double> minOffsetHistory;
    std::vector<double> volumeDefectHistory;  // |V - 1| after each projection
    HPolytope terminalBody;
    std::set<DegeneracyFlag> degeneracyFlags;
    bool converged = false;
    double terminalResidual = std::numeric_limits<double>::infinity();

    bool has_flag(DegeneracyFlag f) const { return degeneracyFlags.count(f) > 0; }
};

/// Scale-invariant merit of one solver regime at a given offsets vector,
/// together with its analytic gradient. Every regime is phrased as a
/// maximization:
///   p = 1        -(sum mu_i h_i) V^(-1/n)
///   p = 0        sum mu_i log h_i - (|mu|/n) log V
///   p in (0,1)   (1/p)(sum mu_i h_i^p) V^(-p/n)
///   p in (-n,0)  J_{p,mu}(P) V^(-p/n) with the envelope gradient at the
///                inner minimizer
/// Stationary points have S_{p,P} proportional to mu.
struct ObjectiveEval {
    double value = 0.0;
    Vec gradient;
    double volume = 0.0;
    Vec facet_areas;
};

inline ObjectiveEval minkowski_objective(double p, const DiscreteMeasure& target,
                                         const Vec& offsets) {
    const int dim = target.dim;
    const int k = target.atom_count();
    const Vec& mu = target.masses;

    HPolytope body;
    body.dim = dim;
    body.normals = target.directions;
    body.offsets = offsets;
    const VertexComplex vc = enumerate_vertices(body);
    const Vec centroid = vc.vertices.colwise().mean().transpose();
    const double vol = volume(body, vc, centroid);
    const Vec areas = vc.areas_by_normal(k);

    ObjectiveEval out;
    out.volume = vol;
    out.facet_areas = areas;
    out.gradient.resize(k);
    std::vector<double> terms(static_cast<size_t>(k));

    if (p == 1.0) {
        for (int i = 0; i < k; ++i) terms[i] = mu(i) * offsets(i);
        const double s = tree_sum(terms);
        const double vfac = std::pow(vol, -1.0 / dim);
        out.value = -s * vfac;
        for (int i = 0; i < k; ++i)
            out.gradient(i) = -vfac * (mu(i) - s / (dim * vol) * areas(i));
    } else if (p == 0.0) {
        for (int i = 0; i < k; ++i) terms[i] = mu(i) * std::log(offsets(i));
        const double mu_total = target.total_mass();
        out.value = tree_sum(terms) - mu_total / dim * std::log(vol);
        for (int i = 0; i < k; ++i)
            out.gradient(i) = mu(i) / offsets(i) - mu_total / (dim * vol) * areas(i);
    } else if (p > 0.0 && p < 1.0) {
        for (int i = 0; i < k; ++i) terms[i] = mu(i) * std::pow(offsets(i), p);
        const double s = tree_sum(terms);
        const double vfac = std::pow(vol, -p / dim);
        out.value = s / p * vfac;
        for (int i = 0; i < k; ++i)
            out.gradient(i) =
                vfac * (mu(i) * std::pow(offsets(i), p - 1.0) - s / (dim * vol) * areas(i));
    } else if (p < 0.0 && p > -double(dim)) {
        const JFunctionalEval ev = eval_J(p, target, body);
        const Vec slack = offsets - target.directions * ev.innerMinimizer;
        const double vfac = std::pow(vol, -p / dim);
        out.value = ev.value * vfac;
        for (int i = 0; i < k; ++i)
            out.gradient(i) = (p / dim) * vfac *
                              (mu(i) * std::pow(slack(i), p - 1.0) - ev.value / vol * areas(i));
    } else {
        throw InvalidParams("minkowski_objective: p must lie in (-n, 1]");
    }
    return out;
}

namespace detail {

// Masses of S_{p,.} on the fixed normal set; inactive facets contribute zero.
inline Vec lp_masses(const Vec& h, const Vec& areas, double p) {
    Vec m(h.size());
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        if (areas(i) <= 0.0 || (p != 1.0 && h(i) <= 0.0))
            m(i) = 0.0;
        else
            m(i) = (p == 1.0) ? areas(i) : std::pow(h(i), 1.0 - p) * areas(i);
    }
    return m;
}

inline double max_relative_error(const Vec& measured, const Vec& target) {
    const double c = target.sum() / std::max(measured.sum(), 1e-300);
    double r = 0.0;
    for (Eigen::Index i = 0; i < target.size(); ++i)
        r = std::max(r, std::abs(c * measured(i) - target(i)) / target(i));
    return r;
}

inline double volume_at(const DiscreteMeasure& target, const Vec& offsets) {
    HPolytope body;
    body.dim = target.dim;
    body.normals = target.directions;
    body.offsets = offsets;
    const VertexComplex vc = enumerate_vertices(body);
    const Vec centroid = vc.vertices.colwise().mean().transpose();
    return volume(body, vc, centroid);
}

}  // namespace detail

/// Projected gradient over the offsets: Barzilai-Borwein seeded steps,
/// backtracking on the scale-invariant merit, and exact volume
/// renormalization after every step (offsets are 1-homogeneous). Negative-p
/// iterates are recentered at their inner translation minimizer so the slack
/// vector and the offsets coincide. The terminal body is rescaled so the
/// measure totals match before the residual is read off.
inline SolveReport solve_minkowski(const MinkowskiProblem& prob, const HPolytope& init,
                                   const SolveConfig& config = {}) {
    validate_problem(prob);
    const double p = prob.p;
    const int dim = prob.target.dim;
    const int k = prob.target.atom_count();
    const Vec& mu = prob.target.masses;
    const double mu_total = prob.target.total_mass();

    if (init.dim != dim) throw LengthMismatch("solve_minkowski: init dimension mismatch");

    // Starting offsets: the init body's support sampled at the target
    // directions (works for any init with the origin interior).
    Vec h(k);
    if (init.facet_count() == k &&
        (init.normals - prob.target.directions).cwiseAbs().maxCoeff() <= 1e-12)
        h = init.offsets;
    else
        for (int i = 0; i < k; ++i) h(i) = support_eval(init, prob.target.direction(i));
    if (h.minCoeff() <= 0.0)
        throw OriginNotInterior("solve_minkowski: init must contain the origin in its interior");

    auto project = [&](const Vec& hh) -> Vec {
        return hh / std::pow(detail::volume_at(prob.target, hh), 1.0 / dim);
    };
    h = project(h);

    SolveReport rep;
    double best_resid = std::numeric_limits<double>::infinity();
    Vec best_h = h;
    int stall = 0;
    double step = 1e-2;
    std::optional<Vec> prev_h, prev_g;
    bool boundary_pressure = false;

    ObjectiveEval cur = minkowski_objective(p, prob.target, h);

    int iter = 0;
    for (; iter < config.max_iter; ++iter) {
        // Recenter the negative-p iterate at its inner minimizer.
        if (p < 0.0) {
            HPolytope body;
            body.dim = dim;
            body.normals = prob.target.directions;
            body.offsets = h;
            const JFunctionalEval ev = eval_J(p, prob.target, body);
            if (ev.innerMinimizer.norm() > 1e-14) {
                const Vec hc = h - prob.target.directions * ev.innerMinimizer;
                if (hc.minCoeff() > 0.0) {
                    h = project(hc);
                    cur = minkowski_objective(p, prob.target, h);
                }
            }
        }

        const Vec masses = detail::lp_masses(h, cur.facet_areas, p);
        const double resid = detail::max_relative_error(masses, mu);
        if (resid < best_resid - 1e-16) {
            best_resid = resid;
            best_h = h;
            stall = 0;
        } else {
            ++stall;
        }
        rep.residualHistory.push_back(best_resid);
        rep.objectiveHistory.push_back(cur.value);
        rep.minOffsetHistory.push_back(h.minCoeff());
        rep.volumeDefectHistory.push_back(std::abs(cur.volume - 1.0));

        if (best_resid <= config.tol) break;
        if (h.maxCoeff() > config.diameter_cap) {
            rep.degeneracyFlags.insert(DegeneracyFlag::diverging_diameter);
            break;
        }
        if (stall > config.stall_window) break;

        const Vec g = cur.gradient;

        // Barzilai-Borwein seed, then backtracking on the merit.
        if (prev_h && prev_g) {
            const Vec dh = h - *prev_h;
            const Vec dg = g - *prev_g;
            const double denom = std::abs(dh.dot(dg));
            if (denom > 1e-300) step = std::clamp(dh.squaredNorm() / denom, 1e-10, 1e3);
        }
        prev_h = h;
        prev_g = g;

        bool accepted = false;
        double t = step;
        for (int ls = 0; ls < 40 && !accepted; ++ls, t *= 0.5) {
            const Vec hc = h + t * g;
            if (hc.minCoeff() <= 0.0) continue;
            try {
                const Vec hn = project(hc);
                const ObjectiveEval cand = minkowski_objective(p, prob.target, hn);
                if (cand.value > cur.value + 1e-15 * std::abs(cur.value)) {
                    h = hn;
                    cur = cand;
                    accepted = true;
                }
            } catch (const std::runtime_error&) {
                continue;
            }
        }
        if (!accepted) {
            // Persistent pressure toward a vanishing offset is the genuine
            // origin-to-boundary phenomenon; clamp once, record, and stop.
            int pressing = -1;
            for (int i = 0; i < k; ++i)
                if (h(i) <= 10.0 * config.h_min && g(i) < 0.0) pressing = i;
            if (pressing >= 0 || boundary_pressure) {
                h = project(Vec(h.cwiseMax(config.h_min)));
                rep.degeneracyFlags.insert(DegeneracyFlag::origin_to_boundary);
                ++iter;
                break;
            }
            boundary_pressure = h.minCoeff() <= 1e-4;
            if (!boundary_pressure) break;  // stalled with no boundary pressure
        } else if (h.minCoeff() <= config.h_min) {
            rep.degeneracyFlags.insert(DegeneracyFlag::origin_to_boundary);
            ++iter;
            break;
        }
    }

    rep.iterations = iter;
    rep.converged = best_resid <= config.tol;
    rep.terminalResidual = best_resid;

    // Rescale the best iterate so totals match: S_{p,sP} = s^(n-p) S_{p,P}.
    HPolytope term;
    term.dim = dim;
    term.normals = prob.target.directions;
    term.offsets = best_h;
    const VertexComplex best_vc = enumerate_vertices(term);
    const Vec masses = detail::lp_masses(best_h, best_vc.areas_by_normal(k), p);
    const double c = mu_total / std::max(masses.sum(), 1e-300);
    term.offsets = best_h * std::pow(c, 1.0 / (dim - p));
    rep.terminalBody = term;

    if (!enumerate_vertices(term).inactive_normals.empty())
        rep.degeneracyFlags.insert(DegeneracyFlag::facet_vanished);
    return rep;
}

/// Pointwise L_p Monge-Ampere residual h^(1-p) (h'' + h) - g on the circle;
/// the second derivative is spectral, so band-limited fields are exact.
inline Vec monge_ampere_residual(const SupportField& h, const DensityField& g, double p) {
    if (h.grid.dim != 2) throw UnsupportedDimension("monge_ampere_residual: only n = 2");
    if (g.grid.dim != 2 || g.values.size() != h.values.size())
        throw LengthMismatch("monge_ampere_residual: field sizes disagree");
    if (p != 1.0 && h.values.minCoeff() <= 0.0)
        throw NegativeSupport("monge_ampere_residual: h must be positive unless p = 1");

    const LaplaceBeltrami lb = laplacian_matrix(h.grid);
    const Vec hpp = lb.apply(h.values);
    Vec r(h.values.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double weight = (p == 1.0) ? 1.0 : std::pow(h.values(i), 1.0 - p);
        r(i) = weight * (hpp(i) + h.values(i)) - g.values(i);
    }
    return r;
}

/// Fréchet derivative of the L_p Monge-Ampere operator at the constant-one
/// solution: Delta + (n - p) Id.
struct LinearizedOperator {
    LaplaceBeltrami laplacian;
    double shift = 0.0;

    Vec apply(const Vec& f) const { return laplacian.apply(f) + shift * f; }
    Vec eigenvalues() const { return laplacian.eigenvalues().array() + shift; }
};

inline LinearizedOperator linearized_operator(int n, double p, const SphereGrid& grid) {
    if (n != 2 && n != 3) throw UnsupportedDimension("linearized_operator: n must be 2 or 3");
    if (grid.dim != n) throw LengthMismatch("linearized_operator: grid dimension mismatch");
    return {laplacian_matrix(grid), double(n) - p};
}

}  // namespace lpmk
