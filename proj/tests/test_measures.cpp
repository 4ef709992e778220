#include <catch2/catch_amalgamated.hpp>

#include "lpmk/measures.hpp"
#include "lpmk/random.hpp"

using namespace lpmk;
using Catch::Approx;

namespace {

// Atom-by-atom comparison tolerant of ordering differences.
void require_same_atoms(const DiscreteMeasure& a, const DiscreteMeasure& b, double dir_tol,
                        double mass_tol) {
    REQUIRE(a.atom_count() == b.atom_count());
    for (int i = 0; i < a.atom_count(); ++i) {
        int match = -1;
        for (int j = 0; j < b.atom_count(); ++j)
            if ((a.direction(i) - b.direction(j)).norm() < dir_tol) {
                match = j;
                break;
            }
        REQUIRE(match >= 0);
        REQUIRE(std::abs(a.masses(i) - b.masses(match)) < mass_tol);
    }
}

LinearMap random_map(Rng& rng, int dim) {
    Mat a(dim, dim);
    do {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) a(i, j) = rng.normal() * 0.5 + (i == j ? 1.0 : 0.0);
    } while (std::abs(a.determinant()) < 0.2);
    return linear_map(a);
}

}  // namespace

TEST_CASE("surface area measure of boxes") {
    const DiscreteMeasure mu = surface_area_measure(unit_cube(3));
    REQUIRE(mu.atom_count() == 6);
    for (int i = 0; i < 6; ++i) REQUIRE(mu.masses(i) == Approx(4.0).margin(1e-12));
    REQUIRE(mu.total_mass() == Approx(24.0).margin(1e-12));
    REQUIRE(mu.barycenter().norm() < 1e-12);

    const DiscreteMeasure ms = surface_area_measure(unit_cube(2));
    REQUIRE(ms.atom_count() == 4);
    for (int i = 0; i < 4; ++i) REQUIRE(ms.masses(i) == Approx(2.0).margin(1e-12));
}

TEST_CASE("surface measure total equals the facet-area sum") {
    Rng rng(301);
    for (int trial = 0; trial < 10; ++trial) {
        const HPolytope p = random_polytope(3, 15, rng);
        const VertexComplex vc = enumerate_vertices(p);
        const DiscreteMeasure mu = surface_area_measure(p, vc);
        REQUIRE(std::abs(mu.total_mass() - vc.surface_area()) < 1e-10);
        REQUIRE(mu.barycenter().norm() < 1e-9);
    }
}

TEST_CASE("lp measure on cubes") {
    for (double p : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
        const DiscreteMeasure mu = lp_measure(unit_cube(3), p);
        for (int i = 0; i < 6; ++i) REQUIRE(mu.masses(i) == Approx(4.0).margin(1e-12));
    }
    // Cube scaled by 2 at p = 0: atom mass 2 * 16, total 192 = n V = 3 * 64.
    const DiscreteMeasure m2 = lp_measure(box_polytope(Vec::Constant(3, 2.0)), 0.0);
    for (int i = 0; i < 6; ++i) REQUIRE(m2.masses(i) == Approx(32.0).margin(1e-12));
    REQUIRE(m2.total_mass() == Approx(3.0 * 64.0).margin(1e-10));
}

TEST_CASE("p = 1 reduces to the surface area measure") {
    Rng rng(302);
    const HPolytope p = random_polytope(2, 11, rng);
    require_same_atoms(lp_measure(p, 1.0), surface_area_measure(p), 1e-12, 1e-12);
}

TEST_CASE("zero offsets: mass zero below p = 1, rejected above") {
    HPolytope sq = unit_cube(2);
    sq.offsets(0) = 0.0;  // origin moves to the boundary
    const DiscreteMeasure mu = lp_measure(sq, 0.5);
    REQUIRE(mu.masses(0) == 0.0);
    REQUIRE(mu.masses.tail(3).minCoeff() > 0.0);
    REQUIRE_THROWS_AS(lp_measure(sq, 2.0), IntegrabilityViolation);
    REQUIRE_NOTHROW(lp_measure(sq, 1.0));

    HPolytope bad = unit_cube(2);
    bad.offsets(0) = -0.2;  // origin strictly outside
    REQUIRE_THROWS_AS(lp_measure(bad, 0.5), OriginOutside);
}

TEST_CASE("cone volume measure") {
    const DiscreteMeasure mu = cone_volume_measure(unit_cube(3));
    for (int i = 0; i < 6; ++i) REQUIRE(mu.masses(i) == Approx(8.0 / 6.0).margin(1e-12));
    REQUIRE(mu.total_mass() == Approx(8.0).margin(1e-10));

    // Right triangle with the origin at a vertex: the two legs through o
    // carry zero mass, the hypotenuse carries the whole volume.
    HPolytope tri;
    tri.dim = 2;
    tri.normals.resize(3, 2);
    const double s = 1.0 / std::sqrt(2.0);
    tri.normals << -1, 0, 0, -1, s, s;
    tri.offsets.resize(3);
    tri.offsets << 0, 0, s;
    const DiscreteMeasure mt = cone_volume_measure(tri);
    REQUIRE(mt.masses(0) == 0.0);
    REQUIRE(mt.masses(1) == 0.0);
    REQUIRE(mt.total_mass() == Approx(0.5).margin(1e-12));

    Rng rng(303);
    for (int trial = 0; trial < 10; ++trial) {
        const HPolytope p = random_polytope(trial % 2 ? 2 : 3, 12, rng);
        REQUIRE(std::abs(cone_volume_measure(p).total_mass() - volume(p)) < 1e-10);
    }
}

TEST_CASE("pushforward basics") {
    Rng rng(304);
    const HPolytope p = random_polytope(3, 12, rng);
    const DiscreteMeasure mu = surface_area_measure(p);

    const LinearMap iden = linear_map(Mat::Identity(3, 3));
    require_same_atoms(pushforward(iden, mu), mu, 1e-14, 1e-14);

    for (int trial = 0; trial < 5; ++trial) {
        const LinearMap t = random_map(rng, 3);
        REQUIRE(pushforward(t, mu).total_mass() == Approx(mu.total_mass()).margin(1e-10));
    }
}

TEST_CASE("cone-volume transformation law") {
    // S_{0, Phi P} = |det Phi| (Phi^{-t})_* S_{0, P}
    Rng rng(305);
    for (int trial = 0; trial < 8; ++trial) {
        const int dim = trial % 2 ? 2 : 3;
        const HPolytope p = random_polytope(dim, 12, rng);
        const LinearMap phi = random_map(rng, dim);

        const DiscreteMeasure lhs = lp_measure(transform_body(phi, p), 0.0);
        const LinearMap phi_inv_t = linear_map(Mat(phi.matrix.inverse().transpose()));
        DiscreteMeasure rhs = pushforward(phi_inv_t, lp_measure(p, 0.0));
        rhs.masses *= phi.detAbs;
        require_same_atoms(lhs, rhs, 1e-9, 1e-9);
    }
}

TEST_CASE("lp measure is rotation covariant") {
    Rng rng(306);
    for (double p : {0.0, 0.5, 1.0}) {
        const HPolytope body = random_polytope(3, 13, rng);
        const Mat r = rng.rotation(3);
        const LinearMap rot = linear_map(r);
        const DiscreteMeasure base = lp_measure(body, p);
        const DiscreteMeasure rotated = lp_measure(transform_body(rot, body), p);
        REQUIRE(base.atom_count() == rotated.atom_count());
        for (int i = 0; i < base.atom_count(); ++i) {
            REQUIRE((Vec(r * base.direction(i)) - rotated.direction(i)).norm() < 1e-12);
            REQUIRE(std::abs(base.masses(i) - rotated.masses(i)) < 1e-12);
        }
    }
}

TEST_CASE("ellipsoid curvature function") {
    const LinearMap iden = linear_map(Mat::Identity(3, 3));
    Rng rng(307);
    for (int k = 0; k < 5; ++k)
        REQUIRE(curvature_function_ellipsoid(iden, rng.unit_vector(3)) ==
                Approx(1.0).margin(1e-14));

    // Ball of radius 2: f = r^(n-1) = 4 everywhere.
    const LinearMap two = linear_map(Mat(2.0 * Mat::Identity(3, 3)));
    for (int k = 0; k < 5; ++k)
        REQUIRE(curvature_function_ellipsoid(two, rng.unit_vector(3)) ==
                Approx(4.0).margin(1e-12));

    // -(n+1)-homogeneity of the extension.
    const LinearMap t = random_map(rng, 3);
    const Vec x = rng.unit_vector(3);
    const double lam = 1.734;
    REQUIRE(curvature_function_ellipsoid(t, Vec(lam * x)) ==
            Approx(std::pow(lam, -4.0) * curvature_function_ellipsoid(t, x)).epsilon(1e-12));
}

TEST_CASE("equivariance of -n-homogeneous integrands") {
    const SphereGrid g = build_grid(2, 5);

    const LinearMap iden = linear_map(Mat::Identity(2, 2));
    auto psi_ball = [](const Vec& x) { return 1.0 / x.squaredNorm(); };
    const auto [li, ri] = check_equivariance(iden, psi_ball, g);
    REQUIRE(li == Approx(ri).margin(1e-14));

    // T = diag(2,1): the closed-form integral of |T x|^{-2} over S^1 is pi.
    Mat d(2, 2);
    d << 2, 0, 0, 1;
    const auto [lhs, rhs] = check_equivariance(linear_map(d), psi_ball, g);
    REQUIRE(lhs == Approx(pi).margin(1e-9));
    REQUIRE(rhs == Approx(pi).margin(1e-9));

    // Random maps against random ellipsoid radial powers.
    Rng rng(308);
    for (int trial = 0; trial < 6; ++trial) {
        const LinearMap t = random_map(rng, 2);
        const LinearMap e = random_map(rng, 2);
        const Mat einv = e.matrix.inverse();
        auto psi = [&](const Vec& x) { return std::pow((einv * x).norm(), -2.0); };
        const auto [l, r] = check_equivariance(t, psi, g);
        REQUIRE(std::abs(l - r) / std::abs(r) <= 1e-6);
    }
}

TEST_CASE("discrete change of variables for the lp measure") {
    Rng rng(309);
    auto phi_smooth = [](const Vec& u) { return 1.0 + 0.5 * u(0) + 0.25 * u(u.size() - 1) * u(0); };

    // Identity map: both sides are the same sum.
    const HPolytope p0 = random_polytope(3, 12, rng);
    const auto [l0, r0] =
        change_of_variables_lp(linear_map(Mat::Identity(3, 3)), p0, 0.5, phi_smooth);
    REQUIRE(l0 == Approx(r0).margin(1e-12));

    // Rotations preserve the identity exactly.
    const LinearMap rot = linear_map(rng.rotation(3));
    const auto [l1, r1] = change_of_variables_lp(rot, p0, 0.0, phi_smooth);
    REQUIRE(l1 == Approx(r1).margin(1e-9));

    // Diagonal map on the cube with phi = 1 at p = 1/2.
    Mat d = Mat::Zero(3, 3);
    d.diagonal() << 1.7, 0.6, 1.1;
    const auto [l2, r2] =
        change_of_variables_lp(linear_map(d), unit_cube(3), 0.5, [](const Vec&) { return 1.0; });
    REQUIRE(l2 == Approx(r2).margin(1e-9));

    // Random bodies, maps and exponents.
    for (int trial = 0; trial < 8; ++trial) {
        const int dim = trial % 2 ? 2 : 3;
        const HPolytope p = random_polytope(dim, 12, rng);
        const LinearMap t = random_map(rng, dim);
        for (double pe : {0.0, 0.5, 1.0}) {
            const auto [l, r] = change_of_variables_lp(t, p, pe, phi_smooth);
            REQUIRE(l == Approx(r).margin(1e-9 * (1.0 + std::abs(l))));
        }
    }
}

TEST_CASE("restricted-set change of variables via cap indicators") {
    Rng rng(310);
    const HPolytope p = random_polytope(3, 14, rng);
    const Vec axis = rng.unit_vector(3);
    auto indicator = [&](const Vec& u) { return axis.dot(u) >= 0.3 ? 1.0 : 0.0; };
    const LinearMap t = random_map(rng, 3);
    // The image-side indicator set is exactly {T^{-t} u / |.| : u in cap}, so
    // the identity carries over atom by atom.
    const auto [l, r] = change_of_variables_lp(t, p, 0.5, indicator);
    REQUIRE(l == Approx(r).margin(1e-9 * (1.0 + std::abs(l))));
}

TEST_CASE("quadrature change of variables with the dual kernel") {
    // integral of phi(T^t x/|T^t x|) |T^t x|^p equals
    // |det T|^{-1} integral of phi(x) |T^{-t} x|^{-n-p}.
    const SphereGrid g = build_grid(2, 5);
    Rng rng(311);
    auto phi = [](const Vec& u) { return 1.0 + 0.3 * u(0) * u(0) + 0.1 * u(1); };
    for (double p : {-0.5, 0.0, 0.7}) {
        const LinearMap t = random_map(rng, 2);
        const Mat tt = t.matrix.transpose();
        const Mat tinv_t = t.matrix.inverse().transpose();
        const double lhs = integrate(g, [&](const Vec& x) {
            const Vec y = tt * x;
            return phi(Vec(y / y.norm())) * std::pow(y.norm(), p);
        });
        const double rhs = integrate(g, [&](const Vec& x) {
                               return phi(x) * std::pow((tinv_t * x).norm(), -2.0 - p);
                           }) /
                           t.detAbs;
        REQUIRE(std::abs(lhs - rhs) <= 1e-6 * std::abs(rhs));
    }
}

TEST_CASE("volume lower bound from the Hoelder chain") {
    Rng rng(312);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = trial % 2 ? 2 : 3;
        const double p = (trial % 3 == 0) ? 0.2 : (trial % 3 == 1 ? 0.5 : 0.8);
        const HPolytope body = random_polytope(dim, 12, rng);
        const VertexComplex vc = enumerate_vertices(body);
        const double total = lp_measure(body, p, vc).total_mass();
        const double out_radius = vc.vertices.rowwise().norm().maxCoeff();
        const double sphere = sphere_surface_area(dim);

        // theta valid for both constraints: h <= theta and total >= theta^{-1} |S|.
        const double theta = std::max({out_radius, sphere / total, 1.0}) * (1.0 + 1e-9);
        const double bound = std::pow(sphere / theta, 1.0 / (1.0 - p)) *
                             std::pow(theta, -p * (dim - 1.0) / (1.0 - p)) *
                             std::pow(sphere, -p / (1.0 - p)) / dim;
        REQUIRE(volume(body) >= bound - 1e-12);
    }
}

TEST_CASE("measure validation") {
    DiscreteMeasure mu;
    mu.dim = 2;
    mu.directions.resize(2, 2);
    mu.directions << 1, 0, 1, 0;
    mu.masses = Vec::Ones(2);
    REQUIRE_THROWS_AS(validate_measure(mu), InvalidParams);  // coincident atoms
    mu.directions << 1, 0, 0, 1;
    mu.masses(1) = -0.1;
    REQUIRE_THROWS_AS(validate_measure(mu), InvalidParams);  // negative mass
    mu.masses(1) = 0.1;
    REQUIRE_NOTHROW(validate_measure(mu));

    LinearMap t = linear_map(Mat::Identity(2, 2));
    t.detAbs = 2.0;
    REQUIRE_THROWS_AS(validate_linear_map(t), InvalidParams);  // stale cache
    Mat sing = Mat::Zero(2, 2);
    REQUIRE_THROWS_AS(linear_map(sing), InvalidParams);
}
