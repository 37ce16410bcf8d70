#include <gtest/gtest.h>

#include "crgeo/geodesic.hpp"
#include "crgeo/models.hpp"
#include "helpers.hpp"

using namespace crgeo;

namespace {

struct SpaceForm {
    Structure S;
    double c;
};

std::vector<SpaceForm> space_forms() {
    return {{heisenberg(1), 0.0}, {cr_sphere(1), 1.0}, {bergman_cylinder(1), -1.0}};
}

Vec<double> random_vec(Sampler& rng, int n) {
    Vec<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

// Vector of g-norm r at p.
Vec<double> with_norm(const Structure& S, const Vec<double>& p, const Vec<double>& v, double r) {
    return (r / std::sqrt(metric(S, p, v, v))) * v;
}

Vec<double> chart_center(const Chart& c) {
    Vec<double> p(c.dim());
    for (int i = 0; i < c.dim(); ++i) p[i] = 0.5 * (c.bounds()[i].lo + c.bounds()[i].hi);
    return p;
}

}  // namespace

TEST(Geodesic, ZeroVelocityIsConstant) {
    Structure S = cr_sphere(1);
    Vec<double> p{0.2, 0.1, -0.3};
    GeodesicPath g = integrate_geodesic(S, p, Vec<double>(3), 1.0);
    EXPECT_EQ(g.steps(), kStepsPerUnit);
    for (const Vec<double>& x : g.points) EXPECT_EQ(max_abs(x - p), 0.0);
}

TEST(Geodesic, HeisenbergStraightLine) {
    Structure H = heisenberg(1);
    GeodesicPath g = integrate_geodesic(H, {0, 0, 0}, {1, 0, 0}, 1.5);
    for (std::size_t k = 0; k < g.points.size(); ++k)
        EXPECT_LE(max_abs(g.points[k] - Vec<double>{g.times[k], 0, 0}), 1e-12);
    EXPECT_LE(max_abs(exp_map(H, {0, 0, 0}, {0.7, 0, 0}) - Vec<double>{0.7, 0, 0}), 1e-12);
}

TEST(Geodesic, AffineReparametrization) {
    Sampler rng(1);
    for (auto& [S, c] : space_forms()) {
        Vec<double> p = rng.point(S.chart, 0.3);
        Vec<double> u = with_norm(S, p, random_vec(rng, 3), 0.4);
        const double lambda = 1.7;
        Vec<double> a = integrate_geodesic(S, p, lambda * u, 0.5, 400).end();
        Vec<double> b = integrate_geodesic(S, p, u, 0.5 * lambda, 400).end();
        EXPECT_LE(max_abs(a - b), 1e-8) << S.name;
    }
}

TEST(Geodesic, SpeedIsConserved) {
    Sampler rng(2);
    for (Structure S : {heisenberg(1), cr_sphere(1), bergman_cylinder(1), perturbed_heisenberg(1), cr_sphere(2)}) {
        for (int k = 0; k < 3; ++k) {
            Vec<double> p = rng.point(S.chart, 0.3);
            Vec<double> u = with_norm(S, p, random_vec(rng, S.dim()), 0.5);
            GeodesicPath g = integrate_geodesic(S, p, u, 1.0);
            ASSERT_FALSE(g.truncated);
            double s0 = metric(S, p, u, u), drift = 0.0;
            for (std::size_t i = 0; i < g.points.size(); i += 20)
                drift = std::max(drift, std::abs(metric(S, g.points[i], g.velocities[i], g.velocities[i]) - s0));
            EXPECT_LE(drift, 1e-8) << S.name;
        }
    }
}

TEST(Geodesic, OnlySymmetricChristoffelsEnter) {
    Sampler rng(3);
    Structure S = perturbed_heisenberg(1);
    Vec<double> p = rng.point(S.chart);
    Christoffel G = coordinate_christoffels(S, p);
    Vec<double> v = random_vec(rng, 3);
    for (int k = 0; k < 3; ++k) {
        double full = 0.0, sym = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                full += G(k, i, j) * v[i] * v[j];
                sym += 0.5 * (G(k, i, j) + G(k, j, i)) * v[i] * v[j];
            }
        EXPECT_NEAR(full, sym, 1e-13);
    }
}

TEST(Geodesic, BoundaryTruncates) {
    Structure H = heisenberg(1, 1.0);
    GeodesicPath g = integrate_geodesic(H, {0, 0, 0}, {1, 0, 0}, 3.0);
    EXPECT_TRUE(g.truncated);
    EXPECT_LT(g.steps(), 600);
    for (const Vec<double>& x : g.points) EXPECT_TRUE(H.chart.contains(x));
    EXPECT_THROW(exp_map(H, {0, 0, 0}, {3, 0, 0}), DomainError);
}

TEST(ExpLog, Trivial) {
    Structure S = cr_sphere(1);
    Vec<double> p{0.1, -0.2, 0.3};
    EXPECT_LE(max_abs(exp_map(S, p, Vec<double>(3)) - p), 0.0);
    EXPECT_LE(max_abs(log_map(S, p, p)), 1e-14);
}

TEST(ExpLog, RoundTrip) {
    Sampler rng(4);
    for (auto& [S, c] : space_forms()) {
        for (int k = 0; k < 5; ++k) {
            Vec<double> p = rng.point(S.chart, 0.3);
            Vec<double> u = with_norm(S, p, random_vec(rng, 3), 0.3);
            Vec<double> back = log_map(S, p, exp_map(S, p, u));
            EXPECT_LE(max_abs(back - u), 1e-7) << S.name;
        }
    }
}

TEST(ExpLog, FarPointsAreRejected) {
    Structure S = heisenberg(1, 1.0);
    EXPECT_THROW(log_map(S, {0, 0, 0}, {1.5, 0, 0}), DomainError);
    Structure Sp = cr_sphere(1);
    LogOptions one;
    one.max_iterations = 1;
    try {
        log_map(Sp, {-0.5, 0, 0}, {0.5, 0.3, 0.2}, {}, one);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("outside normal neighborhood"), std::string::npos);
    }
}

TEST(ParallelTransport, PseudoHermitianIsometries) {
    Sampler rng(5);
    for (Structure S : {cr_sphere(1), bergman_cylinder(1), perturbed_heisenberg(1), heisenberg(2)}) {
        Vec<double> p = rng.point(S.chart, 0.3);
        Vec<double> u = with_norm(S, p, random_vec(rng, S.dim()), 0.5);
        GeodesicPath g = integrate_geodesic(S, p, u, 1.0);
        TransportOperator P = parallel_transport(S, g);
        Vec<double> xi0 = reeb_field(S, p);
        Vec<double> v = random_vec(rng, S.dim()), w = random_vec(rng, S.dim());
        for (std::size_t k = 0; k < g.points.size(); k += 50) {
            const Vec<double>& q = g.points[k];
            EXPECT_LE(max_abs(P.apply(k, xi0) - reeb_field(S, q)), 1e-8) << S.name;
            EXPECT_NEAR(metric(S, q, P.apply(k, v), P.apply(k, w)), metric(S, p, v, w), 1e-8) << S.name;
            Vec<double> Jv = matvec(S.J(p), v);
            EXPECT_LE(max_abs(matvec(S.J(q), P.apply(k, v)) - P.apply(k, Jv)), 1e-8) << S.name;
            EXPECT_LE(linear_isometry_residual(S, p, S, q, P.matrices[k]).max(), 1e-8) << S.name;
        }
        std::vector<Vec<double>> tv = transport_vector(S, g, v);
        EXPECT_LE(max_abs(tv.back() - P.apply(P.matrices.size() - 1, v)), 1e-10);
    }
}

TEST(Jacobi, ZeroData) {
    Structure S = cr_sphere(1);
    GeodesicPath g = integrate_geodesic(S, {0.1, 0.1, 0.1}, {0.2, -0.1, 0.3}, 1.0);
    JacobiField J = jacobi_field(S, g, Vec<double>(3), Vec<double>(3));
    for (const Vec<double>& V : J.V) EXPECT_EQ(max_abs(V), 0.0);
}

TEST(Jacobi, DualityWithExponentialDifferential) {
    Sampler rng(6);
    for (auto& [S, c] : space_forms()) {
        for (int k = 0; k < 3; ++k) {
            Vec<double> p = rng.point(S.chart, 0.3);
            Vec<double> u = with_norm(S, p, random_vec(rng, 3), 0.5);
            Vec<double> w = random_vec(rng, 3);
            GeodesicPath g = integrate_geodesic(S, p, u, 1.0);
            JacobiField J = jacobi_field(S, g, Vec<double>(3), w);
            Vec<double> oracle = matvec(exp_jacobian(S, p, u), w);
            EXPECT_LE(max_abs(J.V.back() - oracle), 1e-5 * (1.0 + max_abs(oracle))) << S.name;
        }
    }
}

TEST(Jacobi, HeisenbergPicksUpTorsion) {
    // Geodesics are coordinate lines, so V(t) = t d_y; its Reeb coefficient theta(V) = 2t^2 comes only from the
    // torsion term of the Jacobi equation.
    Structure H = heisenberg(1);
    GeodesicPath g = integrate_geodesic(H, {0, 0, 0}, {1, 0, 0}, 1.0);
    JacobiField J = jacobi_field(H, g, Vec<double>(3), {0, 1, 0});
    EXPECT_LE(max_abs(J.V.back() - Vec<double>{0, 1, 0}), 1e-10);
    EXPECT_NEAR(J.y.back()[0], 2.0, 1e-10);
    EXPECT_NEAR(J.y[100][0], 0.5, 1e-10);
}

TEST(Jacobi, VariationOfGeodesicFamily) {
    // beta(t, s) = exp_{sigma(s)}(t W(s)), sigma(s) = exp_p(s V0), W(s) = transport of u + s w along sigma.
    // Then V = d beta / ds is Jacobi with V(0) = V0 and nabla_T V(0) = w + Tor(u, V0).
    Sampler rng(7);
    for (auto& [S, c] : space_forms()) {
        Vec<double> p = rng.point(S.chart, 0.3);
        Vec<double> u = with_norm(S, p, random_vec(rng, 3), 0.4);
        Vec<double> V0 = with_norm(S, p, random_vec(rng, 3), 0.2), w = random_vec(rng, 3);
        const double h = 1e-4;
        auto beta = [&](double s) {
            GeodesicPath sig = integrate_geodesic(S, p, s >= 0 ? V0 : -V0, std::abs(s), 20);
            Vec<double> Ws = matvec(parallel_transport(S, sig).final(), u + s * w);
            return integrate_geodesic(S, sig.end(), Ws, 1.0).end();
        };
        Vec<double> fd = (1.0 / (2.0 * h)) * (beta(h) - beta(-h));
        GeodesicPath g = integrate_geodesic(S, p, u, 1.0);
        JacobiField J = jacobi_field(S, g, V0, w + torsion(S, p, u, V0));
        EXPECT_LE(max_abs(J.V.front() - V0), 1e-12) << S.name;
        EXPECT_LE(max_abs(J.V.back() - fd), 1e-5) << S.name;
    }
}

TEST(PhiT, IdentityAtZeroAndIsometryAlong) {
    Structure S = cr_sphere(1);
    IsometryCandidate c{S, S, {0.1, 0.0, 0.2}, {-0.2, 0.1, 0.0}, {}, 0.3};
    c.rho = frame_map(S, c.p, S, c.pt, frame_rotation(1, 0.7));
    Vec<double> u = with_norm(S, c.p, {0.3, -0.5, 0.2}, 0.3);
    EXPECT_LE(crgeo::test::max_abs_diff(phi_t(c, u, 0.0), c.rho), 1e-12);
    for (double t : {0.25, 0.5, 1.0}) {
        Mat<double> A = phi_t(c, u, t);
        Vec<double> q = integrate_geodesic(S, c.p, u, t).end();
        Vec<double> qt = integrate_geodesic(S, c.pt, matvec(c.rho, u), t).end();
        EXPECT_LE(linear_isometry_residual(S, q, S, qt, A).max(), 1e-7);
        EXPECT_LE(max_abs(matvec(A, reeb_field(S, q)) - reeb_field(S, qt)), 1e-7);
    }
}

TEST(Cartan, BasePointMapsToBasePoint) {
    Structure S = cr_sphere(1);
    IsometryCandidate c{S, S, {0.1, 0.0, 0.2}, {-0.2, 0.1, 0.0}, {}, 0.3};
    c.rho = frame_map(S, c.p, S, c.pt);
    EXPECT_LE(max_abs(cartan_map(c, c.p) - c.pt), 1e-12);
}

TEST(Cartan, HeisenbergLeftTranslation) {
    // Left translation by (1, 0, 0): (x, y, t) -> (x + 1, y, t - 2y).
    Structure H = heisenberg(1);
    IsometryCandidate c{H, H, {0, 0, 0}, {1, 0, 0}, {}, 0.3};
    c.rho = frame_map(H, c.p, H, c.pt);
    Sampler rng(8);
    for (int k = 0; k < 5; ++k) {
        Vec<double> q = exp_map(H, c.p, with_norm(H, c.p, random_vec(rng, 3), 0.3));
        Vec<double> want{q[0] + 1.0, q[1], q[2] - 2.0 * q[1]};
        EXPECT_LE(max_abs(cartan_map(c, q) - want), 1e-7);
    }
}

TEST(Cartan, MatchedSpaceFormsGiveIsometries) {
    for (auto& [S, cc] : space_forms()) {
        Vec<double> p = chart_center(S.chart);
        Vec<double> pt = p;
        pt[0] += 0.05 * (S.chart.bounds()[0].hi - S.chart.bounds()[0].lo);
        IsometryCandidate c{S, S, p, pt, frame_map(S, p, S, pt, frame_rotation(1, 0.4)), 0.3};
        IsometryReport r = isometry_report(c, 4, 9);
        EXPECT_LE(r.metric_residual, 1e-5) << S.name;
        EXPECT_LE(r.J_residual, 1e-5) << S.name;
        EXPECT_LE(r.theta_residual, 1e-5) << S.name;
        EXPECT_LE(r.df_p_vs_rho, 1e-6) << S.name;
        EXPECT_LE(r.torsion_transfer, 1e-5) << S.name;
        EXPECT_TRUE(r.hypotheses_hold) << S.name;
    }
}

TEST(Cartan, MismatchedCurvatureIsDetected) {
    Structure H = heisenberg(1), Sp = cr_sphere(1);
    Vec<double> p{0, 0, 0}, pt{0, 0, 0};
    IsometryCandidate c{H, Sp, p, pt, frame_map(H, p, Sp, pt), 0.3};
    IsometryReport r = isometry_report(c, 2, 10);
    EXPECT_FALSE(r.hypotheses_hold);
    EXPECT_GT(r.curvature_hypothesis, 1e-2);
    EXPECT_GT(r.max_isometry_residual(), 1e-4);
}

TEST(Cartan, OverlappingPatchesAgree) {
    // f2 is built at a second base point with rho2 = phi_1 along the geodesic from p1; on the overlap f1 = f2.
    Structure S = cr_sphere(1);
    Vec<double> p1{0, 0, 0}, pt1{0.1, 0, 0};
    IsometryCandidate c1{S, S, p1, pt1, frame_map(S, p1, S, pt1, frame_rotation(1, 0.4)), 0.3};
    Vec<double> u = with_norm(S, p1, {1, 0.5, 0.2}, 0.15);
    Vec<double> p2 = exp_map(S, p1, u);
    IsometryCandidate c2{S, S, p2, cartan_map(c1, p2), phi_t(c1, u, 1.0), 0.3};
    Sampler rng(11);
    for (int k = 0; k < 5; ++k) {
        Vec<double> v = with_norm(S, p1, random_vec(rng, 3), 0.1);
        Vec<double> q = exp_map(S, p2, with_norm(S, p2, v, 0.1));
        EXPECT_LE(max_abs(cartan_map(c1, q) - cartan_map(c2, q)), 1e-5);
    }
}
