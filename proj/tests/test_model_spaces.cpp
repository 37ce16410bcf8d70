#include <gtest/gtest.h>

#include <cmath>

#include "crgeo/calculus.hpp"
#include "crgeo/curvature.hpp"
#include "crgeo/models.hpp"
#include "crgeo/sampling.hpp"

using namespace crgeo;

namespace {

double K_theta(const Structure& S, const Vec<double>& p) {
    return curvature_components(S, p).K_theta.front();
}

std::vector<Vec<double>> points_with_center(const Chart& c, int count, std::uint64_t seed) {
    std::vector<Vec<double>> pts = sample_points(c, count - 1, seed);
    pts.insert(pts.begin(), Vec<double>(c.dim()));
    return pts;
}

}  // namespace

TEST(Heisenberg, SasakianFlatWithVerticalReeb) {
    for (int m : {1, 2}) {
        Structure H = heisenberg(m);
        auto pts = sample_points(H.chart, 20, 1);
        Classification c = classify(H, pts);
        EXPECT_TRUE(c.sasakian_type);
        for (const Vec<double>& p : pts) {
            EXPECT_NEAR(K_theta(H, p), 0.0, 1e-10);
            Vec<double> xi = reeb_field(H, p);
            for (int i = 0; i + 1 < H.dim(); ++i) EXPECT_EQ(xi[i], 0.0);
            EXPECT_EQ(xi[H.dim() - 1], 1.0);
        }
    }
}

TEST(Heisenberg, ContactFormInRealCoordinates) {
    Structure H = heisenberg(2);
    Vec<double> p{0.3, -0.4, 1.1, 0.2, 0.7};
    Vec<double> th = H.theta(p);
    Vec<double> want{-2 * -0.4, 2 * 0.3, -2 * 0.2, 2 * 1.1, 1.0};
    EXPECT_LE(max_abs(th - want), 1e-15);
}

TEST(Sphere, UnitCurvatureAndSasakian) {
    for (int m : {1, 2}) {
        Structure S = cr_sphere(m);
        auto pts = sample_points(S.chart, m == 1 ? 20 : 5, 2);
        for (const Vec<double>& p : pts) EXPECT_NEAR(K_theta(S, p), 1.0, 1e-6);
        Classification c = classify(S, pts);
        EXPECT_TRUE(c.pseudo_kahler);
        EXPECT_TRUE(c.sasakian_type);
        EXPECT_LE(c.tau, 1e-8);
    }
    EXPECT_EQ(cr_sphere(1).params.at("theta_scale"), 4.0);
}

TEST(Sphere, OutsideChartIsADomainError) {
    Structure S = cr_sphere(1);
    EXPECT_THROW(reeb_field(S, {5.0, 0.0, 0.0}), DomainError);
    EXPECT_THROW(cr_sphere(0), DomainError);
}

TEST(Bergman, CalibratedCurvatureIsMinusOneOffCenter) {
    for (int m : {1, 2}) {
        Structure B = bergman_cylinder(m);
        EXPECT_EQ(B.params.at("primitive_scale"), bergman_calibration(m));
        for (const Vec<double>& p : points_with_center(B.chart, m == 1 ? 20 : 5, 3))
            EXPECT_NEAR(K_theta(B, p), -1.0, 1e-6);
    }
}

TEST(Bergman, CalibrationIsStableAndUncalibratedScaleIsNot) {
    const double k = bergman_calibration(1);
    EXPECT_EQ(k, bergman_calibration(1));
    EXPECT_GT(k, 0.0);
    Structure off = bergman_cylinder_scaled(1, 2.0 * k);
    EXPECT_GT(std::abs(K_theta(off, {0.1, 0.1, 0.0}) + 1.0), 1e-2);
}

TEST(Bergman, ReebIsDtAndTorsionFree) {
    Structure B = bergman_cylinder(1);
    B.reeb = {};
    for (const Vec<double>& p : sample_points(B.chart, 10, 4)) {
        EXPECT_LE(max_abs(reeb_field(B, p) - Vec<double>{0, 0, 1}), 1e-12);
        EXPECT_LE(max_abs(torsion_decomposition(B, p).tau), 1e-8);
    }
}

TEST(Bergman, DthetaIsTheBallKahlerForm) {
    // dtheta = k d(phi (x dy - y dx)) with phi = 1 / (1 - r^2): coefficient of dx ^ dy is k (phi + r^2 phi').
    Structure B = bergman_cylinder(1);
    const double k = bergman_calibration(1);
    for (const Vec<double>& p : sample_points(B.chart, 10, 5)) {
        double r2 = p[0] * p[0] + p[1] * p[1];
        double phi = 1.0 / (1.0 - r2), dphi = phi * phi;
        Mat<double> D = exterior_derivative_matrix(B.chart, B.theta, p);
        EXPECT_NEAR(D(0, 1), k * (phi + r2 * dphi), 1e-9);
        EXPECT_NEAR(D(0, 2), 0.0, 1e-12);
        EXPECT_NEAR(D(1, 2), 0.0, 1e-12);
    }
}

TEST(Bergman, ChartRadiusMustStayInsideTheBall) {
    EXPECT_THROW(bergman_cylinder(1, 1.0), DomainError);
    EXPECT_THROW(bergman_cylinder(1, 0.0), DomainError);
}

TEST(Bergman, AlternativePrimitiveGivesTheSameCurvature) {
    Structure B = bergman_cylinder_shifted_primitive(1);
    for (const Vec<double>& p : points_with_center(B.chart, 5, 6)) {
        EXPECT_NEAR(K_theta(B, p), -1.0, 1e-6);
        EXPECT_LE(max_abs(torsion_decomposition(B, p).tau), 1e-8);
    }
    Vec<double> q{0.2, 0.1, 0.0};
    EXPECT_GT(max_abs(B.theta(q) - bergman_cylinder(1).theta(q)), 1e-3);
}

TEST(MixedHomothety, IdentityFactorsChangeNothing) {
    Structure S = cr_sphere(1);
    Structure T = mixed_homothety(S, 1.0, 1.0);
    for (const Vec<double>& p : sample_points(S.chart, 5, 7)) {
        EXPECT_EQ(max_abs(T.theta(p) - S.theta(p)), 0.0);
        CurvatureData a = curvature_components(S, p), b = curvature_components(T, p);
        for (std::size_t i = 0; i < a.Rc.size(); ++i) EXPECT_EQ(a.Rc[i], b.Rc[i]);
    }
}

TEST(MixedHomothety, ReebScalesAndPseudoKahlerSurvives) {
    Structure S = bergman_cylinder(1);
    Structure T = mixed_homothety(S, 2.0, 3.0);
    Structure Tb = T;
    Tb.reeb = {};
    Vec<double> p{0.1, -0.2, 0.3};
    EXPECT_LE(max_abs(reeb_field(Tb, p) - (1.0 / 3.0) * reeb_field(S, p)), 1e-12);
    EXPECT_TRUE(classify(T, sample_points(T.chart, 5, 8)).pseudo_kahler);
    EXPECT_THROW(mixed_homothety(S, 0.0, 1.0), DomainError);
    EXPECT_THROW(mixed_homothety(S, 1.0, -2.0), DomainError);
}

TEST(ConformalH, ConstantFactorKeepsPseudoKahler) {
    Structure H = heisenberg(1);
    Structure C = conformal_h(H, ScalarField([](const auto& x) { return 0.0 * x[0] + 0.7; }), "const");
    Classification c = classify(C, sample_points(C.chart, 5, 9));
    EXPECT_TRUE(c.pseudo_kahler);
    EXPECT_TRUE(c.agrees);
}

TEST(ConformalH, LinearFactorBreaksPseudoKahlerFromDimensionFive) {
    // dOmega' = e^u du ^ dtheta, and dx1 ^ dtheta vanishes when m = 1.
    ScalarField u = [](const auto& x) { return x[0]; };
    Structure C1 = conformal_h(heisenberg(1), u, "x1");
    Classification c1 = classify(C1, sample_points(C1.chart, 5, 10));
    EXPECT_TRUE(c1.pseudo_kahler);
    EXPECT_TRUE(c1.agrees);

    Structure C2 = conformal_h(heisenberg(2), u, "x1");
    auto pts = sample_points(C2.chart, 5, 10);
    Classification c2 = classify(C2, pts);
    EXPECT_FALSE(c2.pseudo_kahler);
    EXPECT_TRUE(c2.agrees);
    EXPECT_GT(c2.domega, 1e-3);
    for (const Vec<double>& p : pts) {
        Mat<double> G = metric_matrix(C2, p);
        for (const Vec<double>& v : {Vec<double>{1, 0, 0, 0, 0}, Vec<double>{0, 1, 0, 0, 0}, Vec<double>{0.3, -1, 2, 1, -1}})
            EXPECT_GT(bilinear(G, v, v), 0.0);
    }
}

TEST(PerturbedHeisenberg, DefinitionAndClassification) {
    Structure P = perturbed_heisenberg(1);
    Structure H = heisenberg(1, 2.0);
    Vec<double> p{0.4, -0.3, 0.5};
    const double u = 0.5 * 0.4 + 0.3 * 0.16 + 0.2 * 0.5;
    EXPECT_NEAR(P.h(p)(0, 0), std::exp(u) * H.h(p)(0, 0), 1e-14);
    Classification c = classify(P, sample_points(P.chart, 5, 11));
    EXPECT_FALSE(c.pseudo_kahler);
    EXPECT_TRUE(c.horizontally_kahler);
    EXPECT_TRUE(c.agrees);
}

TEST(ModelRegistry, NamesCurvaturesAndErrors) {
    EXPECT_EQ(parse_model_kind("sphere"), ModelKind::sphere);
    EXPECT_EQ(parse_model_kind("bergman"), ModelKind::bergman_cylinder);
    EXPECT_EQ(parse_model_kind("perturbed"), ModelKind::perturbed_heisenberg);
    for (ModelKind k : {ModelKind::heisenberg, ModelKind::sphere, ModelKind::bergman_cylinder,
                        ModelKind::perturbed_heisenberg})
        EXPECT_EQ(parse_model_kind(model_kind_name(k)), k);
    EXPECT_THROW(parse_model_kind("torus"), DomainError);
    EXPECT_EQ(model_curvature(ModelKind::heisenberg), 0.0);
    EXPECT_EQ(model_curvature(ModelKind::sphere), 1.0);
    EXPECT_EQ(model_curvature(ModelKind::bergman_cylinder), -1.0);
    EXPECT_TRUE(std::isnan(model_curvature(ModelKind::perturbed_heisenberg)));
    Structure S = make_model({ModelKind::sphere, 2, 1.2});
    EXPECT_EQ(S.dim(), 5);
    EXPECT_EQ(S.chart.bounds()[0].hi, 1.2);
    EXPECT_THROW(make_model({ModelKind::heisenberg, 0, 0.0}), DomainError);
    EXPECT_THROW(heisenberg(4), DomainError);
}

TEST(ModelRegistry, LargestDimensionEvaluates) {
    for (ModelKind k : {ModelKind::heisenberg, ModelKind::sphere, ModelKind::bergman_cylinder}) {
        Structure S = make_model({k, 3, 0.0});
        ASSERT_EQ(S.dim(), 7);
        for (const Vec<double>& p : sample_points(S.chart, 3, 9)) {
            CurvatureData R = curvature_components(S, p);
            ASSERT_EQ(R.K_theta.size(), 3u);
            for (double K : R.K_theta) EXPECT_NEAR(K, model_curvature(k), 1e-8) << S.name;
        }
    }
    EXPECT_THROW(make_model({ModelKind::sphere, 4, 0.0}), std::exception);
}

TEST(Storage, CapacityIsChecked) {
    EXPECT_THROW(Vec<double>(kMaxDim + 1), std::length_error);
    EXPECT_THROW(Mat<double>(kMaxDim + 1, 1), std::length_error);
    EXPECT_NO_THROW(Vec<double>(kMaxDim));
}
