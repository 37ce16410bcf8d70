#include <gtest/gtest.h>

#include "crgeo/calculus.hpp"
#include "crgeo/cr.hpp"
#include "crgeo/models.hpp"
#include "crgeo/sampling.hpp"
#include "crgeo/spec_file.hpp"

using namespace crgeo;

namespace {

const char* kHeisenbergSpec = R"({
  "name": "heisenberg_gs",
  "m": 1,
  "bounds": [[-2, 2], [-2, 2], [-2, 2]],
  "theta": ["-2*y", "2*x", 1],
  "J": [[0, -1, 0], [1, 0, 0], ["-2*x", "-2*y", 0]],
  "h": [[2, 0, 0], [0, 2, 0], [0, 0, 0]]
})";

std::vector<Structure> all_models() {
    return {heisenberg(1), heisenberg(2), cr_sphere(1), cr_sphere(2), bergman_cylinder(1), bergman_cylinder(2),
            perturbed_heisenberg(1), parse_structure_spec(kHeisenbergSpec)};
}

Vec<double> random_vec(Sampler& rng, int n) {
    Vec<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

Vec<double> J_of(const Structure& S, const Vec<double>& p, const Vec<double>& v) { return matvec(S.J(p), v); }

}  // namespace

TEST(ReebField, HeisenbergIsDt) {
    Structure H = heisenberg(1);
    H.reeb = {};
    for (const Vec<double>& p : sample_points(H.chart, 20, 1)) {
        Vec<double> xi = reeb_field(H, p);
        EXPECT_LE(max_abs(xi - Vec<double>{0, 0, 1}), 1e-13);
    }
}

TEST(ReebField, BergmanCylinderIsDtBySolve) {
    for (int m : {1, 2}) {
        Structure B = bergman_cylinder(m);
        B.reeb = {};
        Vec<double> dt(B.dim());
        dt[B.dim() - 1] = 1.0;
        for (const Vec<double>& p : sample_points(B.chart, 20, 2)) EXPECT_LE(max_abs(reeb_field(B, p) - dt), 1e-12);
    }
}

TEST(ReebField, NormalizedAndAnnihilatesDtheta) {
    for (Structure S : all_models()) {
        Structure solved = S;
        solved.reeb = {};
        for (const Vec<double>& p : sample_points(S.chart, 20, 3)) {
            Vec<double> xi = reeb_field(S, p);
            EXPECT_NEAR(dot(S.theta(p), xi), 1.0, 1e-12) << S.name;
            EXPECT_LE(max_abs(matvec(transpose(exterior_derivative_matrix(S.chart, S.theta, p)), xi)), 1e-12) << S.name;
            EXPECT_LE(max_abs(reeb_field(solved, p) - xi), 1e-10) << S.name;
        }
    }
}

TEST(ReebField, DegenerateThetaIsRejected) {
    Structure S = parse_structure_spec(R"({"m": 1, "bounds": [[-1,1],[-1,1],[-1,1]], "theta": [0, 0, 1],
        "J": [[0,-1,0],[1,0,0],[0,0,0]], "h": [[1,0,0],[0,1,0],[0,0,0]]})");
    try {
        reeb_field(S, {0.1, 0.2, 0.3});
        FAIL() << "expected StructureError";
    } catch (const StructureError& e) {
        EXPECT_NE(std::string(e.what()).find("structure degenerate at p"), std::string::npos);
    }
}

TEST(Projection, ReebSplitsOffEntirely) {
    Structure S = cr_sphere(1);
    Vec<double> p{0.2, -0.3, 0.4};
    CVec<double> xi = to_complex(reeb_field(S, p));
    EXPECT_LE(max_abs(project(S, p, xi, Projection::H)), 1e-14);
    EXPECT_LE(max_abs(project(S, p, xi, Projection::zero) - xi), 1e-14);
}

TEST(Projection, DecompositionAndEigenvalues) {
    Sampler rng(4);
    for (Structure S : all_models()) {
        const int n = S.dim();
        for (int k = 0; k < 50; ++k) {
            Vec<double> p = rng.point(S.chart);
            CVec<double> v = to_complex(random_vec(rng, n));
            CVec<double> plus = project(S, p, v, Projection::plus);
            CVec<double> sum = plus + project(S, p, v, Projection::minus) + project(S, p, v, Projection::zero);
            EXPECT_LE(max_abs(sum - v), 1e-12) << S.name;
            CVec<double> Jplus = matvec(S.J(p), plus);
            for (int i = 0; i < n; ++i) {
                EXPECT_NEAR(Jplus[i].re, -plus[i].im, 1e-12);
                EXPECT_NEAR(Jplus[i].im, plus[i].re, 1e-12);
            }
        }
    }
}

TEST(Projection, HeisenbergPlusOfE1IsEta1OverSqrt2) {
    Structure H = heisenberg(1);
    Vec<double> p{0.3, 0.5, -0.2};
    AdaptedFrame f = adapted_frame(H, p);
    CVec<double> v = project(H, p, to_complex(f.e[0]), Projection::plus);
    EXPECT_LE(max_abs(v - (1.0 / std::sqrt(2.0)) * f.eta[0]), 1e-14);
}

TEST(Metric, ReebIsUnitAndOrthogonalToH) {
    for (Structure S : all_models()) {
        Vec<double> p = sample_points(S.chart, 1, 5)[0];
        AdaptedFrame f = adapted_frame(S, p);
        EXPECT_NEAR(metric(S, p, f.eta0, f.eta0), 1.0, 1e-12) << S.name;
        for (int a = 0; a < f.m(); ++a) {
            EXPECT_NEAR(metric(S, p, f.eta0, f.e[a]), 0.0, 1e-12) << S.name;
            EXPECT_NEAR(metric(S, p, f.e[a], f.e[a]), 1.0, 1e-12) << S.name;
        }
    }
}

TEST(Metric, HermitianUpToTheVerticalPart) {
    Sampler rng(6);
    for (Structure S : all_models()) {
        for (int k = 0; k < 30; ++k) {
            Vec<double> p = rng.point(S.chart);
            Vec<double> X = random_vec(rng, S.dim()), Y = random_vec(rng, S.dim());
            Vec<double> th = S.theta(p);
            double lhs = metric(S, p, J_of(S, p, X), J_of(S, p, Y));
            double rhs = metric(S, p, X, Y) - dot(th, X) * dot(th, Y);
            EXPECT_NEAR(lhs, rhs, 1e-10 * (1.0 + std::abs(rhs))) << S.name;
            EXPECT_NEAR(metric(S, p, X, Y), metric(S, p, Y, X), 1e-12);
            EXPECT_GT(metric(S, p, X, X), 0.0);
        }
    }
}

TEST(LeviForm, HeisenbergNormalization) {
    Structure H = heisenberg(1);
    for (const Vec<double>& p : sample_points(H.chart, 10, 7)) {
        AdaptedFrame f = adapted_frame(H, p);
        Cx<double> L = levi_form(H, p, f.eta[0], f.etabar[0]);
        EXPECT_NEAR(L.re, 1.0, 1e-13);
        EXPECT_NEAR(L.im, 0.0, 1e-13);
        // dtheta(eta, etabar) = i L
        Cx<double> d = exterior_derivative(H.chart, H.theta, p, f.eta[0], f.etabar[0]);
        EXPECT_NEAR(d.re, 0.0, 1e-13);
        EXPECT_NEAR(d.im, 1.0, 1e-13);
    }
}

TEST(LeviForm, SymmetricAndJInvariant) {
    Sampler rng(8);
    for (Structure S : all_models()) {
        for (int k = 0; k < 20; ++k) {
            Vec<double> p = rng.point(S.chart);
            Vec<double> X = project_H(S, p, random_vec(rng, S.dim()));
            Vec<double> Y = project_H(S, p, random_vec(rng, S.dim()));
            double l = levi_form(S, p, X, Y);
            EXPECT_NEAR(l, levi_form(S, p, Y, X), 1e-9 * (1.0 + std::abs(l))) << S.name;
            EXPECT_NEAR(l, levi_form(S, p, J_of(S, p, X), J_of(S, p, Y)), 1e-9 * (1.0 + std::abs(l))) << S.name;
        }
    }
}

TEST(LeviForm, RejectsVerticalArguments) {
    Structure H = heisenberg(1);
    Vec<double> p{0.1, 0.1, 0.1};
    EXPECT_THROW(levi_form(H, p, Vec<double>{0, 0, 1}, Vec<double>{1, 0, 0}), ContractViolation);
}

TEST(KahlerForm, ReebInContraction) {
    Sampler rng(9);
    for (Structure S : all_models()) {
        Vec<double> p = rng.point(S.chart);
        Vec<double> xi = reeb_field(S, p);
        for (int k = 0; k < 5; ++k) EXPECT_NEAR(kahler_form(S, p, xi, random_vec(rng, S.dim())), 0.0, 1e-12);
        Mat<double> W = kahler_matrix(S, p);
        Mat<double> Wt = transpose(W);
        for (int i = 0; i < W.r * W.c; ++i) EXPECT_NEAR(W.a[i], -Wt.a[i], 1e-12);
    }
}

TEST(KahlerForm, EqualsDthetaWhenHIsLevi) {
    Sampler rng(10);
    for (Structure S : {heisenberg(1), heisenberg(2), cr_sphere(1), bergman_cylinder(1)}) {
        for (int k = 0; k < 20; ++k) {
            Vec<double> p = rng.point(S.chart);
            Vec<double> X = random_vec(rng, S.dim()), Y = random_vec(rng, S.dim());
            double d = exterior_derivative(S.chart, S.theta, p, X, Y);
            EXPECT_NEAR(kahler_form(S, p, X, Y), d, 1e-9 * (1.0 + std::abs(d))) << S.name;
        }
    }
}

TEST(KahlerForm, AdaptedCoframeComponents) {
    for (Structure S : all_models()) {
        Vec<double> p = sample_points(S.chart, 1, 11)[0];
        AdaptedFrame f = adapted_frame(S, p);
        Mat<double> W = kahler_matrix(S, p);
        const int n = S.dim(), m = S.m();
        for (int A = 0; A < n; ++A)
            for (int B = 0; B < n; ++B) {
                Cx<double> w = eval_two_form(W, f.vec(A), f.vec(B));
                // 2i sum theta^a ^ theta^abar with the half wedge: i on (a, abar), -i on (abar, a)
                double expect_im = 0.0;
                if (A >= 1 && A <= m && B == A + m) expect_im = 1.0;
                if (B >= 1 && B <= m && A == B + m) expect_im = -1.0;
                EXPECT_NEAR(w.re, 0.0, 1e-10) << S.name << " " << A << "," << B;
                EXPECT_NEAR(w.im, expect_im, 1e-10) << S.name << " " << A << "," << B;
            }
    }
}

TEST(AdaptedFrame, HeisenbergOrigin) {
    Structure H = heisenberg(1);
    AdaptedFrame f = adapted_frame(H, {0, 0, 0});
    Vec<double> e = f.e[0];
    EXPECT_LE(max_abs((1.0 / norm(e)) * e - Vec<double>{1, 0, 0}), 1e-14);
    EXPECT_NEAR(norm(e), 1.0 / std::sqrt(2.0), 1e-14);
    Vec<double> p{0.7, 0.0, 0.0};
    AdaptedFrame g = adapted_frame(H, p);
    Vec<double> je = (1.0 / g.Je[0][1]) * g.Je[0];
    EXPECT_LE(max_abs(je - Vec<double>{0, 1, -1.4}), 1e-13);
}

TEST(AdaptedFrame, OrthonormalDualAndJCompatible) {
    for (Structure S : all_models()) {
        for (const Vec<double>& p : sample_points(S.chart, 100, 12)) {
            for (bool analytic : {true, false}) {
                AdaptedFrame f = adapted_frame(S, p, FrameOptions{analytic});
                const int n = S.dim(), m = S.m();
                Mat<double> G = metric_matrix(S, p);
                for (int A = 0; A < n; ++A)
                    for (int B = 0; B < n; ++B) {
                        Cx<double> gab = bilinear(G, f.vec(A), f.vec(B));
                        double want = (A == 0 && B == 0) || (A >= 1 && A <= m && B == A + m) ||
                                              (B >= 1 && B <= m && A == B + m)
                                          ? 1.0
                                          : 0.0;
                        EXPECT_LE(primal_abs(gab - Cx<double>(want)), 1e-10) << S.name;
                        Cx<double> dual = apply(f.coframe.row(A), f.vec(B));
                        EXPECT_LE(primal_abs(dual - Cx<double>(A == B ? 1.0 : 0.0)), 1e-10) << S.name;
                    }
                for (int a = 0; a < m; ++a) EXPECT_LE(max_abs(J_of(S, p, f.e[a]) - f.Je[a]), 1e-10) << S.name;
            }
        }
    }
}

TEST(AdaptedFrame, GramSchmidtSpansTheAnalyticSubspace) {
    for (Structure S : {heisenberg(1), heisenberg(2)}) {
        ASSERT_TRUE(static_cast<bool>(S.frame));
        for (const Vec<double>& p : sample_points(S.chart, 20, 13)) {
            AdaptedFrame an = adapted_frame(S, p, FrameOptions{true});
            AdaptedFrame gs = adapted_frame(S, p, FrameOptions{false});
            ASSERT_TRUE(an.analytic);
            ASSERT_FALSE(gs.analytic);
            Mat<double> G = metric_matrix(S, p);
            const int m = S.m();
            // c(a, b) = <eta_a^gs, etabar_b^an>; the GS frame lies in the analytic span iff the residual vanishes
            // and c is unitary.
            for (int a = 0; a < m; ++a) {
                CVec<double> r = gs.eta[a];
                for (int b = 0; b < m; ++b) {
                    Cx<double> c = bilinear(G, gs.eta[a], an.etabar[b]);
                    for (int i = 0; i < r.n; ++i) r[i] -= c * an.eta[b][i];
                }
                EXPECT_LE(max_abs(r), 1e-8);
            }
        }
    }
}

TEST(AdaptedFrame, ExtensionReproducesTheGerm) {
    Structure S = parse_structure_spec(kHeisenbergSpec);
    Vec<double> p{0.3, -0.2, 0.5};
    AdaptedFrame f = adapted_frame(S, p);
    AdaptedFrame g = extend_frame(S, f, p);
    EXPECT_EQ(f.pivots, g.pivots);
    for (int A = 0; A < S.dim(); ++A) EXPECT_LE(max_abs(f.vec(A) - g.vec(A)), 1e-15);
    EXPECT_EQ(choose_pivots(S, p), std::vector<int>({0}));
    EXPECT_EQ(choose_pivots(heisenberg(2), Vec<double>{0.1, 0.2, 0.3, 0.4, 0.5}), std::vector<int>({0, 2}));
}

TEST(StructureInvariants, HoldOnEveryModel) {
    for (Structure S : all_models()) {
        for (const Vec<double>& p : sample_points(S.chart, 100, 14)) {
            StructureInvariants inv = structure_invariants(S, p);
            EXPECT_LE(inv.algebraic(), 1e-10) << S.name;
            EXPECT_LE(inv.ixi_dtheta, 1e-9) << S.name;
            EXPECT_LE(inv.lie_xi_theta, 1e-9) << S.name;
            EXPECT_LE(inv.integrability, 1e-7) << S.name;
            EXPECT_LE(inv.volume, 1e-8) << S.name;
            EXPECT_LE(inv.first_structure, 1e-8) << S.name;
            EXPECT_GT(inv.h_min_pivot, 0.0) << S.name;
        }
    }
}

TEST(StructureInvariants, DetectABrokenJ) {
    Structure S = heisenberg(1);
    S.J = [](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        Mat<T> J(3, 3);
        J(1, 0) = 1.0;
        J(0, 1) = -1.0;
        J(2, 0) = -2.0 * x[0];
        J(2, 1) = -2.0 * x[1] + 0.1;
        return J;
    };
    StructureInvariants inv = structure_invariants(S, {0.2, 0.1, 0.0});
    EXPECT_GT(inv.theta_J, 1e-3);
}

TEST(Pivots, WellConditionedOnSphere) {
    Structure S = cr_sphere(2);
    Vec<double> p{-0.01, 0.01, 0.03, 0.05, 0.07};
    std::vector<int> piv = choose_pivots(S, p);
    ASSERT_EQ(piv.size(), 2u);
    // d_y1 is almost J e_1 here and must not be picked second.
    EXPECT_NE(piv[1], 1);
}
