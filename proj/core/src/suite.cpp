#include "crgeo/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crgeo/connection.hpp"
#include "crgeo/curvature.hpp"
#include "crgeo/geodesic.hpp"
#include "crgeo/models.hpp"
#include "crgeo/sampling.hpp"
#include "crgeo/spec_file.hpp"

#ifndef CRGEO_VERSION
#define CRGEO_VERSION "0.0.0"
#endif

namespace crgeo {

const char* artifact_version() { return CRGEO_VERSION; }

namespace {

using ojson = nlohmann::ordered_json;
constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<CheckInfo> kChecks = {
    {"structure_axioms", Tier::algebraic, false, true, "almost contact identities, theta(xi) = 1, h J-invariant and positive on H"},
    {"structure_calculus", Tier::first_order, false, true, "integrability, i_xi dtheta, L_xi theta, volume identity, first structure equation for dtheta"},
    {"adapted_frame", Tier::algebraic, false, true, "orthonormality and duality of the adapted frame, e_{m+a} = J e_a"},
    {"connection_axioms", Tier::first_order, false, true, "nabla g, nabla J, nabla xi, Theta^(1,1), sigma skew, torsion facts"},
    {"structure_equations", Tier::second_order, false, true, "first and second structure equations"},
    {"bianchi_identities", Tier::second_order, false, true, "torsion and curvature relations, Ricci contraction, type and skew symmetries"},
    {"curvature_symmetries", Tier::second_order, false, true, "antisymmetry of R, rho_M = 2 rho, vanishing vertical trace"},
    {"horizontally_kahler", Tier::first_order, false, true, "Theta^(2,0) = 0"},
    {"pseudo_kahler", Tier::first_order, false, true, "Theta^(2,0) = 0, sigma = 0 and tau symmetric"},
    {"sasakian_type", Tier::first_order, false, true, "pseudo-Kahler with tau = 0"},
    {"classification_agreement", Tier::exact, false, true, "torsion classification agrees with the exterior derivative of Omega"},
    {"kahler_symmetries", Tier::second_order, false, true, "J-invariance, pair symmetry, vertical annihilation, Ric_b symmetry"},
    {"holomorphic_reconstruction", Tier::second_order, false, true, "R on H recovered from pseudo-Hermitian sectional values"},
    {"space_form_constant", Tier::second_order, true, true, "K_theta = c on random J-invariant horizontal planes"},
    {"space_form_tensor", Tier::second_order, true, true, "R = R0 on all frame 4-tuples"},
    {"horizontal_sectional", Tier::second_order, true, true, "K(X, Y) = c/4 (1 + 3 <X, JY>^2) on horizontal planes"},
    {"ricci_einstein", Tier::second_order, true, true, "Ric_b = (m+1) c / 2 h"},
    {"pseudo_einstein", Tier::second_order, false, true, "Ric_b = lambda h with constant lambda across samples"},
    {"mixed_homothety", Tier::second_order, true, true, "K_theta of (mu theta, mu h) equals c / mu^2 for mu in {0.5, 2, 3}"},
    {"jacobi_duality", Tier::geodesic, false, true, "Jacobi field at t = 1 equals d exp_p(u)[w], |u| = 0.5"},
    {"log_exp_roundtrip", Tier::geodesic, false, true, "log_p(exp_p(u)) = u, |u| = 0.3"},
    {"geodesic_speed_drift", Tier::geodesic, false, true, "|gamma'| constant along geodesics, per unit time"},
    {"cartan_isometry", Tier::isometry, true, true, "Cartan map between two patches of the structure is a pseudo-Hermitian isometry"},
    {"cartan_differential", Tier::isometry, true, true, "df_p equals rho"},
    {"cartan_hypotheses", Tier::isometry, true, true, "curvature and torsion transfer along phi_t"},
    {"cartan_mismatch_control", Tier::isometry, true, false, "curvature hypothesis against a model of different curvature (negative control)"},
};

double base_tolerance(const Tolerances& t, const std::string& name, Tier tier) {
    switch (tier) {
        case Tier::algebraic: return t.algebraic;
        case Tier::first_order: return t.first_order;
        case Tier::second_order: return t.second_order;
        case Tier::exact: return 0.0;
        case Tier::geodesic:
            if (name == "jacobi_duality") return 1e-5;
            if (name == "log_exp_roundtrip") return 1e-7;
            return 1e-8;
        case Tier::isometry: return name == "cartan_differential" ? 1e-6 : 1e-5;
    }
    return 0.0;
}

std::uint64_t derived_seed(std::uint64_t seed, std::size_t index) {
    return seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1);
}

Vec<double> chart_center(const Chart& c) {
    Vec<double> p(c.dim());
    for (int i = 0; i < p.n; ++i) p[i] = 0.5 * (c.bounds()[static_cast<std::size_t>(i)].lo + c.bounds()[static_cast<std::size_t>(i)].hi);
    return p;
}

// Random horizontal vector of unit g-norm at the frame base.
Vec<double> unit_horizontal(const AdaptedFrame& f, Sampler& rng) {
    const int n = f.dim();
    Vec<double> z(n - 1);
    for (int i = 0; i < z.n; ++i) z[i] = rng.normal();
    const double s = 1.0 / norm(z);
    Vec<double> X(n);
    for (int i = 1; i < n; ++i) X = X + (s * z[i - 1]) * f.real_vec(i);
    return X;
}

struct Context {
    const SuiteConfig& cfg;
    const Structure& S;
    DiffConfig diff;
    std::optional<double> c;
    std::vector<Vec<double>> points;
    std::optional<IsometryReport> iso;
    std::optional<Classification> cls;
    double tol_first = 1e-8;

    const Classification& classification() {
        if (!cls) cls = classify(S, points, tol_first, diff);
        return *cls;
    }
    const IsometryReport& isometry() {
        if (!iso) {
            Vec<double> p = chart_center(S.chart), pt = p;
            const Interval& b = S.chart.bounds()[0];
            pt[0] += 0.05 * (b.hi - b.lo);
            Mat<double> rho = frame_map(S, p, S, pt, frame_rotation(S.m(), 0.4), diff);
            IsometryCandidate cand{S, S, p, pt, rho, 0.3};
            iso = isometry_report(cand, cfg.geodesic_samples, derived_seed(cfg.seed, 1000), diff);
        }
        return *iso;
    }
};

using Runner = std::function<void(Context&, Sampler&, CheckResult&)>;

void over_points(Context& ctx, CheckResult& r, const std::function<double(const Vec<double>&)>& f) {
    for (const Vec<double>& p : ctx.points) r.max_residual = std::max(r.max_residual, f(p));
    r.sample_count = static_cast<int>(ctx.points.size());
}

std::vector<Vec<double>> geodesic_bases(Context& ctx, Sampler& rng) {
    std::vector<Vec<double>> out;
    for (int i = 0; i < ctx.cfg.geodesic_samples; ++i) out.push_back(rng.point(ctx.S.chart, 0.3));
    return out;
}

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> table = {
        {"structure_axioms",
         [](Context& ctx, Sampler&, CheckResult& r) {
             double pivot = kInf;
             over_points(ctx, r, [&](const Vec<double>& p) {
                 StructureInvariants s = structure_invariants(ctx.S, p, ctx.diff);
                 pivot = std::min(pivot, s.h_min_pivot);
                 return s.h_min_pivot > 0.0 ? s.algebraic() : kInf;
             });
             r.values.emplace_back("min_h_pivot", pivot);
         }},
        {"structure_calculus",
         [](Context& ctx, Sampler&, CheckResult& r) {
             over_points(ctx, r, [&](const Vec<double>& p) { return structure_invariants(ctx.S, p, ctx.diff).first_order(); });
         }},
        {"adapted_frame",
         [](Context& ctx, Sampler&, CheckResult& r) {
             over_points(ctx, r, [&](const Vec<double>& p) {
                 AdaptedFrame f = adapted_frame(ctx.S, p, {}, ctx.diff);
                 Mat<double> G = metric_matrix(ctx.S, p, ctx.diff);
                 Mat<double> J = ctx.S.J(p);
                 const int n = p.n, m = f.m();
                 double res = 0.0;
                 for (int A = 0; A < n; ++A)
                     for (int B = 0; B < n; ++B) {
                         Cx<double> want(A == (B == 0 ? 0 : (B <= m ? B + m : B - m)) ? 1.0 : 0.0);
                         res = std::max(res, primal_abs(bilinear(G, f.vec(A), f.vec(B)) - want));
                         Cx<double> dual(0.0);
                         for (int k = 0; k < n; ++k) dual += f.coframe(A, k) * f.E(k, B);
                         res = std::max(res, primal_abs(dual - Cx<double>(A == B ? 1.0 : 0.0)));
                     }
                 for (int a = 0; a < m; ++a) res = std::max(res, max_abs(f.real_vec(1 + m + a) - matvec(J, f.real_vec(1 + a))));
                 return res;
             });
         }},
        {"connection_axioms",
         [](Context& ctx, Sampler&, CheckResult& r) {
             over_points(ctx, r, [&](const Vec<double>& p) {
                 ConnectionData K = connection_at(ctx.S, p, ctx.diff);
                 double a = connection_residuals(K, levi_matrix(ctx.S, K.frame, ctx.diff)).max();
                 return std::max(a, coordinate_axioms(ctx.S, p, ctx.diff).max());
             });
         }},
        {"structure_equations",
         [](Context& ctx, Sampler&, CheckResult& r) {
             over_points(ctx, r, [&](const Vec<double>& p) { return structure_equation_residuals(ctx.S, p, ctx.diff).max(); });
         }},
        {"bianchi_identities",
         [](Context& ctx, Sampler&, CheckResult& r) {
             int applicable = 0;
             over_points(ctx, r, [&](const Vec<double>& p) {
                 BianchiResiduals b = bianchi_residuals(ctx.S, p, ctx.diff);
                 applicable += b.simplified_applicable;
                 return b.max();
             });
             r.values.emplace_back("simplified_block_points", applicable);
         }},
        {"curvature_symmetries",
         [](Context& ctx, Sampler& rng, CheckResult& r) {
             over_points(ctx, r, [&](const Vec<double>& p) {
                 CurvatureData R = curvature_components(ctx.S, p, ctx.diff);
                 RicciData ric = ricci_and_scalar(R);
                 const int n = p.n;
                 Vec<double> V[4];
                 for (Vec<double>& v : V) {
                     v = Vec<double>(n);
                     for (int i = 0; i < n; ++i) v[i] = rng.normal();
                 }
                 double x = R.scalar(V[0], V[1], V[2], V[3]);
                 return std::max({std::abs(x + R.scalar(V[1], V[0], V[2], V[3])),
                                  std::abs(x + R.scalar(V[0], V[1], V[3], V[2])), std::abs(ric.rho_M - 2.0 * ric.rho),
                                  ric.vertical_trace});
             });
         }},
        {"horizontally_kahler",
         [](Context& ctx, Sampler&, CheckResult& r) {
             r.max_residual = ctx.classification().theta20;
             r.sample_count = static_cast<int>(ctx.points.size());
         }},
        {"pseudo_kahler",
         [](Context& ctx, Sampler&, CheckResult& r) {
             const Classification& c = ctx.classification();
             r.max_residual = std::max({c.theta20, c.sigma, c.tau_asym});
             r.sample_count = static_cast<int>(ctx.points.size());
             r.values.emplace_back("domega", c.domega);
         }},
        {"sasakian_type",
         [](Context& ctx, Sampler&, CheckResult& r) {
             const Classification& c = ctx.classification();
             r.max_residual = std::max({c.theta20, c.sigma, c.tau_asym, c.tau});
             r.sample_count = static_cast<int>(ctx.points.size());
         }},
        {"classification_agreement",
         [](Context& ctx, Sampler&, CheckResult& r) {
             const Classification& c = ctx.classification();
             r.max_residual = (c.domega_horizontally_kahler != c.horizontally_kahler) +
                              (c.domega_pseudo_kahler != c.pseudo_kahler);
             r.sample_count = static_cast<int>(ctx.points.size());
             r.values.emplace_back("domega", c.domega);
             r.values.emplace_back("domega_horizontal", c.domega_h);
         }},
        {"kahler_symmetries",
         [](Context& ctx, Sampler& rng, CheckResult& r) {
             over_points(ctx, r, [&](const Vec<double>& p) {
                 CurvatureData R = curvature_components(ctx.S, p, ctx.diff);
                 Mat<double> J = ctx.S.J(p);
                 Vec<double> X = unit_horizontal(R.frame, rng), Y = unit_horizontal(R.frame, rng);
                 Vec<double> Z = unit_horizontal(R.frame, rng), W = unit_horizontal(R.frame, rng);
                 const Vec<double>& xi = R.frame.eta0;
                 double x = R.scalar(X, Y, Z, W);
                 double res = std::max({std::abs(R.scalar(matvec(J, X), matvec(J, Y), Z, W) - x),
                                        std::abs(R.scalar(Z, W, X, Y) - x), std::abs(R.scalar(xi, Y, Z, W)),
                                        std::abs(R.scalar(X, xi, Z, W)), std::abs(R.scalar(X, Y, xi, W)),
                                        std::abs(R.scalar(X, Y, Z, xi))});
                 const int m = R.m;
                 for (int a = 0; a < m; ++a)
                     for (int b = 0; b < m; ++b) res = std::max(res, primal_abs(R.ric_b(a, b) - R.ric_b_conj(a, b)));
                 return res;
             });
         }},
        {"holomorphic_reconstruction",
         [](Context& ctx, Sampler& rng, CheckResult& r) {
             over_points(ctx, r, [&](const Vec<double>& p) {
                 CurvatureData R = curvature_components(ctx.S, p, ctx.diff);
                 Mat<double> J = ctx.S.J(p);
                 auto Q = [&](const Vec<double>& X) {
                     Vec<double> JX = matvec(J, X);
                     return R.scalar(X, JX, X, JX);
                 };
                 Vec<double> X = unit_horizontal(R.frame, rng), Y = unit_horizontal(R.frame, rng);
                 Vec<double> Z = unit_horizontal(R.frame, rng), W = unit_horizontal(R.frame, rng);
                 return std::abs(reconstruct_from_holomorphic(Q, J, X, Y, Z, W) - R.scalar(X, Y, Z, W));
             });
         }},
        {"space_form_constant",
         [](Context& ctx, Sampler& rng, CheckResult& r) {
             over_points(ctx, r, [&](const Vec<double>& p) {
                 CurvatureData R = curvature_components(ctx.S, p, ctx.diff);
                 double res = 0.0;
                 for (double k : R.K_theta) res = std::max(res, std::abs(k - *ctx.c));
                 Vec<double> e = unit_horizontal(R.frame, rng);
                 return std::max(res, std::abs(pseudo_hermitian_sectional(R, ctx.S, e) - *ctx.c));
             });
             r.values.emplace_back("c", *ctx.c);
         }},
        {"space_form_tensor",
         [](Context& ctx, Sampler&, CheckResult& r) {
             int tuples = 0;
             over_points(ctx, r, [&](const Vec<double>& p) {
                 CurvatureData R = curvature_components(ctx.S, p, ctx.diff);
                 const int n = p.n;
                 std::vector<Vec<double>> f;
                 for (int i = 0; i < n; ++i) f.push_back(R.frame.real_vec(i));
                 double res = 0.0;
                 for (int a = 0; a < n; ++a)
                     for (int b = 0; b < n; ++b)
                         for (int c = 0; c < n; ++c)
                             for (int d = 0; d < n; ++d) {
                                 double r0 = space_form_tensor(ctx.S, p, *ctx.c, f[a], f[b], f[c], f[d], ctx.diff);
                                 res = std::max(res, std::abs(R.scalar(f[a], f[b], f[c], f[d]) - r0));
                                 ++tuples;
                             }
                 return res;
             });
             r.values.emplace_back("frame_tuples", tuples);
         }},
        {"horizontal_sectional",
         [](Context& ctx, Sampler& rng, CheckResult& r) {
             over_points(ctx, r, [&](const Vec<double>& p) {
                 CurvatureData R = curvature_components(ctx.S, p, ctx.diff);
                 Mat<double> J = ctx.S.J(p);
                 Vec<double> X = unit_horizontal(R.frame, rng), Y = unit_horizontal(R.frame, rng);
                 Y = Y - bilinear(R.g, X, Y) * X;
                 Y = (1.0 / std::sqrt(bilinear(R.g, Y, Y))) * Y;
                 double s = bilinear(R.g, X, matvec(J, Y));
                 return std::abs(sectional(R, X, Y) - 0.25 * *ctx.c * (1.0 + 3.0 * s * s));
             });
         }},
        {"ricci_einstein",
         [](Context& ctx, Sampler&, CheckResult& r) {
             const double lambda = 0.5 * (ctx.S.m() + 1) * *ctx.c;
             over_points(ctx, r, [&](const Vec<double>& p) {
                 CurvatureData R = curvature_components(ctx.S, p, ctx.diff);
                 double res = 0.0;
                 for (int a = 0; a < R.m; ++a)
                     for (int b = 0; b < R.m; ++b)
                         res = std::max(res, primal_abs(R.ric_b(a, b) - Cx<double>(a == b ? lambda : 0.0)));
                 return res;
             });
             r.values.emplace_back("lambda", lambda);
         }},
        {"pseudo_einstein",
         [](Context& ctx, Sampler&, CheckResult& r) {
             PseudoEinstein e = pseudo_einstein_check(ctx.S, ctx.points, ctx.cfg.tolerances.second_order, ctx.diff);
             r.max_residual = std::max(e.residual, e.variance);
             r.sample_count = static_cast<int>(ctx.points.size());
             r.values.emplace_back("lambda", e.lambda);
             r.values.emplace_back("asymmetry", e.asymmetry);
         }},
        {"mixed_homothety",
         [](Context& ctx, Sampler& rng, CheckResult& r) {
             const int count = std::min<int>(20, static_cast<int>(ctx.points.size()));
             double worst_linear = 0.0;
             for (double mu : {0.5, 2.0, 3.0}) {
                 Structure T = mixed_homothety(ctx.S, mu, mu);
                 double first = 0.0;
                 for (int i = 0; i < count; ++i) {
                     const Vec<double>& p = ctx.points[static_cast<std::size_t>(i)];
                     CurvatureData R = curvature_components(T, p, ctx.diff);
                     double k = pseudo_hermitian_sectional(R, T, unit_horizontal(R.frame, rng));
                     if (i == 0) first = k;
                     r.max_residual = std::max(r.max_residual, std::abs(k - *ctx.c / (mu * mu)));
                     worst_linear = std::max(worst_linear, std::abs(k - *ctx.c / mu));
                 }
                 std::ostringstream key;
                 key << "K_theta_mu_" << mu;
                 r.values.emplace_back(key.str(), first);
             }
             r.values.emplace_back("deviation_from_c_over_mu", worst_linear);
             r.sample_count = 3 * count;
         }},
        {"jacobi_duality",
         [](Context& ctx, Sampler& rng, CheckResult& r) {
             for (const Vec<double>& p : geodesic_bases(ctx, rng)) {
                 Mat<double> G = metric_matrix(ctx.S, p, ctx.diff);
                 Vec<double> u = 0.5 * rng.unit(G), w = rng.unit(G);
                 GeodesicPath path = integrate_geodesic(ctx.S, p, u, 1.0, 0, ctx.diff);
                 if (path.truncated) throw DomainError("geodesic left the chart");
                 JacobiField J = jacobi_field(ctx.S, path, Vec<double>(p.n), w, ctx.diff);
                 const double h = 1e-5;
                 Vec<double> fd = (0.5 / h) * (exp_map(ctx.S, p, u + h * w, ctx.diff) - exp_map(ctx.S, p, u - h * w, ctx.diff));
                 r.max_residual = std::max(r.max_residual, max_abs(J.V.back() - fd));
                 ++r.sample_count;
             }
         }},
        {"log_exp_roundtrip",
         [](Context& ctx, Sampler& rng, CheckResult& r) {
             for (const Vec<double>& p : geodesic_bases(ctx, rng)) {
                 Mat<double> G = metric_matrix(ctx.S, p, ctx.diff);
                 Vec<double> u = 0.3 * rng.unit(G);
                 Vec<double> back = log_map(ctx.S, p, exp_map(ctx.S, p, u, ctx.diff), ctx.diff);
                 Vec<double> d = back - u;
                 r.max_residual = std::max(r.max_residual, std::sqrt(bilinear(G, d, d)));
                 ++r.sample_count;
             }
         }},
        {"geodesic_speed_drift",
         [](Context& ctx, Sampler& rng, CheckResult& r) {
             for (const Vec<double>& p : geodesic_bases(ctx, rng)) {
                 Mat<double> G = metric_matrix(ctx.S, p, ctx.diff);
                 Vec<double> u = 0.5 * rng.unit(G);
                 GeodesicPath path = integrate_geodesic(ctx.S, p, u, 1.0, 0, ctx.diff);
                 if (path.truncated) throw DomainError("geodesic left the chart");
                 for (std::size_t k = 1; k < path.times.size(); ++k) {
                     const Vec<double>& v = path.velocities[k];
                     double s = std::sqrt(bilinear(metric_matrix(ctx.S, path.points[k], ctx.diff), v, v));
                     r.max_residual = std::max(r.max_residual, std::abs(s - 0.5) / path.times[k]);
                 }
                 ++r.sample_count;
             }
         }},
        {"cartan_isometry",
         [](Context& ctx, Sampler&, CheckResult& r) {
             const IsometryReport& iso = ctx.isometry();
             r.max_residual = iso.max_isometry_residual();
             r.sample_count = static_cast<int>(iso.samples.size());
             r.values.emplace_back("metric", iso.metric_residual);
             r.values.emplace_back("J", iso.J_residual);
             r.values.emplace_back("theta", iso.theta_residual);
         }},
        {"cartan_differential",
         [](Context& ctx, Sampler&, CheckResult& r) {
             r.max_residual = ctx.isometry().df_p_vs_rho;
             r.sample_count = 1;
         }},
        {"cartan_hypotheses",
         [](Context& ctx, Sampler&, CheckResult& r) {
             const IsometryReport& iso = ctx.isometry();
             r.max_residual = std::max({iso.curvature_hypothesis, iso.torsion_hypothesis, iso.torsion_transfer, iso.phi_isometry});
             r.sample_count = static_cast<int>(iso.samples.size());
             r.values.emplace_back("curvature", iso.curvature_hypothesis);
             r.values.emplace_back("torsion", iso.torsion_hypothesis);
             r.values.emplace_back("torsion_transfer", iso.torsion_transfer);
         }},
        {"cartan_mismatch_control",
         [](Context& ctx, Sampler&, CheckResult& r) {
             const int m = ctx.S.m();
             Structure other = std::abs(*ctx.c) < 0.5 ? cr_sphere(m) : heisenberg(m);
             Vec<double> p = chart_center(ctx.S.chart), pt = chart_center(other.chart);
             Mat<double> rho = frame_map(ctx.S, p, other, pt, std::nullopt, ctx.diff);
             IsometryCandidate cand{ctx.S, other, p, pt, rho, 0.3};
             IsometryReport iso = isometry_report(cand, std::min(ctx.cfg.geodesic_samples, 2), derived_seed(ctx.cfg.seed, 2000), ctx.diff);
             r.max_residual = iso.curvature_hypothesis;
             r.sample_count = static_cast<int>(iso.samples.size());
             r.values.emplace_back("hypotheses_hold", iso.hypotheses_hold ? 1.0 : 0.0);
             r.values.emplace_back("metric_residual", iso.metric_residual);
         }},
    };
    return table;
}

ojson number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

std::string mode_name(DiffMode m) { return m == DiffMode::AD ? "AD" : "FD"; }

}  // namespace

const std::vector<CheckInfo>& registered_checks() { return kChecks; }

const CheckInfo* find_check(const std::string& name) {
    for (const CheckInfo& c : kChecks)
        if (c.name == name) return &c;
    return nullptr;
}

double tolerance_for(const SuiteConfig& cfg, const CheckInfo& info) {
    if (auto it = cfg.tolerance_overrides.find(info.name); it != cfg.tolerance_overrides.end()) return it->second;
    double t = base_tolerance(cfg.tolerances, info.name, info.tier);
    return cfg.mode == DiffMode::FD ? t * 1e3 : t;
}

void validate(const SuiteConfig& cfg) {
    if (cfg.samples < 1) throw ConfigError("samples must be at least 1");
    if (cfg.geodesic_samples < 1) throw ConfigError("geodesic_samples must be at least 1");
    if (cfg.m < 1 || 2 * cfg.m + 1 > kMaxDim) throw ConfigError("m must be between 1 and 3");
    if (!(cfg.tolerances.algebraic > 0) || !(cfg.tolerances.first_order > 0) || !(cfg.tolerances.second_order > 0))
        throw ConfigError("tolerances must be positive");
    for (const std::string& c : cfg.checks)
        if (!find_check(c)) throw ConfigError("unknown check '" + c + "'");
    for (const auto& [k, v] : cfg.expectations)
        if (!find_check(k)) throw ConfigError("unknown check '" + k + "' in expectations");
    for (const auto& [k, v] : cfg.tolerance_overrides) {
        if (!find_check(k)) throw ConfigError("unknown check '" + k + "' in tolerance_overrides");
        if (!(v >= 0)) throw ConfigError("tolerance override for '" + k + "' must be non-negative");
    }
}

SuiteConfig parse_suite_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    SuiteConfig c;
    static const std::set<std::string> keys = {"structure", "m", "seed", "samples", "geodesic_samples", "tolerances",
                                               "mode", "checks", "expectations", "tolerance_overrides", "curvature",
                                               "points", "output"};
    try {
        for (auto& [k, v] : j.items())
            if (!keys.count(k)) throw ConfigError("unknown config key '" + k + "'");
        if (j.contains("structure")) c.structure = j["structure"].get<std::string>();
        if (j.contains("m")) c.m = j["m"].get<int>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("samples")) c.samples = j["samples"].get<int>();
        if (j.contains("geodesic_samples")) c.geodesic_samples = j["geodesic_samples"].get<int>();
        if (j.contains("tolerances")) {
            for (auto& [k, v] : j["tolerances"].items()) {
                if (k == "algebraic") c.tolerances.algebraic = v.get<double>();
                else if (k == "first_order") c.tolerances.first_order = v.get<double>();
                else if (k == "second_order") c.tolerances.second_order = v.get<double>();
                else throw ConfigError("unknown tolerance '" + k + "'");
            }
        }
        if (j.contains("mode")) {
            std::string m = j["mode"].get<std::string>();
            if (m == "AD") c.mode = DiffMode::AD;
            else if (m == "FD") c.mode = DiffMode::FD;
            else throw ConfigError("mode must be AD or FD");
        }
        if (j.contains("checks")) c.checks = j["checks"].get<std::vector<std::string>>();
        if (j.contains("expectations")) {
            for (auto& [k, v] : j["expectations"].items()) {
                if (v.is_boolean()) c.expectations[k] = v.get<bool>();
                else if (v == "pass") c.expectations[k] = true;
                else if (v == "fail") c.expectations[k] = false;
                else throw ConfigError("expectation for '" + k + "' must be \"pass\" or \"fail\"");
            }
        }
        if (j.contains("tolerance_overrides"))
            c.tolerance_overrides = j["tolerance_overrides"].get<std::map<std::string, double>>();
        if (j.contains("curvature")) c.curvature = j["curvature"].get<double>();
        if (j.contains("points")) c.points = j["points"].get<std::vector<std::vector<double>>>();
        if (j.contains("output")) c.output = j["output"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
    validate(c);
    return c;
}

SuiteConfig load_suite_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_suite_config(ss.str());
}

bool Report::all_expectations_met() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.matches_expectation(); });
}

Structure resolve_structure(const SuiteConfig& cfg, std::string* source) {
    const std::string& s = cfg.structure;
    if (s.size() > 5 && s.substr(s.size() - 5) == ".json") {
        if (source) *source = "spec";
        return load_structure_spec(s);
    }
    ModelKind kind;
    try {
        kind = parse_model_kind(s);
    } catch (const std::exception&) {
        throw ConfigError("unknown structure '" + s + "'");
    }
    if (source) *source = "model";
    return make_model({kind, cfg.m, 0.0});
}

std::vector<std::string> default_checks(const Structure&, std::optional<double> curvature) {
    const bool space_form = curvature && std::isfinite(*curvature);
    std::vector<std::string> out;
    for (const CheckInfo& c : kChecks) {
        if (c.needs_curvature && !space_form) continue;
        if (!space_form && (c.name == "kahler_symmetries" || c.name == "holomorphic_reconstruction" ||
                            c.name == "pseudo_einstein"))
            continue;
        out.push_back(c.name);
    }
    return out;
}

Report run_suite(const SuiteConfig& cfg) {
    validate(cfg);
    std::string source;
    Structure S = resolve_structure(cfg, &source);
    SuiteConfig eff = cfg;
    if (!eff.curvature && source == "model") {
        double c = model_curvature(parse_model_kind(cfg.structure));
        if (std::isfinite(c)) eff.curvature = c;
    }
    return run_suite(eff, S, source);
}

Report run_suite(const SuiteConfig& cfg, const Structure& S, const std::string& source) {
    validate(cfg);
    Report rep;
    rep.version = artifact_version();
    rep.structure = S.name;
    rep.source = source;
    rep.m = S.m();
    rep.bounds = S.chart.bounds();
    rep.mode = mode_name(cfg.mode);
    rep.seed = cfg.seed;
    rep.samples = cfg.samples;
    rep.tolerances = cfg.tolerances;
    rep.curvature = cfg.curvature;
    rep.calibration = S.params;

    std::vector<std::string> names = cfg.checks.empty() ? default_checks(S, cfg.curvature) : cfg.checks;
    for (const std::string& n : names) {
        const CheckInfo* info = find_check(n);
        if (!info) throw ConfigError("unknown check '" + n + "'");
        if (info->needs_curvature && !(cfg.curvature && std::isfinite(*cfg.curvature)))
            throw ConfigError("check '" + n + "' needs a space-form curvature constant");
    }

    std::vector<Vec<double>> points;
    if (cfg.points.empty()) {
        points = sample_points(S.chart, cfg.samples, cfg.seed);
    } else {
        for (const auto& q : cfg.points) {
            if (static_cast<int>(q.size()) != S.dim()) throw ConfigError("point dimension does not match the chart");
            Vec<double> v = to_vec(q);
            if (!S.chart.contains(v)) throw ConfigError("point outside the chart");
            points.push_back(v);
        }
    }
    rep.samples = static_cast<int>(points.size());
    DiffConfig diff;
    diff.mode = cfg.mode;
    Context ctx{cfg, S, diff, cfg.curvature, std::move(points), std::nullopt, std::nullopt,
                tolerance_for(cfg, *find_check("pseudo_kahler"))};

    for (const std::string& n : names) {
        const CheckInfo& info = *find_check(n);
        const std::size_t index = static_cast<std::size_t>(&info - kChecks.data());
        CheckResult r;
        r.name = n;
        r.tolerance = tolerance_for(cfg, info);
        auto it = cfg.expectations.find(n);
        r.expected = it != cfg.expectations.end() ? it->second : info.default_expected;
        Sampler rng(derived_seed(cfg.seed, index));
        auto t0 = std::chrono::steady_clock::now();
        try {
            runners().at(n)(ctx, rng, r);
        } catch (const std::exception& e) {
            r.max_residual = kInf;
            r.error = e.what();
        }
        r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        r.pass = r.max_residual <= r.tolerance;
        rep.checks.push_back(std::move(r));
    }

    try {
        const Classification& c = ctx.classification();
        rep.classification = Verdicts{c.horizontally_kahler, c.pseudo_kahler, c.sasakian_type, c.domega_pseudo_kahler, c.agrees};
    } catch (const std::exception&) {
        rep.classification.reset();
    }

    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + cfg.output);
        out << report_to_json(rep);
    }
    return rep;
}

std::string report_to_json(const Report& r, bool include_timing) {
    ojson j;
    j["schema"] = r.schema;
    j["version"] = r.version;
    ojson s;
    s["name"] = r.structure;
    s["source"] = r.source;
    s["m"] = r.m;
    s["dimension"] = 2 * r.m + 1;
    ojson b = ojson::array();
    for (const Interval& i : r.bounds) b.push_back({i.lo, i.hi});
    s["bounds"] = b;
    s["curvature"] = r.curvature ? number(*r.curvature) : ojson(nullptr);
    j["structure"] = s;
    ojson c;
    c["seed"] = r.seed;
    c["samples"] = r.samples;
    c["mode"] = r.mode;
    c["tolerances"] = {{"algebraic", r.tolerances.algebraic},
                       {"first_order", r.tolerances.first_order},
                       {"second_order", r.tolerances.second_order}};
    j["config"] = c;
    ojson checks = ojson::array();
    int passed = 0, matched = 0;
    for (const CheckResult& k : r.checks) {
        ojson e;
        e["name"] = k.name;
        e["max_residual"] = number(k.max_residual);
        e["tolerance"] = k.tolerance;
        e["pass"] = k.pass;
        e["expected"] = k.expected ? "pass" : "fail";
        e["sample_count"] = k.sample_count;
        if (include_timing) e["wall_time_ms"] = k.wall_time_ms;
        if (!k.values.empty()) {
            ojson v;
            for (const auto& [name, x] : k.values) v[name] = number(x);
            e["values"] = v;
        }
        if (!k.error.empty()) e["error"] = k.error;
        checks.push_back(e);
        passed += k.pass;
        matched += k.matches_expectation();
    }
    j["checks"] = checks;
    if (r.classification) {
        const Verdicts& v = *r.classification;
        j["classification"] = {{"horizontally_kahler", v.horizontally_kahler},
                               {"pseudo_kahler", v.pseudo_kahler},
                               {"sasakian_type", v.sasakian_type},
                               {"domega_pseudo_kahler", v.domega_pseudo_kahler},
                               {"agrees", v.agrees}};
    } else {
        j["classification"] = nullptr;
    }
    ojson cal = ojson::object();
    for (const auto& [k, v] : r.calibration) cal[k] = number(v);
    j["calibration"] = cal;
    if (!r.sweep_columns.empty()) {
        ojson sw;
        sw["columns"] = r.sweep_columns;
        ojson rows = ojson::array();
        for (const auto& row : r.sweep_rows) {
            ojson jr = ojson::array();
            for (double x : row) jr.push_back(number(x));
            rows.push_back(jr);
        }
        sw["rows"] = rows;
        j["sweep"] = sw;
    }
    j["summary"] = {{"checks", r.checks.size()},
                    {"passed", passed},
                    {"expectations_met", matched == static_cast<int>(r.checks.size())}};
    return j.dump(2) + "\n";
}

}  // namespace crgeo
