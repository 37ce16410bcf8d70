#include "crgeo/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "detail.hpp"

namespace crgeo {

namespace {

using State = std::vector<double>;
using Rhs = std::function<State(const State&)>;

struct Leaves {};

kernel::Tensor3<double> gamma_at(const Structure& S, const Vec<double>& x, const DiffConfig& cfg) {
    if (!S.chart.contains(x)) throw Leaves{};
    return kernel::christoffel(detail::ctx_at(S, x, cfg), x);
}

Partials<kernel::Tensor3<double>> gamma_jet_at(const Structure& S, const Vec<double>& x, const DiffConfig& cfg) {
    if (!S.chart.contains(x)) throw Leaves{};
    auto j = kernel::christoffel_jet(detail::ctx_at(S, x, cfg), x);
    j.value.n = x.n;
    for (auto& d : j.d) d.n = x.n;
    return j;
}

State axpy(const State& a, double h, const State& b) {
    State r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += h * b[i];
    return r;
}

// One classical RK4 step; throws Leaves if a stage leaves the chart.
State rk4(const Rhs& f, const State& y, double h) {
    State k1 = f(y);
    State k2 = f(axpy(y, 0.5 * h, k1));
    State k3 = f(axpy(y, 0.5 * h, k2));
    State k4 = f(axpy(y, h, k3));
    State r = y;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (double v : r)
        if (!std::isfinite(v) || std::abs(v) > 1e12) throw NumericalError("geodesic integration step exploded");
    return r;
}

Vec<double> slice(const State& s, int off, int n) {
    Vec<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = s[static_cast<std::size_t>(off + i)];
    return v;
}

void put(State& s, int off, const Vec<double>& v) {
    for (int i = 0; i < v.n; ++i) s[static_cast<std::size_t>(off + i)] = v[i];
}

// Gamma(a, b) with contravariant a (direction) and b: Gamma^k_{ij} a^i b^j
Vec<double> contract(const kernel::Tensor3<double>& G, const Vec<double>& a, const Vec<double>& b) {
    const int n = a.n;
    Vec<double> out(n);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += G(k, i, j) * a[i] * b[j];
        out[k] = s;
    }
    return out;
}

int default_steps(double t_end, int steps) {
    if (steps > 0) return steps;
    return std::max(1, static_cast<int>(std::ceil(kStepsPerUnit * std::abs(t_end) - 1e-9)));
}

// Integrates (x, v, extra) along the geodesic; `extra` derivative receives x, v, Gamma at x and the extra block.
struct Driver {
    const Structure& S;
    DiffConfig cfg;
    int n;
    std::function<void(const Vec<double>&, const Vec<double>&, const State&, std::size_t, State&)> extra;
    bool jet = false;

    State rhs(const State& y) const {
        Vec<double> x = slice(y, 0, n), v = slice(y, n, n);
        State d(y.size(), 0.0);
        put(d, 0, v);
        kernel::Tensor3<double> G;
        if (jet) {
            auto j = gamma_jet_at(S, x, cfg);
            jet_cache = j;
            G = j.value;
        } else {
            G = gamma_at(S, x, cfg);
        }
        gam_cache = G;
        put(d, n, -contract(G, v, v));
        if (extra) extra(x, v, y, static_cast<std::size_t>(2 * n), d);
        return d;
    }
    mutable kernel::Tensor3<double> gam_cache;
    mutable Partials<kernel::Tensor3<double>> jet_cache;
};

template <class OnStep>
GeodesicPath drive(const Driver& drv, const Vec<double>& p, const Vec<double>& u, double t_end, int steps, State y0,
                   const OnStep& on_step) {
    const int n = p.n;
    GeodesicPath path;
    path.base = p;
    path.initial_velocity = u;
    steps = default_steps(t_end, steps);
    path.dt = t_end / steps;
    State y(static_cast<std::size_t>(2 * n) + y0.size());
    put(y, 0, p);
    put(y, n, u);
    std::copy(y0.begin(), y0.end(), y.begin() + 2 * n);
    path.times.push_back(0.0);
    path.points.push_back(p);
    path.velocities.push_back(u);
    on_step(y);
    Rhs f = [&](const State& s) { return drv.rhs(s); };
    for (int k = 1; k <= steps; ++k) {
        try {
            y = rk4(f, y, path.dt);
        } catch (const Leaves&) {
            path.truncated = true;
            break;
        }
        Vec<double> x = slice(y, 0, n);
        if (!drv.S.chart.contains(x)) {
            path.truncated = true;
            break;
        }
        path.times.push_back(k * path.dt);
        path.points.push_back(x);
        path.velocities.push_back(slice(y, n, n));
        on_step(y);
    }
    return path;
}

Mat<double> metric_at(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) { return metric_matrix(S, p, cfg); }

Mat<double> real_frame_matrix(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    AdaptedFrame f = adapted_frame(S, p, {}, cfg);
    const int n = p.n;
    Mat<double> F(n, n);
    for (int i = 0; i < n; ++i) F.set_col(i, f.real_vec(i));
    return F;
}

}  // namespace

GeodesicPath integrate_geodesic(const Structure& S, const Vec<double>& p, const Vec<double>& u, double t_end,
                                int steps, const DiffConfig& cfg) {
    S.chart.require_inside(p);
    Driver drv{S, cfg, p.n, {}, false, {}, {}};
    return drive(drv, p, u, t_end, steps, {}, [](const State&) {});
}

Vec<double> exp_map(const Structure& S, const Vec<double>& p, const Vec<double>& u, const DiffConfig& cfg) {
    GeodesicPath g = integrate_geodesic(S, p, u, 1.0, 0, cfg);
    if (g.truncated) throw DomainError("geodesic leaves the chart before t = 1");
    return g.end();
}

Mat<double> exp_jacobian(const Structure& S, const Vec<double>& p, const Vec<double>& u, double h,
                         const DiffConfig& cfg) {
    const int n = p.n;
    Mat<double> Jm(n, n);
    for (int j = 0; j < n; ++j) {
        Vec<double> up = u, um = u;
        up[j] += h;
        um[j] -= h;
        Vec<double> d = (1.0 / (2.0 * h)) * (exp_map(S, p, up, cfg) - exp_map(S, p, um, cfg));
        Jm.set_col(j, d);
    }
    return Jm;
}

Vec<double> log_map(const Structure& S, const Vec<double>& p, const Vec<double>& q, const DiffConfig& cfg,
                    const LogOptions& opt) {
    S.chart.require_inside(p);
    S.chart.require_inside(q);
    const int n = p.n;
    Vec<double> u = opt.guess ? *opt.guess : q - p;
    auto residual = [&](const Vec<double>& w, Vec<double>& r) {
        try {
            r = exp_map(S, p, w, cfg) - q;
            return max_abs(r);
        } catch (const DomainError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    Vec<double> r(n);
    double err = residual(u, r);
    const double scale = 1.0 + max_abs(q);
    for (int it = 0; it < opt.max_iterations && std::isfinite(err); ++it) {
        if (err <= opt.tolerance * scale) return u;
        Mat<double> Jm;
        try {
            Jm = opt.jacobian ? *opt.jacobian : exp_jacobian(S, p, u, opt.fd_step, cfg);
        } catch (const DomainError&) {
            break;
        }
        Vec<double> du;
        try {
            du = solve(Jm, r, 1e-14);
        } catch (const SingularMatrix&) {
            break;
        }
        double step = 1.0;
        Vec<double> trial = u - du, rt(n);
        double et = residual(trial, rt);
        for (int k = 0; k < 30 && !(et < err); ++k) {
            step *= 0.5;
            trial = u - step * du;
            et = residual(trial, rt);
        }
        if (!(et < err)) {
            if (err <= 1e3 * opt.tolerance * scale) return u;
            break;
        }
        u = trial;
        r = rt;
        err = et;
    }
    if (std::isfinite(err) && err <= opt.tolerance * scale) return u;
    throw NumericalError("outside normal neighborhood");
}

TransportOperator parallel_transport(const Structure& S, const GeodesicPath& path, const DiffConfig& cfg) {
    const int n = path.base.n;
    TransportOperator T;
    Driver drv{S, cfg, n, {}, false, {}, {}};
    drv.extra = [&](const Vec<double>&, const Vec<double>& v, const State& y, std::size_t off, State& d) {
        for (int c = 0; c < n; ++c) {
            Vec<double> w = slice(y, static_cast<int>(off) + c * n, n);
            put(d, static_cast<int>(off) + c * n, -contract(drv.gam_cache, v, w));
        }
    };
    State y0(static_cast<std::size_t>(n * n), 0.0);
    for (int c = 0; c < n; ++c) y0[static_cast<std::size_t>(c * n + c)] = 1.0;
    const double t_end = path.dt * path.steps();
    T.path = drive(drv, path.base, path.initial_velocity, t_end, path.steps(), y0, [&](const State& y) {
        Mat<double> M(n, n);
        for (int c = 0; c < n; ++c) M.set_col(c, slice(y, 2 * n + c * n, n));
        T.matrices.push_back(M);
    });
    return T;
}

std::vector<Vec<double>> transport_vector(const Structure& S, const GeodesicPath& path, const Vec<double>& v0,
                                          const DiffConfig& cfg) {
    TransportOperator T = parallel_transport(S, path, cfg);
    std::vector<Vec<double>> out;
    for (std::size_t k = 0; k < T.matrices.size(); ++k) out.push_back(T.apply(k, v0));
    return out;
}

namespace {

// Tor^k_{ij} and (nabla_X Tor)^k(Y, Z) from a Christoffel jet.
Vec<double> tor_of(const kernel::Tensor3<double>& G, const Vec<double>& Y, const Vec<double>& Z) {
    return contract(G, Y, Z) - contract(G, Z, Y);
}

Vec<double> nabla_tor(const Partials<kernel::Tensor3<double>>& j, const Vec<double>& X, const Vec<double>& Y,
                      const Vec<double>& Z) {
    const int n = X.n;
    const auto& G = j.value;
    Vec<double> out(n);
    for (int a = 0; a < n; ++a) {
        if (X[a] == 0.0) continue;
        out += X[a] * tor_of(j.d[static_cast<std::size_t>(a)], Y, Z);
    }
    // connection terms
    Vec<double> t = tor_of(G, Y, Z);
    out += contract(G, X, t);
    out -= tor_of(G, contract(G, X, Y), Z);
    out -= tor_of(G, Y, contract(G, X, Z));
    return out;
}

Vec<double> riemann_apply(const std::vector<double>& R, const Vec<double>& X, const Vec<double>& Y,
                          const Vec<double>& Z) {
    const int n = X.n;
    Vec<double> out(n);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int c = 0; c < n; ++c)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) s += R[static_cast<std::size_t>(((k * n + c) * n + a) * n + b)] * Z[c] * X[a] * Y[b];
        out[k] = s;
    }
    return out;
}

}  // namespace

Vec<double> torsion_derivative(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                               const Vec<double>& Z, const DiffConfig& cfg) {
    S.chart.require_inside(p);
    return nabla_tor(gamma_jet_at(S, p, cfg), X, Y, Z);
}

JacobiField jacobi_field(const Structure& S, const GeodesicPath& path, const Vec<double>& V0,
                         const Vec<double>& V0prime, const DiffConfig& cfg) {
    const int n = path.base.n;
    S.chart.require_inside(path.base);
    JacobiField J;
    Mat<double> F0 = real_frame_matrix(S, path.base, cfg);
    Mat<double> F0inv = inverse(F0);
    // State after (x, v): frame columns (n*n), y (n), y' (n).
    const int off_y = n * n, off_yp = n * n + n;
    Driver drv{S, cfg, n, {}, true, {}, {}};
    drv.extra = [&](const Vec<double>&, const Vec<double>& v, const State& s, std::size_t off, State& d) {
        const int o = static_cast<int>(off);
        Mat<double> P(n, n);
        for (int c = 0; c < n; ++c) {
            Vec<double> w = slice(s, o + c * n, n);
            P.set_col(c, w);
            put(d, o + c * n, -contract(drv.gam_cache, v, w));
        }
        Vec<double> y = slice(s, o + off_y, n), yp = slice(s, o + off_yp, n);
        Vec<double> V = matvec(P, y), Vp = matvec(P, yp);
        auto R = kernel::riemann_from(drv.jet_cache);
        Vec<double> rhs = riemann_apply(R, v, V, v) + nabla_tor(drv.jet_cache, v, v, V) + tor_of(drv.gam_cache, v, Vp);
        put(d, o + off_y, yp);
        put(d, o + off_yp, solve(P, rhs, 1e-14));
    };
    State y0(static_cast<std::size_t>(n * n + 2 * n), 0.0);
    for (int c = 0; c < n; ++c)
        for (int i = 0; i < n; ++i) y0[static_cast<std::size_t>(c * n + i)] = F0(i, c);
    Vec<double> c0 = matvec(F0inv, V0), c1 = matvec(F0inv, V0prime);
    for (int i = 0; i < n; ++i) {
        y0[static_cast<std::size_t>(off_y + i)] = c0[i];
        y0[static_cast<std::size_t>(off_yp + i)] = c1[i];
    }
    const double t_end = path.dt * path.steps();
    J.path = drive(drv, path.base, path.initial_velocity, t_end, path.steps(), y0, [&](const State& s) {
        Mat<double> P(n, n);
        for (int c = 0; c < n; ++c) P.set_col(c, slice(s, 2 * n + c * n, n));
        Vec<double> y = slice(s, 2 * n + off_y, n);
        J.frames.push_back(P);
        J.y.push_back(y);
        J.yprime.push_back(slice(s, 2 * n + off_yp, n));
        J.V.push_back(matvec(P, y));
    });
    return J;
}

Mat<double> frame_rotation(int m, double phi) {
    const int n = 2 * m + 1;
    Mat<double> U = Mat<double>::identity(n);
    // eta -> e^{i phi} eta means e -> cos e + sin Je, Je -> -sin e + cos Je.
    const double c = std::cos(phi), s = std::sin(phi);
    U(1, 1) = c;
    U(1 + m, 1) = s;
    U(1, 1 + m) = -s;
    U(1 + m, 1 + m) = c;
    return U;
}

Mat<double> frame_map(const Structure& S, const Vec<double>& p, const Structure& St, const Vec<double>& pt,
                      const std::optional<Mat<double>>& U, const DiffConfig& cfg) {
    Mat<double> F = real_frame_matrix(S, p, cfg);
    Mat<double> Ft = real_frame_matrix(St, pt, cfg);
    Mat<double> mid = U ? *U : Mat<double>::identity(p.n);
    return matmul(Ft, matmul(mid, inverse(F)));
}

double LinearIsometryResidual::max() const { return std::max({metric, J, xi}); }

LinearIsometryResidual linear_isometry_residual(const Structure& S, const Vec<double>& p, const Structure& St,
                                                const Vec<double>& pt, const Mat<double>& A, const DiffConfig& cfg) {
    LinearIsometryResidual r;
    Mat<double> G = metric_at(S, p, cfg), Gt = metric_at(St, pt, cfg);
    Mat<double> pull = matmul(transpose(A), matmul(Gt, A));
    Mat<double> dJ = matmul(A, S.J(p));
    Mat<double> Jd = matmul(St.J(pt), A);
    for (int i = 0; i < p.n * p.n; ++i) {
        r.metric = std::max(r.metric, std::abs(pull.a[i] - G.a[i]));
        r.J = std::max(r.J, std::abs(dJ.a[i] - Jd.a[i]));
    }
    r.xi = max_abs(matvec(A, reeb_field(S, p, cfg)) - reeb_field(St, pt, cfg));
    return r;
}

Mat<double> phi_t(const IsometryCandidate& c, const Vec<double>& u, double t, const DiffConfig& cfg) {
    GeodesicPath g = integrate_geodesic(c.source, c.p, u, t, 0, cfg);
    GeodesicPath gt = integrate_geodesic(c.target, c.pt, matvec(c.rho, u), t, g.steps(), cfg);
    if (g.truncated || gt.truncated) throw DomainError("geodesic leaves the chart");
    Mat<double> P = parallel_transport(c.source, g, cfg).final();
    Mat<double> Pt = parallel_transport(c.target, gt, cfg).final();
    return matmul(Pt, matmul(c.rho, inverse(P)));
}

Vec<double> cartan_map(const IsometryCandidate& c, const Vec<double>& q, const DiffConfig& cfg) {
    Vec<double> u = log_map(c.source, c.p, q, cfg);
    return exp_map(c.target, c.pt, matvec(c.rho, u), cfg);
}

double IsometryReport::max_isometry_residual() const {
    return std::max({metric_residual, J_residual, theta_residual});
}

IsometryReport isometry_report(const IsometryCandidate& c, int samples, std::uint64_t seed, const DiffConfig& cfg) {
    Sampler rng(seed);
    Mat<double> G = metric_at(c.source, c.p, cfg);
    std::vector<Vec<double>> pts;
    for (int i = 0; i < samples; ++i) pts.push_back(exp_map(c.source, c.p, rng.ball(G, c.radius), cfg));
    return isometry_report(c, pts, cfg);
}

IsometryReport isometry_report(const IsometryCandidate& c, const std::vector<Vec<double>>& points,
                               const DiffConfig& cfg) {
    IsometryReport rep;
    rep.samples = points;
    const int n = c.p.n;
    const double h = 1e-4;

    // f with a warm-started chord solve around a base solution.
    struct Local {
        Vec<double> u;
        Mat<double> Jm;
    };
    auto solve_at = [&](const Vec<double>& q) {
        Local L;
        L.u = log_map(c.source, c.p, q, cfg);
        L.Jm = exp_jacobian(c.source, c.p, L.u, 1e-5, cfg);
        return L;
    };
    auto f_near = [&](const Local& L, const Vec<double>& q) {
        LogOptions o;
        o.guess = L.u;
        o.jacobian = L.Jm;
        Vec<double> u = log_map(c.source, c.p, q, cfg, o);
        return exp_map(c.target, c.pt, matvec(c.rho, u), cfg);
    };
    auto df_at = [&](const Local& L, const Vec<double>& q) {
        Mat<double> D(n, n);
        for (int j = 0; j < n; ++j) {
            Vec<double> qp = q, qm = q;
            qp[j] += h;
            qm[j] -= h;
            D.set_col(j, (1.0 / (2.0 * h)) * (f_near(L, qp) - f_near(L, qm)));
        }
        return D;
    };

    {
        Local L{Vec<double>(n), exp_jacobian(c.source, c.p, Vec<double>(n), 1e-5, cfg)};
        Mat<double> D = df_at(L, c.p);
        for (int i = 0; i < n * n; ++i) rep.df_p_vs_rho = std::max(rep.df_p_vs_rho, std::abs(D.a[i] - c.rho.a[i]));
    }

    for (const Vec<double>& q : points) {
        Local L = solve_at(q);
        Vec<double> fq = exp_map(c.target, c.pt, matvec(c.rho, L.u), cfg);
        Mat<double> D = df_at(L, q);
        Mat<double> G = metric_at(c.source, q, cfg), Gt = metric_at(c.target, fq, cfg);
        Mat<double> pull = matmul(transpose(D), matmul(Gt, D));
        Mat<double> a = matmul(D, c.source.J(q)), b = matmul(c.target.J(fq), D);
        Vec<double> th = c.source.theta(q), tht = c.target.theta(fq);
        Vec<double> pth = matvec(transpose(D), tht);
        for (int i = 0; i < n * n; ++i) {
            rep.metric_residual = std::max(rep.metric_residual, std::abs(pull.a[i] - G.a[i]));
            rep.J_residual = std::max(rep.J_residual, std::abs(a.a[i] - b.a[i]));
        }
        rep.theta_residual = std::max(rep.theta_residual, max_abs(pth - th));

        // Theorem hypotheses through phi_1 along gamma_u.
        Mat<double> phi = phi_t(c, L.u, 1.0, cfg);
        rep.phi_isometry = std::max(rep.phi_isometry, linear_isometry_residual(c.source, q, c.target, fq, phi, cfg).max());
        CurvatureData R = curvature_components(c.source, q, cfg);
        CurvatureData Rt = curvature_components(c.target, fq, cfg);
        AdaptedFrame fr = adapted_frame(c.source, q, {}, cfg);
        std::vector<Vec<double>> B, Bt;
        for (int i = 0; i < n; ++i) {
            B.push_back(fr.real_vec(i));
            Bt.push_back(matvec(phi, B.back()));
        }
        auto jq = gamma_jet_at(c.source, q, cfg);
        auto jt = gamma_jet_at(c.target, fq, cfg);
        GeodesicPath g = integrate_geodesic(c.source, c.p, L.u, 1.0, 0, cfg);
        const Vec<double> T = g.velocities.back();
        const Vec<double> Tt = matvec(phi, T);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Vec<double> t1 = tor_of(jq.value, B[i], B[j]);
                Vec<double> t2 = tor_of(jt.value, Bt[i], Bt[j]);
                Vec<double> d1 = nabla_tor(jq, T, B[i], B[j]);
                Vec<double> d2 = nabla_tor(jt, Tt, Bt[i], Bt[j]);
                for (int k = 0; k < n; ++k) {
                    rep.torsion_hypothesis = std::max(
                        rep.torsion_hypothesis, std::abs(bilinear(R.g, t1, B[k]) - bilinear(Rt.g, t2, Bt[k])));
                    rep.torsion_transfer = std::max(
                        rep.torsion_transfer, std::abs(bilinear(R.g, d1, B[k]) - bilinear(Rt.g, d2, Bt[k])));
                    for (int l = 0; l < n; ++l)
                        rep.curvature_hypothesis =
                            std::max(rep.curvature_hypothesis,
                                     std::abs(R.scalar(B[i], B[j], B[k], B[l]) - Rt.scalar(Bt[i], Bt[j], Bt[k], Bt[l])));
                }
            }
    }
    rep.hypotheses_hold = rep.curvature_hypothesis <= rep.hypothesis_tol && rep.torsion_hypothesis <= rep.hypothesis_tol;
    return rep;
}

}  // namespace crgeo
