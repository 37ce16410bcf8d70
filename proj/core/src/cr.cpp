#include "crgeo/cr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "detail.hpp"

namespace crgeo {

namespace detail {

kernel::Ctx ctx_for(const Structure& S, const AdaptedFrame& f, const DiffConfig& cfg) {
    kernel::Ctx c{&S, cfg, f.pivots};
    if (!f.analytic && c.pivots.empty()) c.pivots = choose_pivots(S, f.base, cfg);
    return c;
}

kernel::Ctx ctx_at(const Structure& S, const Vec<double>& p, const DiffConfig& cfg, bool prefer_analytic) {
    kernel::Ctx c{&S, cfg, {}};
    if (!(prefer_analytic && S.frame)) c.pivots = choose_pivots(S, p, cfg);
    return c;
}

AdaptedFrame frame_from_local(const kernel::Local<double>& L, const kernel::Ctx& c, const Vec<double>& p) {
    AdaptedFrame f;
    const int n = p.n;
    const int m = (n - 1) / 2;
    f.base = p;
    f.eta0 = L.xi;
    f.E = L.E;
    f.coframe = L.C;
    f.pivots = c.pivots;
    f.analytic = c.pivots.empty();
    const double s2 = std::sqrt(2.0);
    for (int a = 0; a < m; ++a) {
        CVec<double> eta = L.E.col(1 + a);
        f.eta.push_back(eta);
        f.etabar.push_back(L.E.col(1 + m + a));
        f.e.push_back(s2 * real_part(eta));
        f.Je.push_back(-s2 * imag_part(eta));
    }
    return f;
}

}  // namespace detail

Vec<double> AdaptedFrame::real_vec(int i) const {
    const int mm = m();
    if (i == 0) return eta0;
    if (i <= mm) return e[static_cast<std::size_t>(i - 1)];
    return Je[static_cast<std::size_t>(i - 1 - mm)];
}

namespace {

kernel::Ctx bare(const Structure& S, const DiffConfig& cfg) { return kernel::Ctx{&S, cfg, {}}; }

struct Basic {
    Vec<double> th, xi;
    Mat<double> J, H;
};

Basic basic_at(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    S.chart.require_inside(p);
    Basic b;
    auto c = bare(S, cfg);
    b.th = S.theta(p);
    b.xi = kernel::reeb_at(c, p, b.th);
    b.J = S.J(p);
    b.H = S.h(p);
    return b;
}

Mat<double> metric_of(const Basic& b) {
    kernel::Local<double> L;
    L.th = b.th;
    L.xi = b.xi;
    L.H = b.H;
    return detail::metric_matrix_of(L);
}

}  // namespace

Vec<double> reeb_field(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    return basic_at(S, p, cfg).xi;
}

Vec<double> project_H(const Structure& S, const Vec<double>& p, const Vec<double>& v, const DiffConfig& cfg) {
    Basic b = basic_at(S, p, cfg);
    return kernel::proj_H(b.th, b.xi, v);
}

CVec<double> project(const Structure& S, const Vec<double>& p, const CVec<double>& v, Projection which,
                     const DiffConfig& cfg) {
    Basic b = basic_at(S, p, cfg);
    const int n = p.n;
    Cx<double> t = apply(b.th, v);
    CVec<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = v[i] - t * b.xi[i];
    switch (which) {
        case Projection::H: return h;
        case Projection::zero: {
            CVec<double> z(n);
            for (int i = 0; i < n; ++i) z[i] = t * b.xi[i];
            return z;
        }
        case Projection::plus:
        case Projection::minus: {
            CVec<double> jh = matvec(b.J, h);
            const double sgn = which == Projection::plus ? -1.0 : 1.0;
            CVec<double> out(n);
            for (int i = 0; i < n; ++i) out[i] = (h[i] + sgn * times_i(jh[i])) * 0.5;
            return out;
        }
    }
    return h;
}

Mat<double> metric_matrix(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    return metric_of(basic_at(S, p, cfg));
}

double metric(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
              const DiffConfig& cfg) {
    return bilinear(metric_matrix(S, p, cfg), X, Y);
}

Cx<double> metric(const Structure& S, const Vec<double>& p, const CVec<double>& X, const CVec<double>& Y,
                  const DiffConfig& cfg) {
    return bilinear(metric_matrix(S, p, cfg), X, Y);
}

namespace {

double horizontal_tol(const Vec<double>& X) {
    double s = 0.0;
    for (int i = 0; i < X.n; ++i) s = std::max(s, std::abs(X[i]));
    return 1e-8 * (1.0 + s);
}

}  // namespace

double levi_form(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                 const DiffConfig& cfg) {
    Basic b = basic_at(S, p, cfg);
    if (std::abs(dot(b.th, X)) > horizontal_tol(X) || std::abs(dot(b.th, Y)) > horizontal_tol(Y))
        throw ContractViolation("levi_form arguments must be horizontal");
    Mat<double> W = kernel::dtheta_at(bare(S, cfg), p);
    return bilinear(W, X, matvec(b.J, Y));
}

Cx<double> levi_form(const Structure& S, const Vec<double>& p, const CVec<double>& X, const CVec<double>& Y,
                     const DiffConfig& cfg) {
    Basic b = basic_at(S, p, cfg);
    auto horiz = [&](const CVec<double>& Z) {
        Cx<double> t = apply(b.th, Z);
        return primal_abs(t) <= horizontal_tol(real_part(Z)) + horizontal_tol(imag_part(Z));
    };
    if (!horiz(X) || !horiz(Y)) throw ContractViolation("levi_form arguments must be horizontal");
    Mat<double> W = kernel::dtheta_at(bare(S, cfg), p);
    return bilinear(W, X, matvec(b.J, Y));
}

Mat<double> kahler_matrix(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    Basic b = basic_at(S, p, cfg);
    return matmul(transpose(b.J), metric_of(b));
}

double kahler_form(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                   const DiffConfig& cfg) {
    return bilinear(kahler_matrix(S, p, cfg), X, Y);
}

TwoFormField kahler_form_field(const Structure& S, const DiffConfig& cfg) {
    const Structure* sp = &S;
    return TwoFormField([sp, cfg](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        if constexpr (dual_depth<T>::value >= 4) {
            throw NumericalError("kahler form field differentiated beyond the supported order");
            return Mat<T>(x.n, x.n);
        } else {
            kernel::Ctx c{sp, cfg, {}};
            kernel::Local<T> L;
            L.th = sp->theta(x);
            L.xi = kernel::reeb_at(c, x, L.th);
            L.H = sp->h(x);
            Mat<T> J = sp->J(x);
            return matmul(transpose(J), detail::metric_matrix_of(L));
        }
    });
}

std::vector<int> choose_pivots(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    Basic b = basic_at(S, p, cfg);
    const int n = p.n;
    const int m = (n - 1) / 2;
    std::vector<int> piv;
    std::vector<Vec<double>> basis;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    // Greedy: the coordinate direction keeping the largest share of its h-norm after projection.
    while (static_cast<int>(piv.size()) < m) {
        int best = -1;
        double best_ratio = 0.0;
        Vec<double> best_v;
        for (int idx = 0; idx < n; ++idx) {
            if (used[static_cast<std::size_t>(idx)]) continue;
            Vec<double> v(n);
            v[idx] = 1.0;
            v = kernel::proj_H(b.th, b.xi, v);
            const double n0 = bilinear(b.H, v, v);
            if (!(n0 > 1e-16)) continue;
            for (const Vec<double>& q : basis) {
                double s = bilinear(b.H, q, v);
                for (int i = 0; i < n; ++i) v[i] -= s * q[i];
            }
            const double nn = bilinear(b.H, v, v);
            if (!(nn > 1e-16)) continue;
            const double ratio = nn / n0;
            if (ratio > best_ratio) {
                best = idx;
                best_ratio = ratio;
                best_v = v;
            }
        }
        if (best < 0) break;
        used[static_cast<std::size_t>(best)] = true;
        Vec<double> e = (1.0 / std::sqrt(bilinear(b.H, best_v, best_v))) * best_v;
        basis.push_back(e);
        basis.push_back(kernel::proj_H(b.th, b.xi, matvec(b.J, e)));
        piv.push_back(best);
    }
    if (static_cast<int>(piv.size()) < m) throw StructureError("frame pivot failure; supply analytic frame");
    return piv;
}

AdaptedFrame adapted_frame(const Structure& S, const Vec<double>& p, const FrameOptions& opt, const DiffConfig& cfg) {
    S.chart.require_inside(p);
    kernel::Ctx c = detail::ctx_at(S, p, cfg, opt.prefer_analytic);
    return detail::frame_from_local(kernel::local_at(c, p), c, p);
}

AdaptedFrame extend_frame(const Structure& S, const AdaptedFrame& germ, const Vec<double>& q, const DiffConfig& cfg) {
    S.chart.require_inside(q);
    kernel::Ctx c = detail::ctx_for(S, germ, cfg);
    return detail::frame_from_local(kernel::local_at(c, q), c, q);
}

}  // namespace crgeo

namespace crgeo {

double StructureInvariants::algebraic() const {
    return std::max({almost_contact, J_xi, theta_J, reeb_normalization, h_invariance});
}

double StructureInvariants::first_order() const {
    return std::max({ixi_dtheta, lie_xi_theta, integrability, volume, first_structure});
}

namespace {

double determinant(Mat<double> A) {
    const int n = A.r;
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
        if (A(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            det = -det;
        }
        det *= A(k, k);
        for (int i = k + 1; i < n; ++i) {
            double f = A(i, k) / A(k, k);
            for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
        }
    }
    return det;
}

// sum over permutations of sgn * theta_{s0} * prod Omega_{s(2k+1) s(2k+2)}
double theta_omega_top(const Vec<double>& th, const Mat<double>& Om) {
    const int n = th.n;
    std::vector<int> s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), 0);
    double total = 0.0;
    do {
        int inv = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) inv += s[i] > s[j];
        double v = th[s[0]];
        for (int k = 1; k + 1 < n; k += 2) v *= Om(s[k], s[k + 1]);
        total += (inv % 2 ? -v : v);
    } while (std::next_permutation(s.begin(), s.end()));
    return total;
}

}  // namespace

StructureInvariants structure_invariants(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    S.chart.require_inside(p);
    const int n = p.n;
    const int m = (n - 1) / 2;
    kernel::Ctx c = detail::ctx_at(S, p, cfg);
    kernel::Jet<double> jet = kernel::local_jet(c, p);
    const kernel::Local<double>& L = jet.L;
    StructureInvariants r;

    Mat<double> J2 = matmul(L.J, L.J);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r.almost_contact = std::max(r.almost_contact,
                                        std::abs(J2(i, j) + (i == j ? 1.0 : 0.0) - L.xi[i] * L.th[j]));
    r.J_xi = max_abs(matvec(L.J, L.xi));
    r.theta_J = max_abs(matvec(transpose(L.J), L.th));
    r.reeb_normalization = std::abs(dot(L.th, L.xi) - 1.0);

    // Euclidean-orthonormal basis of H from projected coordinate vectors.
    std::vector<Vec<double>> B;
    for (int idx = 0; idx < n && static_cast<int>(B.size()) < 2 * m; ++idx) {
        Vec<double> v(n);
        v[idx] = 1.0;
        v = kernel::proj_H(L.th, L.xi, v);
        for (const Vec<double>& b : B) v = v - dot(b, v) * b;
        double nv = norm(v);
        if (nv > 1e-6) B.push_back((1.0 / nv) * v);
    }
    auto hb = [&](const Vec<double>& X, const Vec<double>& Y) { return kernel::h_of(L, X, Y); };
    for (const Vec<double>& X : B)
        for (const Vec<double>& Y : B)
            r.h_invariance = std::max(r.h_invariance,
                                      std::abs(hb(matvec(L.J, X), matvec(L.J, Y)) - hb(X, Y)));
    {
        const int k = static_cast<int>(B.size());
        Mat<double> G(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) G(i, j) = hb(B[i], B[j]);
        double minp = k < 2 * m ? 0.0 : std::numeric_limits<double>::infinity();
        for (int j = 0; j < k && minp > 0.0; ++j) {
            double d = G(j, j);
            for (int q = 0; q < j; ++q) d -= G(j, q) * G(j, q);
            minp = std::min(minp, d);
            if (d <= 0.0) break;
            double s = std::sqrt(d);
            G(j, j) = s;
            for (int i = j + 1; i < k; ++i) {
                double v = G(i, j);
                for (int q = 0; q < j; ++q) v -= G(i, q) * G(j, q);
                G(i, j) = v / s;
            }
        }
        r.h_min_pivot = minp;
    }

    Mat<double> W(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) W(i, j) = 0.5 * (jet.d[i].th[j] - jet.d[j].th[i]);
    Vec<double> ixi = matvec(transpose(W), L.xi);
    r.ixi_dtheta = max_abs(ixi);
    for (int i = 0; i < n; ++i) {
        double dthxi = dot(jet.d[i].th, L.xi) + dot(L.th, jet.d[i].xi);
        r.lie_xi_theta = std::max(r.lie_xi_theta, std::abs(2.0 * ixi[i] + dthxi));
    }

    for (int a = 1; a <= m; ++a) {
        for (int b = 1; b <= m; ++b) {
            CVec<double> v = kernel::bracket_cols(jet, a, b);
            Cx<double> t = apply(L.th, v);
            CVec<double> h(n);
            for (int i = 0; i < n; ++i) h[i] = v[i] - t * L.xi[i];
            CVec<double> jh = matvec(L.J, h);
            for (int i = 0; i < n; ++i)
                r.integrability = std::max(r.integrability, primal_abs((h[i] + times_i(jh[i])) * 0.5));
        }
    }

    Mat<double> G = detail::metric_matrix_of(L);
    Mat<double> Om = matmul(transpose(L.J), G);
    double fact = 1.0;
    for (int k = 2; k <= m; ++k) fact *= k;
    const double expected = fact * std::pow(2.0, m) * std::sqrt(determinant(G));
    r.volume = std::abs(std::abs(theta_omega_top(L.th, Om)) - expected) / expected;

    CMat<double> levi(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            levi(a, b) = bilinear(W, L.E.col(1 + a), matvec(L.J, L.E.col(1 + m + b)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Cx<double> s(0.0);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    s += levi(a, b) * (L.C(1 + a, i) * L.C(1 + m + b, j) - L.C(1 + a, j) * L.C(1 + m + b, i));
            r.first_structure = std::max(r.first_structure, primal_abs(times_i(s) - Cx<double>(W(i, j))));
        }
    }
    return r;
}

}  // namespace crgeo
