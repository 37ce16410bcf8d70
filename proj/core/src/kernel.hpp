#pragma once

// Pointwise geometry of a pseudo-Hermitian structure, templated on the scalar
// so every quantity can be re-evaluated under dual-number coordinates.

#include <cmath>
#include <string>
#include <vector>

#include "crgeo/diff.hpp"
#include "crgeo/structure.hpp"

namespace crgeo::kernel {

struct Ctx {
    const Structure* S = nullptr;
    DiffConfig cfg;
    std::vector<int> pivots;  // coordinate indices used by Gram-Schmidt; empty means analytic frame
    double step() const { return cfg.fd_step2; }
};

// Frame index helpers: 0 -> xi, 1..m -> eta_alpha, m+1..2m -> eta_alphabar.
inline int bar(int A, int m) { return A == 0 ? 0 : (A <= m ? A + m : A - m); }

template <class T>
struct Tensor3 {
    int n = 0;
    std::vector<T> a;
    Tensor3() = default;
    explicit Tensor3(int size) : n(size), a(static_cast<std::size_t>(size * size * size), T(0.0)) {}
    T& operator()(int k, int i, int j) { return a[static_cast<std::size_t>((k * n + i) * n + j)]; }
    const T& operator()(int k, int i, int j) const { return a[static_cast<std::size_t>((k * n + i) * n + j)]; }
    template <class Ar> void io(Ar& ar) { ar(a); n = static_cast<int>(std::lround(std::cbrt(static_cast<double>(a.size())))); }
};

template <class T>
Vec<T> theta_at(const Ctx& c, const Vec<T>& x) { return c.S->theta(x); }

// W_ij = dtheta(d_i, d_j) with the half convention.
template <class T>
Mat<T> dtheta_at(const Ctx& c, const Vec<T>& x) {
    auto jet = partials([&](const auto& y) { return c.S->theta(y); }, x, c.cfg, c.step());
    const int n = x.n;
    Mat<T> W(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) W(i, j) = 0.5 * (jet.d[i][j] - jet.d[j][i]);
    return W;
}

template <class T>
Vec<T> reeb_at(const Ctx& c, const Vec<T>& x, const Vec<T>& th) {
    if (c.S->reeb) return c.S->reeb(x);
    Mat<T> M = dtheta_at(c, x);
    const int n = x.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) += th[i] * th[j];
    try {
        return solve(M, th, 1e-12);
    } catch (const SingularMatrix&) {
        throw StructureError("structure degenerate at p");
    }
}

template <class T>
struct Local {
    Vec<T> th;   // theta
    Vec<T> xi;   // Reeb field
    Mat<T> J;
    Mat<T> H;    // h, to be composed with the horizontal projection
    CMat<T> E;   // columns: xi, eta_alpha, eta_alphabar
    CMat<T> C;   // rows: theta, theta^alpha, theta^alphabar
    template <class Ar> void io(Ar& ar) { ar(th, xi, J, H, E, C); }
};

template <class T>
Vec<T> proj_H(const Vec<T>& th, const Vec<T>& xi, const Vec<T>& v) {
    T s = dot(th, v);
    Vec<T> w = v;
    for (int i = 0; i < v.n; ++i) w[i] -= s * xi[i];
    return w;
}

template <class T>
T h_of(const Local<T>& L, const Vec<T>& X, const Vec<T>& Y) {
    return bilinear(L.H, proj_H(L.th, L.xi, X), proj_H(L.th, L.xi, Y));
}

// Real orthonormal horizontal frame e_alpha (columns), either analytic or by pivoted Gram-Schmidt.
template <class T>
Mat<T> real_frame(const Ctx& c, const Vec<T>& x, const Vec<T>& th, const Vec<T>& xi, const Mat<T>& J,
                  const Mat<T>& H) {
    const int n = x.n;
    const int m = (n - 1) / 2;
    if (c.pivots.empty()) return c.S->frame(x);
    Mat<T> F(n, m);
    std::vector<Vec<T>> basis;
    int k = 0;
    for (int idx : c.pivots) {
        Vec<T> v(n);
        v[idx] = T(1.0);
        v = proj_H(th, xi, v);
        for (const Vec<T>& b : basis) {
            T s = bilinear(H, b, v);
            for (int i = 0; i < n; ++i) v[i] -= s * b[i];
        }
        T nn = bilinear(H, v, v);
        if (!(primal(nn) > 1e-16)) throw StructureError("frame pivot failure; supply analytic frame");
        using std::sqrt;
        T inv = 1.0 / sqrt(nn);
        Vec<T> e = inv * v;
        Vec<T> je = proj_H(th, xi, matvec(J, e));
        basis.push_back(e);
        basis.push_back(je);
        F.set_col(k++, e);
        if (k == m) break;
    }
    if (k < m) throw StructureError("frame pivot failure; supply analytic frame");
    return F;
}

template <class T>
Local<T> local_at(const Ctx& c, const Vec<T>& x) {
    const int n = x.n;
    const int m = (n - 1) / 2;
    Local<T> L;
    L.th = c.S->theta(x);
    L.xi = reeb_at(c, x, L.th);
    L.J = c.S->J(x);
    L.H = c.S->h(x);
    Mat<T> F = real_frame(c, x, L.th, L.xi, L.J, L.H);
    L.E = CMat<T>(n, n);
    L.C = CMat<T>(n, n);
    const double r2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) L.E(i, 0) = Cx<T>(L.xi[i], T(0.0));
    for (int a = 0; a < m; ++a) {
        Vec<T> e = F.col(a);
        Vec<T> je = matvec(L.J, e);
        for (int i = 0; i < n; ++i) {
            L.E(i, 1 + a) = Cx<T>(r2 * e[i], -(r2 * je[i]));
            L.E(i, 1 + m + a) = Cx<T>(r2 * e[i], r2 * je[i]);
        }
    }
    // theta^A(V) = h(pi_H V, conj(eta_A)) for A != 0.
    Mat<T> PH = Mat<T>::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) PH(i, j) -= L.xi[i] * L.th[j];
    Mat<T> K = matmul(transpose(PH), matmul(L.H, PH));
    for (int j = 0; j < n; ++j) L.C(0, j) = Cx<T>(L.th[j], T(0.0));
    for (int A = 1; A < n; ++A) {
        CVec<T> ebar = conj(L.E.col(A));
        CVec<T> w = matvec(K, ebar);
        for (int j = 0; j < n; ++j) L.C(A, j) = w[j];
    }
    return L;
}

template <class T>
struct Jet {
    Local<T> L;
    std::vector<Local<T>> d;  // coordinate partials
};

template <class T>
Jet<T> local_jet(const Ctx& c, const Vec<T>& x) {
    auto p = partials([&](const auto& y) { return local_at(c, y); }, x, c.cfg, c.step());
    return {std::move(p.value), std::move(p.d)};
}

// Derivative of a complex frame column B along a complex vector V (coordinates).
template <class T>
CVec<T> dcol(const Jet<T>& j, int B, const CVec<T>& V) {
    const int n = j.L.E.r;
    CVec<T> out(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) out[k] += V[i] * j.d[i].E(k, B);
    }
    return out;
}

// [eta_A, eta_B] in coordinates.
template <class T>
CVec<T> bracket_cols(const Jet<T>& j, int A, int B) {
    CVec<T> ea = j.L.E.col(A), eb = j.L.E.col(B);
    CVec<T> x = dcol(j, B, ea), y = dcol(j, A, eb);
    for (int k = 0; k < x.n; ++k) x[k] -= y[k];
    return x;
}

template <class T>
CVec<T> frame_coeffs(const Local<T>& L, const CVec<T>& V) {
    const int n = V.n;
    CVec<T> out(n);
    for (int A = 0; A < n; ++A) {
        Cx<T> s(0.0);
        for (int k = 0; k < n; ++k) s += L.C(A, k) * V[k];
        out[A] = s;
    }
    return out;
}

template <class T>
CVec<T> from_coeffs(const Local<T>& L, const CVec<T>& a) {
    const int n = a.n;
    CVec<T> out(n);
    for (int A = 0; A < n; ++A)
        for (int k = 0; k < n; ++k) out[k] += a[A] * L.E(k, A);
    return out;
}

// Complex-bilinear h after horizontal projection.
template <class T>
Cx<T> hc(const Local<T>& L, const CVec<T>& X, const CVec<T>& Y) {
    const int n = X.n;
    CVec<T> px(n), py(n);
    Cx<T> tx = apply(L.th, X), ty = apply(L.th, Y);
    for (int i = 0; i < n; ++i) {
        px[i] = X[i] - tx * Cx<T>(L.xi[i], T(0.0));
        py[i] = Y[i] - ty * Cx<T>(L.xi[i], T(0.0));
    }
    return bilinear(L.H, px, py);
}

template <class T>
struct Conn {
    Jet<T> jet;
    int n = 0, m = 0;
    std::vector<CVec<T>> brk;        // brk[A*n+B] = frame coefficients of [eta_A, eta_B]
    std::vector<CMat<T>> gam;        // gam[C](A,B) = Gamma^A_{CB}
    CMat<T> sigma;                   // sigma(eta_gamma) = sigma(alpha,gamma) eta_alpha
    CMat<T> gram;                    // h(eta_alpha, eta_deltabar)

    const Cx<T>& G(int A, int C, int B) const { return gam[C](A, B); }
    const CVec<T>& c(int A, int B) const { return brk[A * n + B]; }
    // Torsion frame components T^A(eta_C, eta_B).
    Cx<T> tor(int A, int C, int B) const { return gam[C](A, B) - gam[B](A, C) - brk[C * n + B][A]; }
};

template <class T>
Conn<T> connection(const Ctx& c, const Vec<T>& x) {
    Conn<T> K;
    K.jet = local_jet(c, x);
    const Local<T>& L = K.jet.L;
    const int n = x.n;
    const int m = (n - 1) / 2;
    K.n = n;
    K.m = m;
    K.brk.resize(static_cast<std::size_t>(n * n));
    for (int A = 0; A < n; ++A)
        for (int B = 0; B < n; ++B) {
            if (B < A) {
                CVec<T> v = K.brk[B * n + A];
                for (int i = 0; i < n; ++i) v[i] = -v[i];
                K.brk[A * n + B] = v;
            } else if (A == B) {
                K.brk[A * n + B] = CVec<T>(n);
            } else {
                K.brk[A * n + B] = frame_coeffs(L, bracket_cols(K.jet, A, B));
            }
        }
    K.gam.assign(static_cast<std::size_t>(n), CMat<T>(n, n));

    // Gram matrix and its partials.
    CMat<T> G(m, m);
    std::vector<CMat<T>> dG(static_cast<std::size_t>(n), CMat<T>(m, m));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            CVec<T> ea = L.E.col(1 + a), eb = L.E.col(1 + m + b);
            G(a, b) = bilinear(L.H, ea, eb);
            for (int i = 0; i < n; ++i) {
                const Local<T>& Li = K.jet.d[i];
                CVec<T> dea = Li.E.col(1 + a), deb = Li.E.col(1 + m + b);
                dG[i](a, b) = bilinear(Li.H, ea, eb) + bilinear(L.H, dea, eb) + bilinear(L.H, ea, deb);
            }
        }
    K.gram = G;
    CMat<T> GT = transpose(G);
    auto along = [&](int A, int a, int b) {
        Cx<T> s(0.0);
        for (int i = 0; i < n; ++i) s += L.E(i, A) * dG[i](a, b);
        return s;
    };

    // nabla_{eta_betabar} eta_gamma = pi_+ [eta_betabar, eta_gamma]
    for (int b = 0; b < m; ++b)
        for (int g = 0; g < m; ++g) {
            const CVec<T>& br = K.c(1 + m + b, 1 + g);
            for (int a = 0; a < m; ++a) {
                K.gam[1 + m + b](1 + a, 1 + g) = br[1 + a];
                K.gam[1 + b](1 + m + a, 1 + m + g) = conj(br[1 + a]);
            }
        }

    // nabla_{eta_beta} eta_gamma from h(nabla Y, Zbar) = X h(Y, Zbar) - h(Y, pi_-[X, Zbar]).
    for (int b = 0; b < m; ++b)
        for (int g = 0; g < m; ++g) {
            CMat<T> rhs(m, 1);
            for (int d = 0; d < m; ++d) {
                const CVec<T>& br = K.c(1 + b, 1 + m + d);
                Cx<T> s = along(1 + b, g, d);
                for (int e = 0; e < m; ++e) s -= br[1 + m + e] * G(g, e);
                rhs(d, 0) = s;
            }
            CMat<T> sol;
            try {
                sol = solve(GT, rhs, 1e-12);
            } catch (const SingularMatrix&) {
                throw StructureError("structure invalid: h is not positive definite on H");
            }
            for (int a = 0; a < m; ++a) {
                K.gam[1 + b](1 + a, 1 + g) = sol(a, 0);
                K.gam[1 + m + b](1 + m + a, 1 + m + g) = conj(sol(a, 0));
            }
        }

    // nabla_xi eta_gamma = -1/2 [J sigma + J (L_xi J)] eta_gamma + [xi, eta_gamma]
    std::vector<CVec<T>> bx(static_cast<std::size_t>(m)), lj(static_cast<std::size_t>(m));
    for (int g = 0; g < m; ++g) {
        bx[g] = bracket_cols(K.jet, 0, 1 + g);
        CVec<T> jb = matvec(L.J, bx[g]);
        CVec<T> v(n);
        for (int i = 0; i < n; ++i) v[i] = times_i(bx[g][i]) - jb[i];
        lj[g] = v;
    }
    auto half_jlj_minus_b = [&](const CVec<T>& ljv, const CVec<T>& b) {
        CVec<T> w = matvec(L.J, ljv);
        for (int i = 0; i < n; ++i) w[i] = w[i] * 0.5 - b[i];
        return w;
    };
    CMat<T> Smat(m, m);  // S(g, d) = h(sigma eta_g, eta_dbar)
    for (int g = 0; g < m; ++g)
        for (int d = 0; d < m; ++d) {
            CVec<T> u = half_jlj_minus_b(lj[g], bx[g]);
            CVec<T> w = half_jlj_minus_b(conj(lj[d]), conj(bx[d]));
            Cx<T> s = along(0, g, d) + hc(L, u, L.E.col(1 + m + d)) + hc(L, L.E.col(1 + g), w);
            Smat(g, d) = times_i(s);
        }
    K.sigma = CMat<T>(m, m);
    {
        CMat<T> sol = solve(GT, transpose(Smat), 1e-12);  // sol(a, g) = sigma^a_g
        K.sigma = sol;
    }
    for (int g = 0; g < m; ++g) {
        CVec<T> sv(n);
        for (int a = 0; a < m; ++a)
            for (int i = 0; i < n; ++i) sv[i] += K.sigma(a, g) * L.E(i, 1 + a);
        CVec<T> js = matvec(L.J, sv), jl = matvec(L.J, lj[g]);
        CVec<T> nab(n);
        for (int i = 0; i < n; ++i) nab[i] = (js[i] + jl[i]) * (-0.5) + bx[g][i];
        CVec<T> co = frame_coeffs(L, nab);
        for (int A = 0; A < n; ++A) {
            K.gam[0](A, 1 + g) = co[A];
            K.gam[0](bar(A, m), 1 + m + g) = conj(co[A]);
        }
    }
    return K;
}

// Coordinate Christoffel symbols: nabla_{d_i} d_j = Gamma(k, i, j) d_k.
template <class T>
Tensor3<T> christoffel_from(const Conn<T>& K) {
    const int n = K.n;
    const Local<T>& L = K.jet.L;
    Tensor3<T> out(n);
    // P(A, i, j) = sum_{C,B} Gamma^A_{CB} C^C_i C^B_j
    std::vector<Cx<T>> Q(static_cast<std::size_t>(n * n * n));  // Q[(A*n + C)*n + j] = sum_B Gamma^A_{CB} C^B_j
    for (int A = 0; A < n; ++A)
        for (int C = 0; C < n; ++C)
            for (int j = 0; j < n; ++j) {
                Cx<T> s(0.0);
                for (int B = 0; B < n; ++B) s += K.gam[C](A, B) * L.C(B, j);
                Q[(A * n + C) * n + j] = s;
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            CVec<T> P(n);
            for (int A = 0; A < n; ++A) {
                Cx<T> s(0.0);
                for (int C = 0; C < n; ++C) s += L.C(C, i) * Q[(A * n + C) * n + j];
                P[A] = s;
            }
            for (int k = 0; k < n; ++k) {
                Cx<T> s(0.0);
                for (int A = 0; A < n; ++A) s += L.E(k, A) * P[A] - K.jet.d[i].E(k, A) * L.C(A, j);
                out(k, i, j) = s.re;
            }
        }
    return out;
}

template <class T>
Tensor3<T> christoffel(const Ctx& c, const Vec<T>& x) {
    return christoffel_from(connection(c, x));
}

// Coordinate Christoffels and their partials (d[a](k,i,j) = d_a Gamma^k_{ij}).
template <class T>
Partials<Tensor3<T>> christoffel_jet(const Ctx& c, const Vec<T>& x) {
    return partials([&](const auto& y) { return christoffel(c, y); }, x, c.cfg, c.step());
}

// R(d_a, d_b) d_c = Rc(k, c, a, b) d_k, stored flat as [((k*n+c)*n+a)*n+b].
template <class T>
std::vector<T> riemann_from(const Partials<Tensor3<T>>& gj) {
    const Tensor3<T>& G = gj.value;
    const int n = G.n;
    std::vector<T> R(static_cast<std::size_t>(n * n * n * n), T(0.0));
    for (int k = 0; k < n; ++k)
        for (int cc = 0; cc < n; ++cc)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    T s = gj.d[a](k, b, cc) - gj.d[b](k, a, cc);
                    for (int l = 0; l < n; ++l) s += G(k, a, l) * G(l, b, cc) - G(k, b, l) * G(l, a, cc);
                    R[((k * n + cc) * n + a) * n + b] = s;
                }
    return R;
}

}  // namespace crgeo::kernel
