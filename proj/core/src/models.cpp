#include "crgeo/models.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "crgeo/curvature.hpp"

namespace crgeo {
namespace {

// theta = dt + k * phi(|z|^2) * sum(x dy - y dx) (+ k * d(x1 y1) when shifted), J lifted from the
// flat complex structure, h = L_theta.
template <class Phi, class DPhi>
Structure kahler_cylinder(const std::string& name, int m, double a, double tmax, double k, bool shift,
                          Phi phi, DPhi dphi, bool analytic_frame) {
    const int n = 2 * m + 1;
    std::vector<Interval> b(static_cast<std::size_t>(n), Interval{-a, a});
    b.back() = Interval{-tmax, tmax};
    Structure s{Chart(b, name), name, {}, {}, {}, {}, {}, {}};

    auto alpha = [=](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        T r2(0.0);
        for (int j = 0; j < m; ++j) r2 += x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1];
        T f = k * phi(r2);
        Vec<T> al(n);
        for (int j = 0; j < m; ++j) {
            al[2 * j] = -(f * x[2 * j + 1]);
            al[2 * j + 1] = f * x[2 * j];
        }
        if (shift) {
            al[0] += k * x[1];
            al[1] += k * x[0];
        }
        return al;
    };
    s.theta = [=](const auto& x) {
        auto al = alpha(x);
        al[n - 1] = 1.0;
        return al;
    };
    s.J = [=](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        auto al = alpha(x);
        Mat<T> J(n, n);
        for (int j = 0; j < m; ++j) {
            J(2 * j + 1, 2 * j) = 1.0;
            J(2 * j, 2 * j + 1) = -1.0;
        }
        // J(t, .) = -(alpha^T J_base)
        for (int j = 0; j < m; ++j) {
            J(n - 1, 2 * j) = -al[2 * j + 1];
            J(n - 1, 2 * j + 1) = al[2 * j];
        }
        return J;
    };
    s.h = [=](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        T r2(0.0);
        for (int j = 0; j < m; ++j) r2 += x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1];
        T f = k * phi(r2), fp = k * dphi(r2);
        Mat<T> H(n, n);
        for (int i = 0; i < 2 * m; ++i) H(i, i) = f;
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l) {
                T xj = x[2 * j], yj = x[2 * j + 1], xl = x[2 * l], yl = x[2 * l + 1];
                H(2 * j, 2 * l) += fp * (xj * xl + yj * yl);
                H(2 * j + 1, 2 * l + 1) += fp * (yj * yl + xj * xl);
                H(2 * j, 2 * l + 1) += fp * (xj * yl - yj * xl);
                H(2 * j + 1, 2 * l) += fp * (yj * xl - xj * yl);
            }
        return H;
    };
    s.reeb = [=](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        Vec<T> v(n);
        v[n - 1] = 1.0;
        return v;
    };
    if (analytic_frame) {
        // Only valid for constant phi: e_j = (d_xj - alpha_xj d_t) / sqrt(k phi).
        s.frame = [=](const auto& x) {
            using T = std::decay_t<decltype(x[0])>;
            auto al = alpha(x);
            T r2(0.0);
            const double sc = 1.0 / std::sqrt(k * phi(0.0));
            Mat<T> F(n, m);
            for (int j = 0; j < m; ++j) {
                F(2 * j, j) = sc;
                F(n - 1, j) = -(sc * al[2 * j]);
            }
            (void)r2;
            return F;
        };
    }
    return s;
}

// Stereographic chart of the unit sphere in R^{n+1}; the ambient side needs one slot more than Vec holds.
template <class T>
struct Ambient {
    std::array<T, kMaxDim + 1> F{};
    std::array<std::array<T, kMaxDim>, kMaxDim + 1> dF{};
    T s{};
};

template <class T>
Ambient<T> stereo_jet(const Vec<T>& u, int n) {
    Ambient<T> A;
    T r2(0.0);
    for (int i = 0; i < n; ++i) r2 += u[i] * u[i];
    A.s = 1.0 + r2;
    T inv = 1.0 / A.s;
    for (int i = 0; i < n; ++i) A.F[i] = 2.0 * u[i] * inv;
    A.F[n] = (r2 - 1.0) * inv;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A.dF[i][j] = (i == j ? 2.0 * inv : T(0.0)) - 4.0 * u[i] * u[j] * inv * inv;
    for (int j = 0; j < n; ++j) A.dF[n][j] = 4.0 * u[j] * inv * inv;
    return A;
}

// Multiplication by i on R^{2m+2} with coordinates (x0, y0, x1, y1, ...).
template <class T>
std::array<T, kMaxDim + 1> times_i_ambient(const std::array<T, kMaxDim + 1>& w, int len) {
    std::array<T, kMaxDim + 1> out{};
    for (int j = 0; j + 1 < len; j += 2) {
        out[j] = -w[j + 1];
        out[j + 1] = w[j];
    }
    return out;
}

}  // namespace

Structure heisenberg(int m, double chart_radius) {
    if (m < 1) throw DomainError("m must be >= 1");
    Structure s = kahler_cylinder(
        "heisenberg", m, chart_radius, chart_radius, 2.0, false, [](const auto&) { return 1.0; },
        [](const auto&) { return 0.0; }, true);
    return s;
}

Structure cr_sphere(int m, double chart_radius) {
    if (m < 1) throw DomainError("m must be >= 1");
    const int n = 2 * m + 1;
    const double kappa = 4.0;
    std::vector<Interval> b(static_cast<std::size_t>(n), Interval{-chart_radius, chart_radius});
    Structure s{Chart(b, "sphere"), "sphere", {}, {}, {}, {}, {}, {}};
    s.params["theta_scale"] = kappa;
    s.theta = [=](const auto& u) {
        using T = std::decay_t<decltype(u[0])>;
        Ambient<T> A = stereo_jet(u, n);
        auto a = times_i_ambient(A.F, n + 1);
        Vec<T> th(n);
        for (int i = 0; i < n; ++i)
            for (int l = 0; l <= n; ++l) th[i] += kappa * a[l] * A.dF[l][i];
        return th;
    };
    s.reeb = [=](const auto& u) {
        using T = std::decay_t<decltype(u[0])>;
        Ambient<T> A = stereo_jet(u, n);
        auto V = times_i_ambient(A.F, n + 1);
        T f = A.s * A.s * (0.25 / kappa);
        Vec<T> xi(n);
        for (int i = 0; i < n; ++i)
            for (int l = 0; l <= n; ++l) xi[i] += f * A.dF[l][i] * V[l];
        return xi;
    };
    s.J = [=](const auto& u) {
        using T = std::decay_t<decltype(u[0])>;
        Ambient<T> A = stereo_jet(u, n);
        auto V = times_i_ambient(A.F, n + 1);
        T f = A.s * A.s * 0.25;
        Vec<T> xi(n), th(n);
        for (int i = 0; i < n; ++i)
            for (int l = 0; l <= n; ++l) {
                xi[i] += (f / kappa) * A.dF[l][i] * V[l];
                th[i] += kappa * V[l] * A.dF[l][i];
            }
        Mat<T> J(n, n);
        for (int j = 0; j < n; ++j) {
            Vec<T> e(n);
            e[j] = 1.0;
            T tj = th[j];
            for (int i = 0; i < n; ++i) e[i] -= tj * xi[i];
            std::array<T, kMaxDim + 1> w{};
            for (int l = 0; l <= n; ++l)
                for (int i = 0; i < n; ++i) w[l] += A.dF[l][i] * e[i];
            auto iw = times_i_ambient(w, n + 1);
            for (int i = 0; i < n; ++i) {
                T acc(0.0);
                for (int l = 0; l <= n; ++l) acc += A.dF[l][i] * iw[l];
                J(i, j) = f * acc;
            }
        }
        return J;
    };
    s.h = [=](const auto& u) {
        using T = std::decay_t<decltype(u[0])>;
        T r2(0.0);
        for (int i = 0; i < n; ++i) r2 += u[i] * u[i];
        T sc = 1.0 + r2;
        T g = 4.0 * kappa / (sc * sc);
        Mat<T> H(n, n);
        for (int i = 0; i < n; ++i) H(i, i) = g;
        return H;
    };
    return s;
}

Structure bergman_cylinder_scaled(int m, double k, double chart_radius) {
    if (m < 1) throw DomainError("m must be >= 1");
    if (!(chart_radius > 0.0 && chart_radius < 1.0)) throw DomainError("bergman chart radius must lie in (0, 1)");
    const double a = chart_radius / std::sqrt(2.0 * m);
    Structure s = kahler_cylinder(
        "bergman_cylinder", m, a, 4.0, k, false,
        [](const auto& r2) { return 1.0 / (1.0 - r2); },
        [](const auto& r2) {
            auto q = 1.0 - r2;
            return 1.0 / (q * q);
        },
        false);
    s.params["primitive_scale"] = k;
    return s;
}

double bergman_calibration(int m) {
    static std::mutex mu;
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    Vec<double> o(2 * m + 1);
    auto K_at = [&](double k) {
        Structure s = bergman_cylinder_scaled(m, k);
        AdaptedFrame f = adapted_frame(s, o);
        return pseudo_hermitian_sectional(s, o, f.e[0]);
    };
    const double K1 = K_at(1.0), K2 = K_at(2.0);
    if (!(K1 < 0.0 && K2 < 0.0)) throw NumericalError("bergman calibration failed");
    const double p = std::log(K2 / K1) / std::log(2.0);
    const double k = std::pow(-1.0 / K1, 1.0 / p);
    cache[m] = k;
    return k;
}

Structure bergman_cylinder(int m, double chart_radius) {
    return bergman_cylinder_scaled(m, bergman_calibration(m), chart_radius);
}

Structure bergman_cylinder_shifted_primitive(int m, double chart_radius) {
    if (m < 1) throw DomainError("m must be >= 1");
    const double k = bergman_calibration(m);
    const double a = chart_radius / std::sqrt(2.0 * m);
    Structure s = kahler_cylinder(
        "bergman_cylinder_shifted", m, a, 4.0, k, true,
        [](const auto& r2) { return 1.0 / (1.0 - r2); },
        [](const auto& r2) {
            auto q = 1.0 - r2;
            return 1.0 / (q * q);
        },
        false);
    s.params["primitive_scale"] = k;
    return s;
}

Structure make_model(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::heisenberg:
            return spec.chart_radius > 0.0 ? heisenberg(spec.m, spec.chart_radius) : heisenberg(spec.m);
        case ModelKind::sphere:
            return spec.chart_radius > 0.0 ? cr_sphere(spec.m, spec.chart_radius) : cr_sphere(spec.m);
        case ModelKind::bergman_cylinder:
            return spec.chart_radius > 0.0 ? bergman_cylinder(spec.m, spec.chart_radius) : bergman_cylinder(spec.m);
        case ModelKind::perturbed_heisenberg:
            return spec.chart_radius > 0.0 ? perturbed_heisenberg(spec.m, spec.chart_radius)
                                           : perturbed_heisenberg(spec.m);
    }
    throw DomainError("unknown model");
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "heisenberg") return ModelKind::heisenberg;
    if (name == "sphere") return ModelKind::sphere;
    if (name == "bergman_cylinder" || name == "bergman") return ModelKind::bergman_cylinder;
    if (name == "perturbed_heisenberg" || name == "perturbed") return ModelKind::perturbed_heisenberg;
    throw DomainError("unknown model '" + name + "'");
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::heisenberg: return "heisenberg";
        case ModelKind::sphere: return "sphere";
        case ModelKind::bergman_cylinder: return "bergman_cylinder";
        case ModelKind::perturbed_heisenberg: return "perturbed_heisenberg";
    }
    return "unknown";
}

double model_curvature(ModelKind kind) {
    switch (kind) {
        case ModelKind::heisenberg: return 0.0;
        case ModelKind::sphere: return 1.0;
        case ModelKind::bergman_cylinder: return -1.0;
        case ModelKind::perturbed_heisenberg: break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

Structure mixed_homothety(const Structure& s, double lambda, double mu) {
    if (!(lambda > 0.0) || !(mu > 0.0)) throw DomainError("homothety factors must be positive");
    Structure out = s;
    out.name = s.name + "_homothety";
    auto th = s.theta;
    auto h = s.h;
    out.theta = [=](const auto& x) {
        auto v = th(x);
        for (int i = 0; i < v.n; ++i) v[i] *= mu;
        return v;
    };
    out.h = [=](const auto& x) {
        auto H = h(x);
        for (int i = 0; i < H.r * H.c; ++i) H.a[i] *= lambda;
        return H;
    };
    if (s.reeb) {
        auto rb = s.reeb;
        out.reeb = [=](const auto& x) {
            auto v = rb(x);
            for (int i = 0; i < v.n; ++i) v[i] *= 1.0 / mu;
            return v;
        };
    }
    if (s.frame) {
        auto fr = s.frame;
        const double sc = 1.0 / std::sqrt(lambda);
        out.frame = [=](const auto& x) {
            auto F = fr(x);
            for (int i = 0; i < F.r * F.c; ++i) F.a[i] *= sc;
            return F;
        };
    }
    out.params["homothety_lambda"] = lambda;
    out.params["homothety_mu"] = mu;
    return out;
}

Structure conformal_h(const Structure& s, const ScalarField& u, const std::string& label) {
    Structure out = s;
    out.name = s.name + "_conformal_" + label;
    auto h = s.h;
    out.h = [=](const auto& x) {
        using std::exp;
        auto H = h(x);
        auto f = exp(u(x));
        for (int i = 0; i < H.r * H.c; ++i) H.a[i] = f * H.a[i];
        return H;
    };
    if (s.frame) {
        auto fr = s.frame;
        out.frame = [=](const auto& x) {
            using std::exp;
            auto F = fr(x);
            auto f = exp(-0.5 * u(x));
            for (int i = 0; i < F.r * F.c; ++i) F.a[i] = f * F.a[i];
            return F;
        };
    }
    return out;
}

Structure perturbed_heisenberg(int m, double chart_radius) {
    Structure s = conformal_h(
        heisenberg(m, chart_radius), ScalarField([](const auto& x) {
            return 0.5 * x[0] + 0.3 * x[0] * x[0] + 0.2 * x[x.n - 1];
        }),
        "perturbed");
    s.name = "heisenberg_perturbed";
    return s;
}

}  // namespace crgeo
