#pragma once

#include <cmath>
#include <type_traits>

namespace crgeo {

// Forward-mode dual number a + b*eps, eps^2 = 0. Nest for higher orders.
template <class T>
struct Dual {
    T v{};
    T d{};

    constexpr Dual() = default;
    constexpr Dual(double x) : v(x), d(0.0) {}
    constexpr Dual(const T& value, const T& tangent) : v(value), d(tangent) {}
    template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
    constexpr Dual(const T& value) : v(value), d(0.0) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
    Dual& operator*=(double s) { v *= s; d *= s; return *this; }
    Dual& operator/=(double s) { v /= s; d /= s; return *this; }
};

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<Dual<T>> : std::true_type {};

template <class T> struct dual_depth { static constexpr int value = 0; };
template <class T> struct dual_depth<Dual<T>> { static constexpr int value = 1 + dual_depth<T>::value; };

inline double primal(double x) { return x; }
template <class T> double primal(const Dual<T>& x) { return primal(x.v); }

template <class T> Dual<T> operator+(const Dual<T>& a) { return a; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    T inv = 1.0 / b.v;
    T q = a.v * inv;
    return {q, (a.d - q * b.d) * inv};
}

template <class T> Dual<T> operator+(const Dual<T>& a, double s) { return {a.v + s, a.d}; }
template <class T> Dual<T> operator+(double s, const Dual<T>& a) { return {s + a.v, a.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double s) { return {a.v - s, a.d}; }
template <class T> Dual<T> operator-(double s, const Dual<T>& a) { return {s - a.v, -a.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double s) { return {a.v * s, a.d * s}; }
template <class T> Dual<T> operator*(double s, const Dual<T>& a) { return {s * a.v, s * a.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double s) { return {a.v / s, a.d / s}; }
template <class T> Dual<T> operator/(double s, const Dual<T>& a) {
    T inv = 1.0 / a.v;
    return {s * inv, -s * a.d * inv * inv};
}

template <class T> Dual<T> sqrt(const Dual<T>& a) {
    using std::sqrt;
    T r = sqrt(a.v);
    return {r, a.d / (2.0 * r)};
}
template <class T> Dual<T> exp(const Dual<T>& a) {
    using std::exp;
    T e = exp(a.v);
    return {e, e * a.d};
}
template <class T> Dual<T> log(const Dual<T>& a) {
    using std::log;
    return {log(a.v), a.d / a.v};
}
template <class T> Dual<T> sin(const Dual<T>& a) {
    using std::sin;
    using std::cos;
    return {sin(a.v), cos(a.v) * a.d};
}
template <class T> Dual<T> cos(const Dual<T>& a) {
    using std::sin;
    using std::cos;
    return {cos(a.v), -(sin(a.v) * a.d)};
}
template <class T> Dual<T> pow(const Dual<T>& a, double p) {
    using std::pow;
    if (p == 0.0) return Dual<T>(1.0);
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    T base = pow(a.v, p - 1.0);
    return {base * a.v, p * base * a.d};
}
template <class T> Dual<T> pow(const Dual<T>& a, const Dual<T>& b) { return exp(b * log(a)); }

// Lift a constant into any scalar of the tower.
template <class S> S lift(double x) { return S(x); }

// Seed x + eps*dx for a directional derivative at the next level.
template <class T> Dual<T> seed(const T& x, const T& dx) { return Dual<T>(x, dx); }

// Complex number over an arbitrary real scalar (std::complex is undefined for non-float T).
template <class T>
struct Cx {
    T re{};
    T im{};

    constexpr Cx() = default;
    constexpr Cx(double r) : re(r), im(0.0) {}
    constexpr Cx(const T& r, const T& i) : re(r), im(i) {}
    template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
    constexpr Cx(const T& r) : re(r), im(0.0) {}

    Cx& operator+=(const Cx& o) { re += o.re; im += o.im; return *this; }
    Cx& operator-=(const Cx& o) { re -= o.re; im -= o.im; return *this; }
    Cx& operator*=(const Cx& o) { *this = *this * o; return *this; }
    Cx& operator*=(double s) { re *= s; im *= s; return *this; }
};

template <class T> Cx<T> operator-(const Cx<T>& a) { return {-a.re, -a.im}; }
template <class T> Cx<T> operator+(const Cx<T>& a, const Cx<T>& b) { return {a.re + b.re, a.im + b.im}; }
template <class T> Cx<T> operator-(const Cx<T>& a, const Cx<T>& b) { return {a.re - b.re, a.im - b.im}; }
template <class T> Cx<T> operator*(const Cx<T>& a, const Cx<T>& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class T> Cx<T> operator/(const Cx<T>& a, const Cx<T>& b) {
    T den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}
template <class T> Cx<T> operator*(const Cx<T>& a, const T& s) { return {a.re * s, a.im * s}; }
template <class T> Cx<T> operator*(const T& s, const Cx<T>& a) { return {s * a.re, s * a.im}; }
template <class T> Cx<T> operator/(const Cx<T>& a, const T& s) { return {a.re / s, a.im / s}; }
template <class T, class = std::enable_if_t<!std::is_same_v<T, double>>>
Cx<T> operator*(const Cx<T>& a, double s) { return {a.re * s, a.im * s}; }
template <class T, class = std::enable_if_t<!std::is_same_v<T, double>>>
Cx<T> operator*(double s, const Cx<T>& a) { return {s * a.re, s * a.im}; }

template <class T> Cx<T> conj(const Cx<T>& a) { return {a.re, -a.im}; }
template <class T> Cx<T> times_i(const Cx<T>& a) { return {-a.im, a.re}; }
template <class T> T abs2(const Cx<T>& a) { return a.re * a.re + a.im * a.im; }

template <class T> Cx<T> real_cx(const T& r) { return Cx<T>(r, T(0.0)); }

inline double primal_abs(double x) { return std::abs(x); }
template <class T> double primal_abs(const T& x) { return std::abs(primal(x)); }
template <class T> double primal_abs(const Cx<T>& z) { return std::hypot(primal(z.re), primal(z.im)); }

// Split off one level of a dual: value part and tangent part.
template <class T> const T& value_of(const Dual<T>& x) { return x.v; }
template <class T> const T& tangent_of(const Dual<T>& x) { return x.d; }
template <class T> Cx<T> value_of(const Cx<Dual<T>>& z) { return {z.re.v, z.im.v}; }
template <class T> Cx<T> tangent_of(const Cx<Dual<T>>& z) { return {z.re.d, z.im.d}; }

using D0 = double;
using D1 = Dual<D0>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;

}  // namespace crgeo

// Every structure evaluator is instantiated for this tower of scalars.
#define CRGEO_SCALAR_TOWER(X) X(::crgeo::D0) X(::crgeo::D1) X(::crgeo::D2) X(::crgeo::D3) X(::crgeo::D4)
