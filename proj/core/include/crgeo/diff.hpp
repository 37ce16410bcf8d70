#pragma once

#include <type_traits>
#include <utility>
#include <vector>

#include "crgeo/chart.hpp"

namespace crgeo {

// Flattening archive used to split dual-valued results into value and tangent parts.
// Aggregates opt in with `template <class Ar> void io(Ar& ar)`.
template <class S>
struct Packer {
    std::vector<S> data;
    std::vector<int> shape;

    void operator()(const S& s) { data.push_back(s); }
    void operator()(const Cx<S>& z) { data.push_back(z.re); data.push_back(z.im); }
    template <class X>
    void operator()(const Vec<X>& v) {
        shape.push_back(v.n);
        for (int i = 0; i < v.n; ++i) (*this)(v[i]);
    }
    template <class X>
    void operator()(const Mat<X>& m) {
        shape.push_back(m.r);
        shape.push_back(m.c);
        for (int i = 0; i < m.r * m.c; ++i) (*this)(m.a[i]);
    }
    template <class X>
    void operator()(const std::vector<X>& v) {
        shape.push_back(static_cast<int>(v.size()));
        for (const X& x : v) (*this)(x);
    }
    template <class X, class = decltype(std::declval<X&>().io(std::declval<Packer&>()))>
    void operator()(const X& x) { const_cast<X&>(x).io(*this); }
    template <class A, class B, class... Rest>
    void operator()(const A& a, const B& b, const Rest&... rest) {
        (*this)(a);
        (*this)(b);
        ((*this)(rest), ...);
    }
};

template <class S>
struct Unpacker {
    const std::vector<S>& data;
    const std::vector<int>& shape;
    std::size_t di = 0;
    std::size_t si = 0;

    void operator()(S& s) { s = data[di++]; }
    void operator()(Cx<S>& z) { z.re = data[di++]; z.im = data[di++]; }
    template <class X>
    void operator()(Vec<X>& v) {
        v.n = shape[si++];
        for (int i = 0; i < v.n; ++i) (*this)(v[i]);
    }
    template <class X>
    void operator()(Mat<X>& m) {
        m.r = shape[si++];
        m.c = shape[si++];
        for (int i = 0; i < m.r * m.c; ++i) (*this)(m.a[i]);
    }
    template <class X>
    void operator()(std::vector<X>& v) {
        v.resize(static_cast<std::size_t>(shape[si++]));
        for (X& x : v) (*this)(x);
    }
    template <class X, class = decltype(std::declval<X&>().io(std::declval<Unpacker&>()))>
    void operator()(X& x) { x.io(*this); }
    template <class A, class B, class... Rest>
    void operator()(A& a, B& b, Rest&... rest) {
        (*this)(a);
        (*this)(b);
        ((*this)(rest), ...);
    }
};

template <class R, class S>
R unpack_as(const std::vector<S>& data, const std::vector<int>& shape) {
    R r{};
    Unpacker<S> u{data, shape};
    u(r);
    return r;
}

template <class R>
struct Derivative {
    R value;
    R deriv;
};

// Value and derivative of f along v at x. f is generic over the scalar type.
template <class T, class F>
auto directional(const F& f, const Vec<T>& x, const Vec<T>& v, const DiffConfig& cfg, double h)
    -> Derivative<std::decay_t<decltype(f(x))>> {
    using R = std::decay_t<decltype(f(x))>;
    if (cfg.mode == DiffMode::AD) {
        Vec<Dual<T>> xd(x.n);
        for (int i = 0; i < x.n; ++i) xd[i] = Dual<T>(x[i], v[i]);
        Packer<Dual<T>> p;
        p(f(xd));
        std::vector<T> val(p.data.size()), tan(p.data.size());
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            val[i] = p.data[i].v;
            tan[i] = p.data[i].d;
        }
        return {unpack_as<R>(val, p.shape), unpack_as<R>(tan, p.shape)};
    }
    Vec<T> xp = x, xm = x;
    for (int i = 0; i < x.n; ++i) {
        xp[i] += h * v[i];
        xm[i] -= h * v[i];
    }
    Packer<T> p0, pp, pm;
    p0(f(x));
    pp(f(xp));
    pm(f(xm));
    std::vector<T> tan(p0.data.size());
    for (std::size_t i = 0; i < tan.size(); ++i) tan[i] = (pp.data[i] - pm.data[i]) / (2.0 * h);
    return {unpack_as<R>(p0.data, p0.shape), unpack_as<R>(tan, p0.shape)};
}

template <class R>
struct Partials {
    R value;
    std::vector<R> d;  // d[i] = partial along coordinate i
};

// Value and all coordinate partials of f at x.
template <class T, class F>
auto partials(const F& f, const Vec<T>& x, const DiffConfig& cfg, double h)
    -> Partials<std::decay_t<decltype(f(x))>> {
    using R = std::decay_t<decltype(f(x))>;
    Partials<R> out;
    out.d.resize(static_cast<std::size_t>(x.n));
    if (cfg.mode == DiffMode::AD) {
        for (int i = 0; i < x.n; ++i) {
            Vec<T> e(x.n);
            e[i] = T(1.0);
            auto r = directional(f, x, e, cfg, h);
            if (i == 0) out.value = std::move(r.value);
            out.d[i] = std::move(r.deriv);
        }
        return out;
    }
    Packer<T> p0;
    p0(f(x));
    out.value = unpack_as<R>(p0.data, p0.shape);
    for (int i = 0; i < x.n; ++i) {
        Vec<T> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        Packer<T> pp, pm;
        pp(f(xp));
        pm(f(xm));
        std::vector<T> tan(p0.data.size());
        for (std::size_t k = 0; k < tan.size(); ++k) tan[k] = (pp.data[k] - pm.data[k]) / (2.0 * h);
        out.d[i] = unpack_as<R>(tan, p0.shape);
    }
    return out;
}

}  // namespace crgeo
