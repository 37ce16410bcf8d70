#include "crgeo/sampling.hpp"

#include <cmath>
#include <numbers>

namespace crgeo {

double Sampler::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

Vec<double> Sampler::point(const Chart& chart, double fraction) {
    Vec<double> p(chart.dim());
    for (int i = 0; i < p.n; ++i) {
        const Interval& b = chart.bounds()[static_cast<std::size_t>(i)];
        double mid = 0.5 * (b.lo + b.hi), half = 0.5 * (b.hi - b.lo) * fraction;
        p[i] = uniform(mid - half, mid + half);
    }
    return p;
}

namespace {

// Cholesky factor of G; u = L^{-T} z has G-norm |z|.
Vec<double> whiten(const Mat<double>& G, const Vec<double>& z) {
    const int n = G.r;
    Mat<double> L(n, n);
    for (int j = 0; j < n; ++j) {
        double s = G(j, j);
        for (int k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
        L(j, j) = std::sqrt(s);
        for (int i = j + 1; i < n; ++i) {
            double t = G(i, j);
            for (int k = 0; k < j; ++k) t -= L(i, k) * L(j, k);
            L(i, j) = t / L(j, j);
        }
    }
    return solve(transpose(L), z);
}

}  // namespace

Vec<double> Sampler::unit(const Mat<double>& G) {
    Vec<double> z(G.r);
    for (int i = 0; i < z.n; ++i) z[i] = normal();
    return whiten(G, (1.0 / norm(z)) * z);
}

Vec<double> Sampler::ball(const Mat<double>& G, double r) {
    Vec<double> u = unit(G);
    return (r * std::pow(uniform01(), 1.0 / G.r)) * u;
}

std::vector<Vec<double>> sample_points(const Chart& chart, int count, std::uint64_t seed, double fraction) {
    Sampler s(seed);
    std::vector<Vec<double>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(s.point(chart, fraction));
    return out;
}

}  // namespace crgeo
