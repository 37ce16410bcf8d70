#include <benchmark/benchmark.h>

#include "crgeo/connection.hpp"
#include "crgeo/curvature.hpp"
#include "crgeo/expr.hpp"
#include "crgeo/geodesic.hpp"
#include "crgeo/models.hpp"
#include "crgeo/sampling.hpp"

using namespace crgeo;

namespace {

Structure model(int kind, int m) {
    switch (kind) {
        case 0: return heisenberg(m);
        case 1: return cr_sphere(m);
        default: return bergman_cylinder(m);
    }
}

Vec<double> probe(const Structure& S) { return sample_points(S.chart, 1, 3)[0]; }

void args(benchmark::internal::Benchmark* b) {
    for (int kind : {0, 1, 2})
        for (int m : {1, 2}) b->Args({kind, m});
    b->ArgNames({"model", "m"});
}

}  // namespace

static void BM_Christoffel(benchmark::State& state) {
    Structure S = model(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    Vec<double> p = probe(S);
    for (auto _ : state) benchmark::DoNotOptimize(coordinate_christoffels(S, p));
}
BENCHMARK(BM_Christoffel)->Apply(args);

static void BM_ChristoffelFD(benchmark::State& state) {
    Structure S = model(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    Vec<double> p = probe(S);
    DiffConfig cfg;
    cfg.mode = DiffMode::FD;
    for (auto _ : state) benchmark::DoNotOptimize(coordinate_christoffels(S, p, cfg));
}
BENCHMARK(BM_ChristoffelFD)->Apply(args);

static void BM_CurvatureComponents(benchmark::State& state) {
    Structure S = model(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    Vec<double> p = probe(S);
    for (auto _ : state) benchmark::DoNotOptimize(curvature_components(S, p));
}
BENCHMARK(BM_CurvatureComponents)->Apply(args)->Unit(benchmark::kMillisecond);

static void BM_ExpMap(benchmark::State& state) {
    Structure S = model(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    Vec<double> p = probe(S);
    Sampler rng(5);
    Vec<double> u = 0.3 * rng.unit(metric_matrix(S, p));
    for (auto _ : state) benchmark::DoNotOptimize(exp_map(S, p, u));
}
BENCHMARK(BM_ExpMap)->Apply(args)->Unit(benchmark::kMillisecond);

static void BM_LogMap(benchmark::State& state) {
    Structure S = model(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    Vec<double> p = probe(S);
    Sampler rng(5);
    Vec<double> q = exp_map(S, p, 0.3 * rng.unit(metric_matrix(S, p)));
    for (auto _ : state) benchmark::DoNotOptimize(log_map(S, p, q));
}
BENCHMARK(BM_LogMap)->Args({1, 1})->Args({1, 2})->ArgNames({"model", "m"})->Unit(benchmark::kMillisecond);

static void BM_ExprParse(benchmark::State& state) {
    const std::vector<std::string> coords = {"x", "y", "t"};
    for (auto _ : state)
        benchmark::DoNotOptimize(Expr::parse("exp(-(x^2 + y^2)/2) * (1 + 0.3*sin(t)) - 2*x*y/(1 + t^2)", coords));
}
BENCHMARK(BM_ExprParse);

static void BM_ExprEval(benchmark::State& state) {
    Expr e = Expr::parse("exp(-(x^2 + y^2)/2) * (1 + 0.3*sin(t)) - 2*x*y/(1 + t^2)", {"x", "y", "t"});
    Vec<double> x{0.3, -0.2, 0.7};
    for (auto _ : state) benchmark::DoNotOptimize(e(x));
}
BENCHMARK(BM_ExprEval);

static void BM_ExprEvalDual2(benchmark::State& state) {
    Expr e = Expr::parse("exp(-(x^2 + y^2)/2) * (1 + 0.3*sin(t)) - 2*x*y/(1 + t^2)", {"x", "y", "t"});
    Vec<D2> x(3);
    x[0] = D2(D1(0.3, 1.0), D1(1.0, 0.0));
    x[1] = D2(D1(-0.2, 0.0), D1(0.0, 0.0));
    x[2] = D2(D1(0.7, 0.0), D1(0.0, 0.0));
    for (auto _ : state) benchmark::DoNotOptimize(e(x));
}
BENCHMARK(BM_ExprEvalDual2);
BENCHMARK_MAIN();
