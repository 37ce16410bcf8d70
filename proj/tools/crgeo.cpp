#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crgeo/curvature.hpp"
#include "crgeo/geodesic.hpp"
#include "crgeo/models.hpp"
#include "crgeo/spec_file.hpp"
#include "crgeo/suite.hpp"

using namespace crgeo;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct StructureArgs {
    std::string model = "heisenberg";
    std::string spec;
    int m = 1;
};

void add_structure_options(CLI::App* app, StructureArgs& a) {
    app->add_option("--model", a.model, "heisenberg, sphere, bergman or perturbed_heisenberg");
    app->add_option("--spec", a.spec, "JSON structure spec file (overrides --model)");
    app->add_option("--m", a.m, "CR dimension")->check(CLI::Range(1, 3));
}

std::string structure_name(const StructureArgs& a) { return a.spec.empty() ? a.model : a.spec; }

Structure build(const StructureArgs& a, std::optional<double>* curvature = nullptr) {
    SuiteConfig c;
    c.structure = structure_name(a);
    c.m = a.m;
    std::string source;
    Structure S = resolve_structure(c, &source);
    if (curvature && source == "model") {
        double k = model_curvature(parse_model_kind(a.model));
        if (std::isfinite(k)) *curvature = k;
    }
    return S;
}

Vec<double> parse_point(const std::string& text, int n, const char* what) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": '" + item + "' is not a number");
        }
    }
    if (static_cast<int>(v.size()) != n)
        throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " comma-separated values");
    return to_vec(v);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

void print_summary(const Report& r) {
    for (const CheckResult& c : r.checks) {
        std::fprintf(stderr, "%-28s %-4s residual %.3e tol %.1e%s%s\n", c.name.c_str(), c.pass ? "pass" : "fail",
                     c.max_residual, c.tolerance, c.matches_expectation() ? "" : "  (unexpected)",
                     c.error.empty() ? "" : ("  " + c.error).c_str());
    }
}

std::string csv_header(const char* lead, int n, const char* second) {
    std::string h = lead;
    for (int i = 1; i <= n; ++i) h += ",x" + std::to_string(i);
    for (int i = 1; i <= n; ++i) h += std::string(",") + second + std::to_string(i);
    return h + "\n";
}

std::string csv_row(double t, const Vec<double>& x, const Vec<double>& y) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", t);
    std::string row = buf;
    for (const Vec<double>* v : {&x, &y})
        for (int i = 0; i < v->n; ++i) {
            std::snprintf(buf, sizeof buf, ",%.17g", (*v)[i]);
            row += buf;
        }
    return row + "\n";
}

std::vector<int> parse_grid(const std::string& spec, int n) {
    std::vector<int> g;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, 'x')) {
        try {
            g.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigError("--grid: expected N or N1xN2x... with positive integers");
        }
    }
    if (g.size() == 1) g.assign(static_cast<std::size_t>(n), g[0]);
    if (static_cast<int>(g.size()) != n) throw ConfigError("--grid: expected 1 or " + std::to_string(n) + " sizes");
    long total = 1;
    for (int k : g) {
        if (k < 1) throw ConfigError("--grid: sizes must be positive");
        total *= k;
    }
    if (total > 20000) throw ConfigError("--grid: at most 20000 points");
    return g;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical pseudo-Hermitian geometry on CR charts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(artifact_version()));

    // verify
    StructureArgs va;
    std::string config_path, out_path, mode;
    int samples = -1, geo_samples = -1;
    long long seed = -1;
    std::vector<std::string> checks, expects;
    bool list = false;
    auto* verify = app.add_subcommand("verify", "run the verification suite and write a JSON report");
    add_structure_options(verify, va);
    verify->add_option("--config", config_path, "suite config JSON; command-line flags override it");
    verify->add_option("--samples", samples, "random points for pointwise checks")->check(CLI::PositiveNumber);
    verify->add_option("--geodesic-samples", geo_samples, "samples for geodesic and isometry checks")
        ->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "sampling seed")->check(CLI::NonNegativeNumber);
    verify->add_option("--out", out_path, "report path ('-' for stdout)");
    verify->add_option("--mode", mode, "AD or FD")->check(CLI::IsMember({"AD", "FD"}));
    verify->add_option("--check", checks, "run only these checks (repeatable)");
    verify->add_option("--expect", expects, "NAME=pass|fail (repeatable)");
    verify->add_flag("--list-checks", list, "print the registered checks and exit");

    // curvature
    StructureArgs ca;
    std::string grid = "5", cout_path;
    double fraction = 0.8;
    auto* curv = app.add_subcommand("curvature", "sweep curvature quantities over a coordinate grid");
    add_structure_options(curv, ca);
    curv->add_option("--grid", grid, "N or N1xN2x... points per axis");
    curv->add_option("--fraction", fraction, "fraction of each chart interval covered")->check(CLI::Range(0.0, 1.0));
    curv->add_option("--out", cout_path, "report path ('-' for stdout)");

    // geodesic and jacobi
    StructureArgs ga;
    std::string from, dir, v0, dv0, gout;
    double tend = 1.0;
    int steps = 0;
    auto* geo = app.add_subcommand("geodesic", "integrate a geodesic and write a CSV trace");
    add_structure_options(geo, ga);
    geo->add_option("--from", from, "base point, comma separated")->required();
    geo->add_option("--dir", dir, "initial velocity, comma separated")->required();
    geo->add_option("--t", tend, "final time")->check(CLI::PositiveNumber);
    geo->add_option("--steps", steps, "RK4 steps (default 200 per unit time)")->check(CLI::PositiveNumber);
    geo->add_option("--out", gout, "CSV path ('-' for stdout)");

    auto* jac = app.add_subcommand("jacobi", "integrate a Jacobi field along a geodesic and write a CSV trace");
    add_structure_options(jac, ga);
    jac->add_option("--from", from, "base point")->required();
    jac->add_option("--dir", dir, "geodesic initial velocity")->required();
    jac->add_option("--v0", v0, "V(0)");
    jac->add_option("--dv0", dv0, "V'(0)");
    jac->add_option("--t", tend, "final time")->check(CLI::PositiveNumber);
    jac->add_option("--steps", steps, "RK4 steps")->check(CLI::PositiveNumber);
    jac->add_option("--out", gout, "CSV path ('-' for stdout)");

    // isometry
    std::string src = "heisenberg", tgt = "heisenberg", rho = "identity", ifrom, ito, iout;
    int im = 1, isamples = 20;
    double radius = 0.3;
    long long iseed = 42;
    std::vector<std::string> iexpects;
    auto* iso = app.add_subcommand("isometry", "build the Cartan map between two structures and test it");
    iso->add_option("--source", src, "source model or spec file");
    iso->add_option("--target", tgt, "target model or spec file");
    iso->add_option("--m", im, "CR dimension")->check(CLI::Range(1, 3));
    iso->add_option("--rho", rho, "identity or rotation:PHI (frame rotation eta_1 -> e^{i PHI} eta_1)");
    iso->add_option("--radius", radius, "g-radius of the sampled ball")->check(CLI::PositiveNumber);
    iso->add_option("--from", ifrom, "source base point (default: chart center)");
    iso->add_option("--to", ito, "target base point (default: chart center, shifted for equal structures)");
    iso->add_option("--samples", isamples, "sample points")->check(CLI::PositiveNumber);
    iso->add_option("--seed", iseed, "sampling seed")->check(CLI::NonNegativeNumber);
    iso->add_option("--expect", iexpects, "NAME=pass|fail (repeatable)");
    iso->add_option("--out", iout, "report path ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        auto apply_expect = [](const std::vector<std::string>& list, std::map<std::string, bool>& into) {
            for (const std::string& e : list) {
                auto eq = e.find('=');
                std::string name = e.substr(0, eq), val = eq == std::string::npos ? "" : e.substr(eq + 1);
                if (val != "pass" && val != "fail") throw ConfigError("--expect wants NAME=pass or NAME=fail");
                into[name] = val == "pass";
            }
        };

        if (*verify) {
            if (list) {
                for (const CheckInfo& c : registered_checks())
                    std::printf("%-28s %s\n", c.name.c_str(), c.description.c_str());
                return 0;
            }
            SuiteConfig cfg = config_path.empty() ? SuiteConfig{} : load_suite_config(config_path);
            if (!verify->get_option("--model")->empty() || !va.spec.empty() || config_path.empty())
                cfg.structure = structure_name(va);
            if (!verify->get_option("--m")->empty() || config_path.empty()) cfg.m = va.m;
            if (samples > 0) cfg.samples = samples;
            if (geo_samples > 0) cfg.geodesic_samples = geo_samples;
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            if (!mode.empty()) cfg.mode = mode == "FD" ? DiffMode::FD : DiffMode::AD;
            if (!checks.empty()) cfg.checks = checks;
            apply_expect(expects, cfg.expectations);
            if (!out_path.empty()) cfg.output = out_path;
            const std::string target = cfg.output;
            cfg.output.clear();
            Report r = run_suite(cfg);
            write_text(target.empty() ? "-" : target, report_to_json(r));
            print_summary(r);
            return r.all_expectations_met() ? 0 : kExitMismatch;
        }

        if (*curv) {
            std::optional<double> c;
            Structure S = build(ca, &c);
            const int n = S.dim();
            std::vector<int> g = parse_grid(grid, n);
            SuiteConfig cfg;
            cfg.structure = structure_name(ca);
            cfg.m = ca.m;
            cfg.curvature = c;
            std::vector<int> idx(static_cast<std::size_t>(n), 0);
            for (;;) {
                std::vector<double> q(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) {
                    const Interval& b = S.chart.bounds()[static_cast<std::size_t>(i)];
                    double mid = 0.5 * (b.lo + b.hi), half = 0.5 * (b.hi - b.lo) * fraction;
                    int k = g[static_cast<std::size_t>(i)];
                    q[static_cast<std::size_t>(i)] = k == 1 ? mid : mid - half + 2.0 * half * idx[static_cast<std::size_t>(i)] / (k - 1);
                }
                cfg.points.push_back(q);
                int i = n - 1;
                while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == g[static_cast<std::size_t>(i)]) idx[static_cast<std::size_t>(i--)] = 0;
                if (i < 0) break;
            }
            cfg.checks = {"bianchi_identities", "curvature_symmetries"};
            if (c) cfg.checks.insert(cfg.checks.end(), {"space_form_constant", "ricci_einstein"});
            Report r = run_suite(cfg, S, c ? "model" : "spec");
            for (int i = 1; i <= n; ++i) r.sweep_columns.push_back("x" + std::to_string(i));
            for (int a = 1; a <= S.m(); ++a) r.sweep_columns.push_back("K_theta_" + std::to_string(a));
            for (const char* k : {"rho", "rho_M", "ric_b_min", "ric_b_max"}) r.sweep_columns.push_back(k);
            for (const auto& q : cfg.points) {
                CurvatureData R = curvature_components(S, to_vec(q));
                std::vector<double> row = q;
                row.insert(row.end(), R.K_theta.begin(), R.K_theta.end());
                row.push_back(R.rho);
                row.push_back(R.rho_M);
                double lo = INFINITY, hi = -INFINITY;
                for (int a = 0; a < R.m; ++a) {
                    lo = std::min(lo, R.ric_b(a, a).re);
                    hi = std::max(hi, R.ric_b(a, a).re);
                }
                row.push_back(lo);
                row.push_back(hi);
                r.sweep_rows.push_back(row);
            }
            write_text(cout_path.empty() ? "-" : cout_path, report_to_json(r));
            print_summary(r);
            return r.all_expectations_met() ? 0 : kExitMismatch;
        }

        if (*geo || *jac) {
            Structure S = build(ga);
            const int n = S.dim();
            Vec<double> p = parse_point(from, n, "--from"), u = parse_point(dir, n, "--dir");
            S.chart.require_inside(p);
            std::string text;
            if (*geo) {
                text = csv_header("t", n, "v");
                if (max_abs(u) == 0.0) {
                    text += csv_row(0.0, p, u);
                } else {
                    GeodesicPath path = integrate_geodesic(S, p, u, tend, steps);
                    if (path.truncated) {
                        std::fprintf(stderr, "geodesic left the chart at t = %.6g\n", path.times.back());
                        for (std::size_t k = 0; k < path.times.size(); ++k)
                            text += csv_row(path.times[k], path.points[k], path.velocities[k]);
                        write_text(gout, text);
                        return kExitMismatch;
                    }
                    for (std::size_t k = 0; k < path.times.size(); ++k)
                        text += csv_row(path.times[k], path.points[k], path.velocities[k]);
                }
            } else {
                Vec<double> V0 = v0.empty() ? Vec<double>(n) : parse_point(v0, n, "--v0");
                Vec<double> V1 = dv0.empty() ? Vec<double>(n) : parse_point(dv0, n, "--dv0");
                GeodesicPath path = integrate_geodesic(S, p, u, tend, steps);
                if (path.truncated) throw DomainError("geodesic left the chart");
                JacobiField J = jacobi_field(S, path, V0, V1);
                text = csv_header("t", n, "y");
                for (std::size_t k = 0; k < path.times.size(); ++k) text += csv_row(path.times[k], path.points[k], J.y[k]);
            }
            write_text(gout, text);
            return 0;
        }

        if (*iso) {
            SuiteConfig sc, tc;
            sc.structure = src;
            tc.structure = tgt;
            sc.m = tc.m = im;
            Structure S = resolve_structure(sc), T = resolve_structure(tc);
            auto center = [](const Chart& c) {
                Vec<double> p(c.dim());
                for (int i = 0; i < p.n; ++i) p[i] = 0.5 * (c.bounds()[static_cast<std::size_t>(i)].lo + c.bounds()[static_cast<std::size_t>(i)].hi);
                return p;
            };
            Vec<double> p = ifrom.empty() ? center(S.chart) : parse_point(ifrom, S.dim(), "--from");
            Vec<double> pt = center(T.chart);
            if (!ito.empty()) {
                pt = parse_point(ito, T.dim(), "--to");
            } else if (src == tgt) {
                const Interval& b = T.chart.bounds()[0];
                pt[0] += 0.05 * (b.hi - b.lo);
            }
            std::optional<Mat<double>> U;
            if (rho.rfind("rotation:", 0) == 0) {
                U = frame_rotation(im, std::stod(rho.substr(9)));
            } else if (rho != "identity") {
                throw ConfigError("--rho must be identity or rotation:PHI");
            }
            Mat<double> A = frame_map(S, p, T, pt, U);
            IsometryCandidate cand{S, T, p, pt, A, radius};
            IsometryReport ir = isometry_report(cand, isamples, static_cast<std::uint64_t>(iseed));

            Report r;
            r.version = artifact_version();
            r.structure = S.name + "->" + T.name;
            r.source = "isometry";
            r.m = im;
            r.bounds = S.chart.bounds();
            r.mode = "AD";
            r.seed = static_cast<std::uint64_t>(iseed);
            r.samples = isamples;
            std::map<std::string, bool> expect;
            apply_expect(iexpects, expect);
            auto add = [&](const std::string& name, double res, double tol,
                           std::vector<std::pair<std::string, double>> values) {
                if (!find_check(name)) throw ConfigError("unknown check '" + name + "'");
                CheckResult c;
                c.name = name;
                c.max_residual = res;
                c.tolerance = tol;
                c.pass = res <= tol;
                c.expected = expect.count(name) ? expect[name] : true;
                c.sample_count = static_cast<int>(ir.samples.size());
                c.values = std::move(values);
                r.checks.push_back(c);
            };
            for (const auto& [k, v] : expect)
                if (k != "cartan_isometry" && k != "cartan_differential" && k != "cartan_hypotheses")
                    throw ConfigError("unknown check '" + k + "' for isometry");
            add("cartan_isometry", ir.max_isometry_residual(), 1e-5,
                {{"metric", ir.metric_residual}, {"J", ir.J_residual}, {"theta", ir.theta_residual}});
            add("cartan_differential", ir.df_p_vs_rho, 1e-6, {});
            add("cartan_hypotheses",
                std::max({ir.curvature_hypothesis, ir.torsion_hypothesis, ir.torsion_transfer, ir.phi_isometry}), 1e-5,
                {{"curvature", ir.curvature_hypothesis},
                 {"torsion", ir.torsion_hypothesis},
                 {"torsion_transfer", ir.torsion_transfer},
                 {"hypotheses_hold", ir.hypotheses_hold ? 1.0 : 0.0}});
            write_text(iout.empty() ? "-" : iout, report_to_json(r));
            print_summary(r);
            return r.all_expectations_met() ? 0 : kExitMismatch;
        }
    } catch (const SpecError& e) {
        std::fprintf(stderr, "spec error: %s\n", e.what());
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return 0;
}
