#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crgeo/curvature.hpp"
#include "crgeo/sampling.hpp"

namespace crgeo {

inline constexpr int kStepsPerUnit = 200;

struct GeodesicPath {
    Vec<double> base;
    Vec<double> initial_velocity;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Vec<double>> points;
    std::vector<Vec<double>> velocities;
    bool truncated = false;  // the chart boundary was reached before t_end

    int steps() const { return static_cast<int>(times.size()) - 1; }
    const Vec<double>& end() const { return points.back(); }
};

// steps <= 0 selects ceil(kStepsPerUnit * |t_end|).
GeodesicPath integrate_geodesic(const Structure& S, const Vec<double>& p, const Vec<double>& u, double t_end,
                                int steps = 0, const DiffConfig& cfg = {});

// Throws DomainError when the geodesic leaves the chart before t = 1.
Vec<double> exp_map(const Structure& S, const Vec<double>& p, const Vec<double>& u, const DiffConfig& cfg = {});

struct LogOptions {
    int max_iterations = 50;
    double tolerance = 1e-13;
    double fd_step = 1e-5;
    std::optional<Vec<double>> guess;      // defaults to the coordinate difference q - p
    std::optional<Mat<double>> jacobian;   // reused (chord iteration) instead of rebuilding each step
};
// Newton inverse of exp_p; throws NumericalError("outside normal neighborhood") on failure.
Vec<double> log_map(const Structure& S, const Vec<double>& p, const Vec<double>& q, const DiffConfig& cfg = {},
                    const LogOptions& opt = {});
// d exp_p at u by central differences.
Mat<double> exp_jacobian(const Structure& S, const Vec<double>& p, const Vec<double>& u, double h = 1e-5,
                         const DiffConfig& cfg = {});

struct TransportOperator {
    GeodesicPath path;
    std::vector<Mat<double>> matrices;  // T_{gamma(0)} -> T_{gamma(t_k)}
    Vec<double> apply(std::size_t k, const Vec<double>& v) const { return matvec(matrices[k], v); }
    const Mat<double>& final() const { return matrices.back(); }
};
TransportOperator parallel_transport(const Structure& S, const GeodesicPath& path, const DiffConfig& cfg = {});
std::vector<Vec<double>> transport_vector(const Structure& S, const GeodesicPath& path, const Vec<double>& v0,
                                          const DiffConfig& cfg = {});

struct JacobiField {
    GeodesicPath path;
    std::vector<Mat<double>> frames;  // transported orthonormal frame, columns eta_i(t)
    std::vector<Vec<double>> y;       // frame coefficients
    std::vector<Vec<double>> yprime;
    std::vector<Vec<double>> V;       // coordinates
};
// Solves nabla_T nabla_T V = R(T,V)T + (nabla_T Tor)(T,V) + Tor(T, nabla_T V) in a parallel frame.
JacobiField jacobi_field(const Structure& S, const GeodesicPath& path, const Vec<double>& V0,
                         const Vec<double>& V0prime, const DiffConfig& cfg = {});

// (nabla_X Tor)(Y, Z) at p.
Vec<double> torsion_derivative(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                               const Vec<double>& Z, const DiffConfig& cfg = {});

// Coordinate matrix of the linear map sending the adapted frame {xi, e, Je} at p to U applied to the frame at pt.
// U defaults to the identity; it must fix xi and commute with the frame complex structure.
Mat<double> frame_map(const Structure& S, const Vec<double>& p, const Structure& St, const Vec<double>& pt,
                      const std::optional<Mat<double>>& U = std::nullopt, const DiffConfig& cfg = {});
// Frame-coordinate rotation eta_1 -> e^{i phi} eta_1.
Mat<double> frame_rotation(int m, double phi);

struct IsometryCandidate {
    Structure source;
    Structure target;
    Vec<double> p;
    Vec<double> pt;
    Mat<double> rho;
    double radius = 0.3;
};

struct LinearIsometryResidual {
    double metric = 0.0;
    double J = 0.0;
    double xi = 0.0;
    double max() const;
};
// How far a linear map A: T_p -> T_pt is from a pseudo-Hermitian isometry.
LinearIsometryResidual linear_isometry_residual(const Structure& S, const Vec<double>& p, const Structure& St,
                                                const Vec<double>& pt, const Mat<double>& A,
                                                const DiffConfig& cfg = {});

// phi_t = Pt_t o rho o P_t^{-1} along gamma_u and the target geodesic with initial velocity rho u.
Mat<double> phi_t(const IsometryCandidate& c, const Vec<double>& u, double t, const DiffConfig& cfg = {});

Vec<double> cartan_map(const IsometryCandidate& c, const Vec<double>& q, const DiffConfig& cfg = {});

struct IsometryReport {
    double metric_residual = 0.0;     // f*g~ - g
    double J_residual = 0.0;          // df J - J~ df
    double theta_residual = 0.0;      // f*theta~ - theta
    double df_p_vs_rho = 0.0;
    double curvature_hypothesis = 0.0;  // <R(X,Y)Z,W> - <R~(phi X, phi Y) phi Z, phi W>
    double torsion_hypothesis = 0.0;    // <T(X,Y),Z> - <T~(phi X, phi Y), phi Z>
    double torsion_transfer = 0.0;      // the same for nabla_{gamma'} Tor
    double phi_isometry = 0.0;
    bool hypotheses_hold = false;
    double hypothesis_tol = 1e-5;
    std::vector<Vec<double>> samples;
    double max_isometry_residual() const;
};
// Samples are exp_p(u) for u uniform in the g-ball of radius c.radius; df by central differences (step 1e-4).
IsometryReport isometry_report(const IsometryCandidate& c, int samples, std::uint64_t seed,
                               const DiffConfig& cfg = {});
IsometryReport isometry_report(const IsometryCandidate& c, const std::vector<Vec<double>>& points,
                               const DiffConfig& cfg = {});

}  // namespace crgeo
