#pragma once

#include <array>
#include <functional>
#include <vector>

#include "crgeo/connection.hpp"

namespace crgeo {

struct CurvatureData {
    Vec<double> base;
    int m = 0;
    AdaptedFrame frame;
    std::vector<double> Rc;        // R(d_a, d_b) d_c = Rc[((k*n+c)*n+a)*n+b] d_k
    std::vector<Cx<double>> R;     // R(eta_C, eta_D) eta_B = R[((A*n+B)*n+C)*n+D] eta_A
    Mat<double> g;
    std::vector<double> K_theta;   // R(e_a, Je_a, e_a, Je_a)
    CMat<double> ric_b;            // R_{lambda mubar}
    CMat<double> ric_b_conj;       // (lambda, mu) -> R_{mubar lambda}
    double rho = 0.0;
    double rho_M = 0.0;

    int dim() const { return base.n; }
    Cx<double> frame_component(int A, int B, int C, int D) const {
        const int n = dim();
        return R[static_cast<std::size_t>(((A * n + B) * n + C) * n + D)];
    }
    // R(X, Y) Z
    Vec<double> apply(const Vec<double>& X, const Vec<double>& Y, const Vec<double>& Z) const;
    // R(X, Y, Z, W) = <R(Z, W) Y, X>
    double scalar(const Vec<double>& X, const Vec<double>& Y, const Vec<double>& Z, const Vec<double>& W) const;
    // trace{Z -> R(Z, Y) X}
    double ricci(const Vec<double>& X, const Vec<double>& Y) const;
};

CurvatureData curvature_components(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});

Vec<double> curvature(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                      const Vec<double>& Z, const DiffConfig& cfg = {});
// Literal nabla_X nabla_Y Z - nabla_Y nabla_X Z for constant coordinate X, Y.
Vec<double> curvature(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                      const VectorField& Z, const DiffConfig& cfg = {});
double curvature_scalar(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                        const Vec<double>& Z, const Vec<double>& W, const DiffConfig& cfg = {});

struct StructureResiduals {
    double first = 0.0;
    double second = 0.0;
    double dtheta_levi = 0.0;
    double metric_skew = 0.0;
    double max() const;
};
StructureResiduals structure_equation_residuals(const Structure& S, const Vec<double>& p,
                                                const DiffConfig& cfg = {});

struct BianchiResiduals {
    std::array<double, 7> identity{};     // the torsion/curvature relations in order
    bool simplified_applicable = false;  // sigma = 0 and Theta^(2,0) = 0 at p
    std::array<double, 4> simplified{};
    double ricci_contraction = 0.0;       // R_{lambda mubar} versus R^alpha_{lambda alpha mubar}
    double vertical_and_type = 0.0;       // R^0_{BCD}, R^A_{0CD}, R^alpha_{betabar CD}
    double antisymmetry = 0.0;            // R^A_{BCD} + R^A_{BDC}
    double metric_skew = 0.0;             // R_{alphabar B CD} + R_{B alphabar CD}
    double max() const;
};
BianchiResiduals bianchi_residuals(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});

// Throws ContractViolation when |v1 ^ v2| < 1e-10.
double sectional(const Structure& S, const Vec<double>& p, const Vec<double>& v1, const Vec<double>& v2,
                 const DiffConfig& cfg = {});
double sectional(const CurvatureData& R, const Vec<double>& v1, const Vec<double>& v2);
// K on span{e, Je} after projecting e to H.
double pseudo_hermitian_sectional(const Structure& S, const Vec<double>& p, const Vec<double>& e,
                                  const DiffConfig& cfg = {});
double pseudo_hermitian_sectional(const CurvatureData& R, const Structure& S, const Vec<double>& e);

struct RicciData {
    Mat<double> ric;          // Ric(d_i, d_j)
    CMat<double> ric_b;       // R_{lambda mubar}
    CMat<double> ric_b_conj;  // R_{mubar lambda}
    double rho = 0.0;
    double rho_M = 0.0;
    double vertical_trace = 0.0;  // max |<R(xi, Y) X, xi>| over frame X, Y
    double ricci(const Vec<double>& X, const Vec<double>& Y) const { return bilinear(ric, X, Y); }
};
RicciData ricci_and_scalar(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});
RicciData ricci_and_scalar(const CurvatureData& R);

// c/4 of the Sasakian space-form tensor, arguments projected to H.
double space_form_tensor(const Structure& S, const Vec<double>& p, double c, const Vec<double>& X,
                         const Vec<double>& Y, const Vec<double>& Z, const Vec<double>& W,
                         const DiffConfig& cfg = {});

struct PseudoEinstein {
    bool is_pseudo_einstein = false;
    double lambda = 0.0;
    double residual = 0.0;   // max |R_{lambda mubar} - lambda delta|
    double variance = 0.0;   // variance of pointwise lambda estimates
    double asymmetry = 0.0;  // max |R_{lambda mubar} - R_{mubar lambda}|
};
PseudoEinstein pseudo_einstein_check(const Structure& S, const std::vector<Vec<double>>& points, double tol = 1e-6,
                                     const DiffConfig& cfg = {});

// Recovers a Kahler-type curvature tensor on H from Q(X) = R(X, JX, X, JX):
// 32 R(X,Y,X,Y) = 3Q(X+JY) + 3Q(X-JY) - Q(X+Y) - Q(X-Y) - 4Q(X) - 4Q(Y),
// 6 R(X,Y,Z,W) = d2/dsdt [k(X+sZ, Y+tW) - k(X+sW, Y+tZ)] with k(X,Y) = R(X,Y,X,Y).
double reconstruct_from_holomorphic(const std::function<double(const Vec<double>&)>& Q, const Mat<double>& J,
                                    const Vec<double>& X, const Vec<double>& Y, const Vec<double>& Z,
                                    const Vec<double>& W);

}  // namespace crgeo
