#pragma once

#include <vector>

#include "crgeo/structure.hpp"

namespace crgeo {

struct AdaptedFrame {
    Vec<double> base;
    Vec<double> eta0;                 // Reeb field
    std::vector<Vec<double>> e;       // real horizontal frame e_alpha
    std::vector<Vec<double>> Je;      // J e_alpha
    std::vector<CVec<double>> eta;    // (e - iJe)/sqrt(2)
    std::vector<CVec<double>> etabar;
    CMat<double> E;                   // columns xi, eta_1..eta_m, etabar_1..etabar_m
    CMat<double> coframe;             // rows theta, theta^alpha, theta^alphabar
    std::vector<int> pivots;          // Gram-Schmidt pivot order; empty for the analytic frame
    bool analytic = false;

    int m() const { return static_cast<int>(e.size()); }
    int dim() const { return base.n; }
    // Complex frame vector by combined index: 0 -> xi, 1..m -> eta, m+1..2m -> etabar.
    CVec<double> vec(int A) const { return E.col(A); }
    // Real orthonormal basis {xi, e_1..e_m, Je_1..Je_m}.
    Vec<double> real_vec(int i) const;
};

enum class Projection { H, plus, minus, zero };

Vec<double> reeb_field(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});
Vec<double> project_H(const Structure& S, const Vec<double>& p, const Vec<double>& v, const DiffConfig& cfg = {});
CVec<double> project(const Structure& S, const Vec<double>& p, const CVec<double>& v, Projection which,
                     const DiffConfig& cfg = {});

// g(X,Y) = h(pi_H X, pi_H Y) + theta(X) theta(Y); complex arguments are paired bilinearly.
double metric(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
              const DiffConfig& cfg = {});
Cx<double> metric(const Structure& S, const Vec<double>& p, const CVec<double>& X, const CVec<double>& Y,
                  const DiffConfig& cfg = {});
Mat<double> metric_matrix(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});

// dtheta(X, J Y); throws ContractViolation unless both arguments are horizontal.
double levi_form(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                 const DiffConfig& cfg = {});
Cx<double> levi_form(const Structure& S, const Vec<double>& p, const CVec<double>& X, const CVec<double>& Y,
                     const DiffConfig& cfg = {});

// Omega(X, Y) = g(JX, Y)
double kahler_form(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                   const DiffConfig& cfg = {});
Mat<double> kahler_matrix(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});
TwoFormField kahler_form_field(const Structure& S, const DiffConfig& cfg = {});

// Pivot order: coordinate vectors in index order, skipping any whose horizontal residual has h-norm < 1e-8.
std::vector<int> choose_pivots(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});

struct FrameOptions {
    bool prefer_analytic = true;
};
AdaptedFrame adapted_frame(const Structure& S, const Vec<double>& p, const FrameOptions& opt = {},
                           const DiffConfig& cfg = {});
// The same smooth extension (pivot order or analytic frame) re-evaluated at q.
AdaptedFrame extend_frame(const Structure& S, const AdaptedFrame& germ, const Vec<double>& q,
                          const DiffConfig& cfg = {});

class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct StructureInvariants {
    double almost_contact = 0.0;    // J^2 + I - theta (x) xi
    double J_xi = 0.0;
    double theta_J = 0.0;
    double reeb_normalization = 0.0;  // theta(xi) - 1
    double h_invariance = 0.0;      // h(JX, JY) - h(X, Y) on H
    double h_min_pivot = 0.0;       // smallest Cholesky pivot of h on a Euclidean-orthonormal basis of H
    double ixi_dtheta = 0.0;
    double lie_xi_theta = 0.0;
    double integrability = 0.0;     // pi_-([eta_alpha, eta_beta])
    double volume = 0.0;            // relative error of theta ^ Omega^m = m! 2^m dv
    double first_structure = 0.0;   // dtheta - 2i L_{alpha betabar} theta^alpha ^ theta^betabar
    double algebraic() const;
    double first_order() const;
};
StructureInvariants structure_invariants(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});

}  // namespace crgeo
