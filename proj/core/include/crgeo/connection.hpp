#pragma once

#include <vector>

#include "crgeo/cr.hpp"

namespace crgeo {

struct ConnectionData {
    Vec<double> base;
    int m = 0;
    AdaptedFrame frame;
    std::vector<CMat<double>> gamma;     // gamma[C](A, B) = Gamma^A_{CB}, nabla_{eta_C} eta_B = Gamma^A_{CB} eta_A
    std::vector<CVec<double>> brackets;  // brackets[A*n+B] = frame coefficients of [eta_A, eta_B]
    CMat<double> sigma;                  // sigma(eta_g) = sigma(a, g) eta_a as solved during construction

    int dim() const { return 2 * m + 1; }
    Cx<double> Gamma(int A, int C, int B) const { return gamma[static_cast<std::size_t>(C)](A, B); }
    // theta^A_B(eta_C)
    Cx<double> one_form(int A, int B, int C) const { return Gamma(A, C, B); }
    // theta^A(T(eta_C, eta_B))
    Cx<double> torsion(int A, int C, int B) const {
        return Gamma(A, C, B) - Gamma(A, B, C) - brackets[static_cast<std::size_t>(C * dim() + B)][A];
    }
};

ConnectionData connection_at(const Structure& S, const AdaptedFrame& frame, const Vec<double>& p,
                             const DiffConfig& cfg = {});
ConnectionData connection_at(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});

struct Christoffel {
    int n = 0;
    std::vector<double> a;
    double operator()(int k, int i, int j) const { return a[static_cast<std::size_t>((k * n + i) * n + j)]; }
};

// nabla_{d_i} d_j = Gamma(k, i, j) d_k
Christoffel coordinate_christoffels(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});

Vec<double> covariant_derivative(const Structure& S, const Vec<double>& p, const Vec<double>& X,
                                 const VectorField& Y, const DiffConfig& cfg = {});
CVec<double> covariant_derivative(const Structure& S, const Vec<double>& p, const CVec<double>& X,
                                  const ComplexVectorField& Y, const DiffConfig& cfg = {});

Vec<double> torsion(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                    const DiffConfig& cfg = {});
CVec<double> torsion(const Structure& S, const Vec<double>& p, const CVec<double>& X, const CVec<double>& Y,
                     const DiffConfig& cfg = {});

struct TorsionData {
    int m = 0;
    CMat<double> A_holo;              // A^alpha_beta
    CMat<double> A_mixed;             // A^alpha_betabar
    std::vector<CMat<double>> T2;     // T2[alpha](beta, gamma) = T^alpha_{beta gamma}
    Mat<double> tau;                  // tau(X) = T(xi, X) as a coordinate matrix
    Mat<double> sigma;                // tau o J + J o tau
    double theta11 = 0.0;             // max |pi_+ T(Z, Wbar)|
    double theta02 = 0.0;             // max |pi_+ T(Zbar, Wbar)|

    Vec<double> tau_of(const Vec<double>& X) const { return matvec(tau, X); }
    Vec<double> sigma_of(const Vec<double>& X) const { return matvec(sigma, X); }
};

TorsionData torsion_decomposition(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});
TorsionData torsion_decomposition(const ConnectionData& K, const Structure& S, const DiffConfig& cfg = {});

// Residuals of the defining properties, all expected to vanish for the canonical connection.
struct ConnectionResiduals {
    double metric_frame = 0.0;    // theta^alpha_beta + theta^betabar_alphabar
    double type = 0.0;            // Gamma^0_{CB}, Gamma^alphabar_{C beta}, Gamma^A_{C 0}
    double theta11 = 0.0;
    double sigma_skew = 0.0;      // A^alpha_beta - conj(A^beta_alpha)
    double torsion_zz = 0.0;      // pi_0 T(Z, W)
    double torsion_zbzb = 0.0;    // pi_+ T(Zbar, Wbar)
    double torsion_levi = 0.0;    // pi_0 T(Z, Wbar) - 2i L(Z, Wbar)
    double torsion_xi = 0.0;      // pi_0 T(xi, X)
    double max() const;
};
// `levi` holds L(eta_alpha, eta_betabar).
ConnectionResiduals connection_residuals(const ConnectionData& K, const CMat<double>& levi);

struct CoordinateAxioms {
    double nabla_g = 0.0;
    double nabla_J = 0.0;
    double nabla_xi = 0.0;
    double nabla_theta = 0.0;
    double torsion_antisym = 0.0;  // coordinate Gamma antisymmetric part vs frame torsion
    double max() const;
};
CoordinateAxioms coordinate_axioms(const Structure& S, const Vec<double>& p, const DiffConfig& cfg = {});

// L(eta_alpha, eta_betabar) at p for the given frame.
CMat<double> levi_matrix(const Structure& S, const AdaptedFrame& f, const DiffConfig& cfg = {});

struct Classification {
    bool horizontally_kahler = false;
    bool pseudo_kahler = false;
    bool sasakian_type = false;
    double theta20 = 0.0;        // max |T^alpha_{beta gamma}|
    double sigma = 0.0;          // max |A^alpha_beta|
    double tau_asym = 0.0;       // max |A^alphabar_beta - A^betabar_alpha|
    double tau = 0.0;            // max |A|
    double domega = 0.0;         // max |dOmega|
    double domega_h = 0.0;       // max |dOmega| on horizontal triples
    double ixi_domega = 0.0;     // max |dOmega(xi, ., .)|
    bool domega_pseudo_kahler = false;
    bool domega_horizontally_kahler = false;
    bool agrees = false;
    double tol = 0.0;
};
Classification classify(const Structure& S, const std::vector<Vec<double>>& points, double tol = 1e-6,
                        const DiffConfig& cfg = {});

}  // namespace crgeo
