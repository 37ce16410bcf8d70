#pragma once

#include "crgeo/chart.hpp"
#include "crgeo/field.hpp"

namespace crgeo {

// v(f)(p)
double directional_derivative(const Chart& chart, const ScalarField& f, const Vec<double>& p,
                              const Vec<double>& v, const DiffConfig& cfg = {});

// [X, Y]^i = X^j d_j Y^i - Y^j d_j X^i
Vec<double> lie_bracket(const Chart& chart, const VectorField& X, const VectorField& Y, const Vec<double>& p,
                        const DiffConfig& cfg = {});
CVec<double> lie_bracket(const Chart& chart, const ComplexVectorField& X, const ComplexVectorField& Y,
                         const Vec<double>& p, const DiffConfig& cfg = {});

// d(omega)(X, Y) with 2 d omega(X,Y) = X omega(Y) - Y omega(X) - omega([X,Y]); X, Y extended
// as coordinate-constant fields.
double exterior_derivative(const Chart& chart, const OneFormField& w, const Vec<double>& p, const Vec<double>& X,
                           const Vec<double>& Y, const DiffConfig& cfg = {});
Cx<double> exterior_derivative(const Chart& chart, const OneFormField& w, const Vec<double>& p,
                               const CVec<double>& X, const CVec<double>& Y, const DiffConfig& cfg = {});
// Same convention evaluated literally on genuine vector fields.
double exterior_derivative(const Chart& chart, const OneFormField& w, const VectorField& X, const VectorField& Y,
                           const Vec<double>& p, const DiffConfig& cfg = {});
// Matrix of d(omega)(d_i, d_j).
Mat<double> exterior_derivative_matrix(const Chart& chart, const OneFormField& w, const Vec<double>& p,
                                       const DiffConfig& cfg = {});

// (a ^ b)(X, Y) = 1/2 (a(X) b(Y) - a(Y) b(X))
TwoFormField wedge_1_1(const OneFormField& a, const OneFormField& b);

double eval_two_form(const Mat<double>& w, const Vec<double>& X, const Vec<double>& Y);
Cx<double> eval_two_form(const Mat<double>& w, const CVec<double>& X, const CVec<double>& Y);

// d(Omega)(X, Y, Z) for a 2-form, coordinate-constant arguments:
// 3 d Omega(X,Y,Z) = X Omega(Y,Z) - Y Omega(X,Z) + Z Omega(X,Y).
double exterior_derivative2(const Chart& chart, const TwoFormField& w, const Vec<double>& p, const Vec<double>& X,
                            const Vec<double>& Y, const Vec<double>& Z, const DiffConfig& cfg = {});
// All coordinate components dOmega(d_a, d_b, d_c), flattened [(a*n+b)*n+c].
std::vector<double> exterior_derivative2_components(const Chart& chart, const TwoFormField& w,
                                                    const Vec<double>& p, const DiffConfig& cfg = {});

}  // namespace crgeo
