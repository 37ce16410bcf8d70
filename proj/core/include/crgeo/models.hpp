#pragma once

#include <string>

#include "crgeo/structure.hpp"

namespace crgeo {

enum class ModelKind { heisenberg, sphere, bergman_cylinder, perturbed_heisenberg };

struct ModelSpec {
    ModelKind kind = ModelKind::heisenberg;
    int m = 1;
    double chart_radius = 0.0;  // 0 selects the per-kind default
};

// Coordinates are ordered (x1, y1, ..., xm, ym, t) for the Heisenberg group and
// the Bergman cylinder; the sphere chart is inverse stereographic projection.
Structure heisenberg(int m, double chart_radius = 4.0);
Structure cr_sphere(int m, double chart_radius = 1.5);
Structure bergman_cylinder(int m, double chart_radius = 0.7);

// Bergman cylinder with an explicit primitive scale k: theta = dt + k * sum(x dy - y dx) / (1 - |z|^2).
Structure bergman_cylinder_scaled(int m, double k, double chart_radius = 0.7);

// Same Kahler form on the ball, different primitive: alpha' = alpha + d(x1 * y1).
Structure bergman_cylinder_shifted_primitive(int m, double chart_radius = 0.7);

// Calibrated primitive scale for the Bergman cylinder (K_theta = -1 at the origin).
double bergman_calibration(int m);

Structure make_model(const ModelSpec& spec);
ModelKind parse_model_kind(const std::string& name);
std::string model_kind_name(ModelKind kind);
// Pseudo-Hermitian sectional curvature the model is built to carry; NaN when it is not a space form.
double model_curvature(ModelKind kind);

// theta -> mu theta, h -> lambda h, J unchanged.
Structure mixed_homothety(const Structure& s, double lambda, double mu);
// h = exp(u) L_theta on the Heisenberg group with u = x1/2 + 0.3 x1^2 + 0.2 t; not pseudo-Kahler.
Structure perturbed_heisenberg(int m, double chart_radius = 2.0);

// h -> exp(u) h.
Structure conformal_h(const Structure& s, const ScalarField& u, const std::string& label = "u");

}  // namespace crgeo
