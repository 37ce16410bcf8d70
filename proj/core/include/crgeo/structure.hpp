#pragma once

#include <map>
#include <string>

#include "crgeo/chart.hpp"
#include "crgeo/field.hpp"

namespace crgeo {

// (theta, J, h) on a single chart. h is a bilinear evaluator that is always
// composed with the horizontal projection before use.
struct Structure {
    Chart chart;
    std::string name;
    OneFormField theta;
    EndomorphismField J;
    MatrixField h;
    // Optional closed forms. `frame` returns a dim x m matrix whose columns are e_alpha.
    VectorField reeb;
    MatrixField frame;
    // Free-form numeric parameters reported alongside results (e.g. calibration constants).
    std::map<std::string, double> params;

    int dim() const { return chart.dim(); }
    int m() const { return chart.m(); }
};

}  // namespace crgeo
