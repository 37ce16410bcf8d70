#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crgeo/linalg.hpp"

namespace crgeo {

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

class Chart {
public:
    Chart() = default;
    Chart(std::vector<Interval> bounds, std::string label);

    int dim() const { return static_cast<int>(bounds_.size()); }
    int m() const { return (dim() - 1) / 2; }
    const std::vector<Interval>& bounds() const { return bounds_; }
    const std::string& label() const { return label_; }

    bool contains(const Vec<double>& p) const;
    // Throws DomainError unless p lies strictly inside the box.
    void require_inside(const Vec<double>& p) const;

private:
    std::vector<Interval> bounds_;
    std::string label_;
};

enum class DiffMode { AD, FD };

struct DiffConfig {
    DiffMode mode = DiffMode::AD;
    double fd_step = 1e-5;   // first-order central differences
    double fd_step2 = 1e-4;  // steps used inside nested (second and higher order) differentiation
    int nesting_depth = 2;
};

}  // namespace crgeo
