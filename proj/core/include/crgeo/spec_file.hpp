#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "crgeo/expr.hpp"
#include "crgeo/structure.hpp"

namespace crgeo {

// `field` is a JSON path such as "J[2][0]"; `column` is set when an expression failed to parse.
class SpecError : public std::runtime_error {
public:
    SpecError(const std::string& field, const std::string& msg, std::ptrdiff_t column = -1)
        : std::runtime_error(field.empty() ? msg : field + ": " + msg), field_(field), column_(column) {}
    const std::string& field() const { return field_; }
    std::ptrdiff_t column() const { return column_; }

private:
    std::string field_;
    std::ptrdiff_t column_;
};

// Declarative structure file:
//   {
//     "name": "heisenberg_spec",              optional
//     "m": 1,
//     "coordinates": ["x", "y", "t"],         optional; default x, y, t for m = 1 and x1, y1, ..., t otherwise
//     "constants": {"a": 0.5},                optional
//     "bounds": [[-1, 1], [-1, 1], [-1, 1]],
//     "theta": ["-y", "x", "1"],              covector components
//     "J": [[...], ...],                      J[i][j] = dx^i(J d_j)
//     "h": [[...], ...]                       bilinear form, composed with the horizontal projection
//   }
// Entries are expression strings or numbers. A named model is also accepted:
//   {"model": "sphere", "m": 1, "chart_radius": 1.2}
Structure parse_structure_spec(const std::string& json_text);
Structure load_structure_spec(const std::filesystem::path& path);

std::vector<std::string> default_coordinate_names(int m);

}  // namespace crgeo
