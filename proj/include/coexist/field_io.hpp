#pragma once

#include <string>

#include "coexist/grid.hpp"

namespace coexist {

/// Full-precision (17 significant digits) decimal rendering of a double.
std::string format_full(double v);

/// CSV dump of a field: header "x,value" (1D) or "x,y,value" (2D), one row
/// per interior node in row-major order, full double precision.
std::string field_to_csv(const ScalarField& f);

void write_field_csv(const std::string& path, const ScalarField& f);

} // namespace coexist
