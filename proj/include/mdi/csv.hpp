#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "mdi/scenario.hpp"

namespace mdi::csv {

// 17 significant digits, round-trip exact for doubles.
std::string format_real(double v);

// Header `z,x_obs,y` (plus `x_full,r_x` with oracle = true); missing x_obs
// cells are empty; LF line endings.
void write_dataset(std::ostream& os, const Dataset& data, bool oracle);

// Inverse of write_dataset. Requires the header row; columns are matched by
// name and unknown names are rejected. An empty x_obs cell (or one equal to
// na_token, when non-empty) marks a missing value; z and y must always be
// present. Throws ParseError with line/column diagnostics.
Dataset read_dataset(std::istream& is, std::string_view na_token = "");

}  // namespace mdi::csv
