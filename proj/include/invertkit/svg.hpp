#pragma once

#include <string>

#include "invertkit/interval.hpp"

namespace invertkit {

// Deterministic SVG for 1D and 2D pavings: accepted green, rejected red,
// boundary yellow. 1D draws the class strip under the model curve with
// the performance band marked; 2D draws one rectangle per box. Throws
// std::invalid_argument above 2 dimensions.
std::string render_paving_svg(const Paving& paving);

void save_paving_svg(const Paving& paving, const std::string& path);

}  // namespace invertkit
