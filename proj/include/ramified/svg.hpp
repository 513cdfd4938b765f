#pragma once

#include <string>

#include "ramified/flow.hpp"

namespace ramified {

/// 2-D drawing of a flow field: edges as lines with stroke width proportional
/// to w^alpha, divergence sources and sinks as filled circles. Write-only.
std::string render_svg(const FlowField& flow, double alpha);

}  // namespace ramified
