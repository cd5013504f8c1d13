#pragma once

#include <string>

#include "fallrec/env.hpp"

namespace fallrec {

// SVG 1.1 line plot of an episode: capture point, CoM ground projection and
// the foot support interval over time. Self-contained, no dependencies.
void write_trace_svg(const std::string& path, const EpisodeTrace& trace);

}  // namespace fallrec
