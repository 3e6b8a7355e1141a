#pragma once

#include <iosfwd>
#include <string>

#include "vbc/model.hpp"

namespace vbc {

// Static timeline plot: hard cluster id (y) vs relative time (x), drawn as a
// step line with per-cluster color bands.
void write_trace_svg(std::ostream& out, const EvolutionTrace& trace, int k,
                     const std::string& title);

} // namespace vbc
