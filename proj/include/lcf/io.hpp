#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "lcf/fn_grid.hpp"

namespace lcf {

/// Grid-function text format, version 1:
///
///     # lcf grid v1
///     dim <n>
///     axis <k> <lo> <hi> <count>        (one line per axis, k = 0..n-1)
///     kind logconcave | convex-extended
///     values
///     <value>                           (one per line, axis-major order)
///
/// Numbers use the shortest representation that reads back to the same
/// double; +∞ (convex-extended only) is written "inf". Blank lines and lines
/// starting with '#' after the first are ignored in the header.
using GridFunction = std::variant<LogConcaveFnGrid, ConvexFnGrid>;

void write_grid_function(std::ostream& out, const LogConcaveFnGrid& f);
void write_grid_function(std::ostream& out, const ConvexFnGrid& phi);
void save_grid_function(const std::string& path, const GridFunction& fn);

/// Throws ParseError with the offending line number. Log-concave files are
/// validated with `checks`; convex files only for shape and properness.
GridFunction read_grid_function(std::istream& in, LogConcaveChecks checks = {});
GridFunction load_grid_function(const std::string& path, LogConcaveChecks checks = {});

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace lcf
