#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lcf/verify.hpp"

namespace lcf {

/// Pipeline report as a JSON document:
///   {"dim", "lambda_requested", "lambda_1", "initial_mass", "initial_polar_mass",
///    "initial_product", "bound", "aborted", "error", "passed",
///    "steps": [{"i", "axis", "offset", "lambda", "z": [..], "mass", "polar_mass",
///               "pre_polar_mass", "product", "involution_residual", "santalo_converged"}],
///    "final_symmetry_defects": [..],
///    "verdicts": [{"name", "passed", "value", "threshold", "detail"}]}
/// Non-finite numbers are written as null.
std::string pipeline_report_json(const PipelineReport& report, int indent = 2);

/// One CSV row per step with the header
///   i,axis,offset,lambda,z,mass,polar_mass,pre_polar_mass,product,involution_residual,santalo_converged
/// where z is the coordinates joined by ';'.
void write_pipeline_csv(std::ostream& out, const PipelineReport& report);

/// Verdict table: name,passed,value,threshold,detail (detail quoted).
void write_verdicts_csv(std::ostream& out, const std::vector<Verdict>& verdicts);

}  // namespace lcf
