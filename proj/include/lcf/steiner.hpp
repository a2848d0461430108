#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lcf/fn_grid.hpp"
#include "lcf/grid.hpp"

namespace lcf {

/// Symmetric decreasing rearrangement of one line about `center`.
///
/// Values are sorted in decreasing order v0 >= v1 >= ...; v0 goes to the
/// center and node center±j receives (v_{2j-1} + v_{2j}) / 2. This is the
/// layer-cake rearrangement on the grid when a superlevel set of even length
/// covers its two outermost nodes by half each. The center value is then
/// corrected by the rounding residual so that the exactly rounded sum of the
/// line is unchanged. Lines that are already symmetric and decreasing about
/// the center are returned unchanged.
///
/// Throws CenterTooCloseToEdge when a nonzero value would leave the line.
std::vector<double> rearrange_line(std::span<const double> profile, std::size_t center_index);

/// Steiner symmetrization about H, line by line along H.axis. Every line's
/// rounded sum and the rounded total sum are preserved bit for bit.
LogConcaveFnGrid steiner_symmetrize(const LogConcaveFnGrid& f, const Hyperplane& h);

/// φ-level counterpart: -log S_H e^{-φ}, +∞ where the rearranged function is 0.
ConvexFnGrid steiner_symmetrize_convex(const ConvexFnGrid& phi, const Hyperplane& h);

/// Extends the grid with zeros along H.axis so that H's node is the middle
/// node. Steiner symmetrization about H then never spills off the grid.
LogConcaveFnGrid pad_symmetric(const LogConcaveFnGrid& f, const Hyperplane& h);

enum class AsplundMethod {
    /// Maximum over all node splits x = x1 + x2.
    Direct,
    /// 1-D only: merge of the log-increments of the two supports (exact for
    /// log-concave inputs, linear time).
    Merge,
    /// Merge for large 1-D inputs, Direct otherwise.
    Auto,
};

/// (f ⋆ g)(x) = max over node splits of f(x1) g(x2). Output bounds are the
/// sums of the input bounds, spacing equal to the (common) input spacing.
LogConcaveFnGrid asplund_product(const LogConcaveFnGrid& f, const LogConcaveFnGrid& g,
                                 AsplundMethod method = AsplundMethod::Auto);

/// The same product computed as exp(-(φ □ ψ)) with the infimal convolution
/// of φ = -log f and ψ = -log g. Agrees with the direct route up to the
/// rounding of exp/log.
LogConcaveFnGrid asplund_product_inf_convolution(const LogConcaveFnGrid& f, const LogConcaveFnGrid& g);

/// Grid with f's spacing whose box covers λ times f's box.
GridSpec homothety_grid(double lambda, const GridSpec& source);

/// (λ·f)(x) = f(x/λ)^λ on `target`, with -log f interpolated multilinearly
/// between source nodes and 0 outside supp f.
LogConcaveFnGrid homothety(double lambda, const LogConcaveFnGrid& f, const GridSpec& target);
LogConcaveFnGrid homothety(double lambda, const LogConcaveFnGrid& f);

struct PrekopaReport {
    double lambda = 0.5;
    double lhs = 0.0;  // ∫ (λ·f) ⋆ ((1-λ)·g)
    double rhs = 0.0;  // (∫f)^λ (∫g)^{1-λ}
    bool ok = false;
};

PrekopaReport prekopa_check(const LogConcaveFnGrid& f, const LogConcaveFnGrid& g, double lambda,
                            double eps_ineq = 1e-6);

}  // namespace lcf
