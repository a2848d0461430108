#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lcf/fn_grid.hpp"
#include "lcf/grid.hpp"

namespace lcf {

/// Source grid (x), dual grid (y) and base point z of the transform
/// 𝓛^z φ(y) = sup_x [<x - z, y - z> - φ(x)].
struct ConjugatePlan {
    GridSpec source;
    GridSpec target;
    Point center;

    /// Dual grid equal to the source grid.
    static ConjugatePlan same_grid(const GridSpec& grid, Point z);
    /// Dual grid = source box scaled by `factor` about its midpoint, same node counts.
    static ConjugatePlan scaled(const GridSpec& grid, double factor, Point z);

    ConjugatePlan with_center(Point z) const { return {source, target, std::move(z)}; }
    /// Re-centers at z and translates the dual grid by z - center, so that
    /// y - z runs over the same offsets for every z.
    ConjugatePlan moved_to(const Point& z) const;
    ConjugatePlan with_source(GridSpec s) const { return {std::move(s), target, center}; }
    ConjugatePlan with_target(GridSpec t) const { return {source, std::move(t), center}; }
    /// Swaps source and target (the plan for transforming back).
    ConjugatePlan reversed() const { return {target, source, center}; }
};

struct ConjugateDiagnostics {
    /// Fraction of target nodes whose maximizer lies on the source boundary.
    double boundary_argmax_fraction = 0.0;
    /// boundary_argmax_fraction > 0.1%: the dual grid is likely too wide.
    bool boundary_warning = false;
    /// z is not an interior point of supp f (polar only).
    bool center_outside_support = false;
};

/// Exact discrete conjugate max_i [x_i y_j - v_i] for every y_j, O(N + M).
/// Entries equal to PlusInfinity are excluded. Throws AllInfinite.
std::vector<ExtendedValue> conjugate_1d(std::span<const ExtendedValue> values, std::span<const double> xs,
                                        std::span<const double> ys);

/// Same contract evaluated by the O(N·M) double loop. Ties keep the smaller x
/// index. Used as the reference for the fast path.
std::vector<ExtendedValue> conjugate_1d_brute(std::span<const ExtendedValue> values, std::span<const double> xs,
                                              std::span<const double> ys);

/// 𝓛^z φ on plan.target, one 1-D pass per axis (last axis first).
ConvexFnGrid legendre_nd(const ConvexFnGrid& phi, const Point& z, const ConjugatePlan& plan,
                         ConjugateDiagnostics* diagnostics = nullptr);

/// All-pairs evaluation of the same quantity, summing the per-axis products in
/// the association order of the factorized transform so results compare bit
/// for bit.
ConvexFnGrid legendre_nd_brute(const ConvexFnGrid& phi, const Point& z, const ConjugatePlan& plan);

/// f^z = e^{-𝓛^z φ} with φ = -log f; f = 0 maps to φ = +∞.
LogConcaveFnGrid polar(const LogConcaveFnGrid& f, const Point& z, const ConjugatePlan& plan,
                       ConjugateDiagnostics* diagnostics = nullptr, LogConcaveChecks checks = {});

/// 𝓛^z 𝓛^z φ through the plan's dual grid and back: the discrete closed
/// convex envelope of φ.
ConvexFnGrid double_conjugate(const ConvexFnGrid& phi, const Point& z, const ConjugatePlan& plan);
ConvexFnGrid double_conjugate(const ConvexFnGrid& phi, const Point& z);

}  // namespace lcf
