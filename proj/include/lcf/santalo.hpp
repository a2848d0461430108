#pragma once

#include <cstddef>
#include <vector>

#include "lcf/fn_grid.hpp"
#include "lcf/grid.hpp"
#include "lcf/legendre.hpp"

namespace lcf {

// The plan's dual grid is the grid used at z = plan.center; for any other z
// it is translated by z - plan.center, which makes the discrete F smooth in z
// and its gradient exactly the barycenter formula below.

/// F(z) = ∫ f^z.
double polar_mass(const LogConcaveFnGrid& f, const Point& z, const ConjugatePlan& plan);

/// grad F(z) = (barycenter(f^z) - z) · ∫f^z.
std::vector<double> polar_mass_gradient(const LogConcaveFnGrid& f, const Point& z, const ConjugatePlan& plan);

struct SantaloOptions {
    double armijo = 1e-4;
    double shrink = 0.5;
    double tol_grad_rel = 1e-7;  // tol_grad = tol_grad_rel · F(z)
    int max_iters = 500;
    int max_backtracks = 60;
};

struct SantaloResult {
    Point z_star;
    double value = 0.0;      // F(z*)
    double grad_norm = 0.0;  // |P_G grad F(z*)|
    double tol_grad = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Minimizes F over G by projected, diagonally preconditioned gradient
/// descent with Armijo backtracking. Does not throw on non-convergence:
/// check `converged`. Throws SubspaceOutsideSupport when G misses supp f.
SantaloResult santalo_point(const LogConcaveFnGrid& f, const AffineSubspace& g, const ConjugatePlan& plan,
                            const SantaloOptions& options = {});

struct LambdaSplit {
    Hyperplane hyperplane;        // snapped to a node
    double unsnapped_offset = 0;  // offset found by bisection
    double unsnapped_lambda = 0;  // upper mass fraction at that offset (cell model)
    double achieved_lambda = 0;   // ∫_{H+} f / ∫ f after snapping
};

/// λ-separating hyperplane orthogonal to `axis`: bisection on the cumulative
/// marginal (each node's mass spread uniformly over its cell), then snapping
/// to the nearest interior node. Throws DegenerateMarginal.
LambdaSplit lambda_split(const LogConcaveFnGrid& f, std::size_t axis, double lambda, double tol_split = 1e-9);

}  // namespace lcf
