#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lcf/grid.hpp"

namespace lcf {

/// Tolerances for the convex-function invariants.
struct ConvexChecks {
    double eps_conv_rel = 1e-9;  // relative to the finite value range
    bool convexity = true;
};

/// Extended-real convex function sampled on a grid. dom φ is the set of
/// finite nodes, the epigraph is implied.
class ConvexFnGrid {
public:
    /// Validates properness, contiguous finite intervals along every line and
    /// discrete midpoint convexity. Throws InvariantViolation.
    ConvexFnGrid(GridSpec spec, std::vector<ExtendedValue> values, ConvexChecks checks = {});

    /// Skips the convexity test (properness and shape are still checked).
    /// Conjugates accept arbitrary proper inputs; use this for those.
    static ConvexFnGrid unchecked(GridSpec spec, std::vector<ExtendedValue> values);

    const GridSpec& spec() const { return spec_; }
    std::span<const ExtendedValue> values() const { return values_; }
    const ExtendedValue& operator[](std::size_t i) const { return values_[i]; }

    /// Values as IEEE doubles with +inf outside the domain.
    std::vector<double> to_doubles() const;
    static ConvexFnGrid from_doubles(GridSpec spec, std::span<const double> values, bool check_convexity = true);

    /// Largest midpoint-convexity violation over all axis lines (0 if convex).
    double convexity_defect() const;
    bool finite_intervals_contiguous() const;

private:
    ConvexFnGrid(GridSpec spec, std::vector<ExtendedValue> values, bool);

    GridSpec spec_;
    std::vector<ExtendedValue> values_;
};

struct LogConcaveChecks {
    double eps_lc = 1e-9;
    double decay_ratio = 1e-6;
    bool log_concavity = true;
    bool boundary_decay = true;
    static constexpr double kMinMass = 1e-300;
    static constexpr double kMaxMass = 1e300;
};

/// Nonnegative function f = e^{-φ} sampled on a grid with 0 < ∫f < ∞.
class LogConcaveFnGrid {
public:
    LogConcaveFnGrid(GridSpec spec, std::vector<double> values, LogConcaveChecks checks = {});

    const GridSpec& spec() const { return spec_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double max_value() const;

    /// φ = -log f with +inf where f = 0.
    ConvexFnGrid to_convex(bool check_convexity = false) const;
    /// f = e^{-φ}; PlusInfinity maps to 0.
    static LogConcaveFnGrid from_convex(const ConvexFnGrid& phi, LogConcaveChecks checks = {});

    /// Worst relative log-concavity defect along lines (0 when log-concave).
    double log_concavity_defect() const;
    /// max over boundary nodes divided by the overall max.
    double boundary_ratio() const;

private:
    GridSpec spec_;
    std::vector<double> values_;
};

// --- quadrature ----------------------------------------------------------

/// Tensor Riemann rule h^n Σ f over all nodes, accumulated exactly so the
/// result does not depend on summation order.
double integrate(const LogConcaveFnGrid& f);
double integrate_values(const GridSpec& spec, std::span<const double> values);

/// Component-wise ∫x_k f / ∫f under the same rule.
Point barycenter(const LogConcaveFnGrid& f);

/// Masses on either side of H. Nodes lying on H are split evenly.
struct HalfSpaceMasses {
    double plus = 0.0;
    double minus = 0.0;
};
HalfSpaceMasses half_space_masses(const LogConcaveFnGrid& f, const Hyperplane& h);

/// Exact-sum of the values along every line parallel to `axis`, in line order.
std::vector<double> line_sums(const LogConcaveFnGrid& f, std::size_t axis);

/// Max |f(x'+tu) - f(x'-tu)| over node pairs mirrored through H.
double symmetry_defect(const LogConcaveFnGrid& f, const Hyperplane& h);
double symmetry_defect(const GridSpec& spec, std::span<const double> values, const Hyperplane& h);

/// Index of H's node on its axis or OffsetNotOnGrid.
std::size_t hyperplane_node(const GridSpec& spec, const Hyperplane& h);

// --- closed-form families ------------------------------------------------

struct Gaussian {
    Point mean;
    std::vector<double> variance;  // diagonal covariance
};

/// φ(x) = <rate, x> + shift on the box [lo, hi] (bounds may be infinite), +∞ outside.
struct ExponentialBox {
    std::vector<double> rate;
    Point lo;
    Point hi;
    double shift = 0.0;
};

/// φ = 0 on [lo, hi], +∞ outside.
struct BoxIndicator {
    Point lo;
    Point hi;
};

/// φ(x) = max_j(<a_j, x> + b_j) + quadratic * |x - center|^2.
struct PolyhedralQuadratic {
    std::vector<Point> slopes;
    std::vector<double> intercepts;
    double quadratic = 0.0;
    Point center;
};

using Primitive = std::variant<Gaussian, ExponentialBox, BoxIndicator, PolyhedralQuadratic>;

/// One summand of φ, acting on the listed coordinates (empty: all of them).
struct Term {
    Primitive primitive;
    std::vector<std::size_t> axes;
};

/// φ = Σ terms. A product form f = g(x_0) h(x_1) is two terms on disjoint axes.
class Expression {
public:
    Expression() = default;
    explicit Expression(Primitive p) { terms_.push_back({std::move(p), {}}); }
    Expression(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static Expression gaussian(Point mean, std::vector<double> variance);
    static Expression standard_gaussian(std::size_t dim);
    static Expression exponential_box(std::vector<double> rate, Point lo, Point hi, double shift = 0.0);
    static Expression box_indicator(Point lo, Point hi);
    static Expression polyhedral_quadratic(std::vector<Point> slopes, std::vector<double> intercepts,
                                           double quadratic, Point center = {});
    /// |x|_1 = max over sign patterns, as a polyhedral term.
    static Expression l1_norm(std::size_t dim, double scale = 1.0);

    /// Term-wise sum (the product of the two log-concave functions).
    Expression operator+(const Expression& other) const;
    /// Re-targets all terms of this expression to the given coordinates.
    Expression on_axes(std::vector<std::size_t> axes) const;

    const std::vector<Term>& terms() const { return terms_; }
    /// φ(x), +inf outside the domain.
    double phi(std::span<const double> x) const;
    std::string describe() const;

private:
    std::vector<Term> terms_;
};

LogConcaveFnGrid sample(const Expression& expr, const GridSpec& spec, LogConcaveChecks checks = {});
ConvexFnGrid sample_convex(const Expression& expr, const GridSpec& spec, ConvexChecks checks = {});

}  // namespace lcf
