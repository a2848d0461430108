#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace lcf {

/// A point of R^n, n = GridSpec::dim().
using Point = std::vector<double>;

struct AxisSpec {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 3;

    bool operator==(const AxisSpec&) const = default;
};

/// Axis-aligned uniform tensor grid in dimension 1..3.
///
/// Nodes are stored axis-major: axis 0 is the outermost (slowest) index and
/// the last axis is contiguous in memory. Node coordinates are always
/// computed as lo + i * step so they are reproducible bit for bit.
class GridSpec {
public:
    static constexpr std::size_t kMaxDim = 3;
    static constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 24;

    GridSpec() = default;
    explicit GridSpec(std::vector<AxisSpec> axes);

    /// Uniform cube [lo, hi]^dim with `count` nodes per axis.
    static GridSpec cube(std::size_t dim, double lo, double hi, std::size_t count);

    /// Process-wide cap on total node count (LCF_GRID_CAP overrides the default).
    static std::size_t node_cap();

    std::size_t dim() const { return dim_; }
    const AxisSpec& axis(std::size_t k) const { return axes_[k]; }
    std::size_t count(std::size_t k) const { return axes_[k].count; }
    double lo(std::size_t k) const { return axes_[k].lo; }
    double hi(std::size_t k) const { return axes_[k].hi; }
    double step(std::size_t k) const { return steps_[k]; }
    std::size_t stride(std::size_t k) const { return strides_[k]; }
    std::size_t size() const { return size_; }

    double coord(std::size_t k, std::size_t i) const { return axes_[k].lo + static_cast<double>(i) * steps_[k]; }
    std::vector<double> coords(std::size_t k) const;

    /// Volume of one cell, the product of the per-axis steps.
    double cell_volume() const;
    /// Longest box edge; used to scale point tolerances.
    double extent() const;

    std::size_t flat(const std::array<std::size_t, kMaxDim>& idx) const;
    std::array<std::size_t, kMaxDim> unflat(std::size_t flat_index) const;
    Point node_point(std::size_t flat_index) const;

    /// Index of the node whose coordinate matches `offset` up to 1e-9 of a
    /// step, if any.
    std::optional<std::size_t> node_index(std::size_t k, double offset) const;
    /// Index of the nearest node (clamped to the axis).
    std::size_t nearest_index(std::size_t k, double offset) const;

    /// Number of lines parallel to axis k and the flat index of the first node
    /// of line `line`.
    std::size_t line_count(std::size_t k) const { return size_ / axes_[k].count; }
    std::size_t line_start(std::size_t k, std::size_t line) const;

    /// Same box with spacing equal up to relative 1e-12 on every axis.
    bool same_spacing(const GridSpec& other) const;
    bool operator==(const GridSpec& other) const { return dim_ == other.dim_ && axes_ == other.axes_; }

private:
    std::size_t dim_ = 0;
    std::array<AxisSpec, kMaxDim> axes_{};
    std::array<double, kMaxDim> steps_{};
    std::array<std::size_t, kMaxDim> strides_{};
    std::size_t size_ = 0;
};

/// Value in R ∪ {+∞}. Finite values are never NaN.
class ExtendedValue {
public:
    constexpr ExtendedValue() = default;
    static ExtendedValue finite(double v);
    static constexpr ExtendedValue plus_infinity() { return ExtendedValue(false, 0.0); }

    constexpr bool is_finite() const { return finite_; }
    constexpr bool is_infinite() const { return !finite_; }
    /// Only meaningful when finite.
    constexpr double value() const { return value_; }
    /// The value as an IEEE double, +inf for PlusInfinity.
    double to_double() const;
    static ExtendedValue from_double(double v);

    friend ExtendedValue operator+(ExtendedValue a, ExtendedValue b);
    friend ExtendedValue max(ExtendedValue a, ExtendedValue b);
    friend bool operator==(const ExtendedValue&, const ExtendedValue&) = default;

private:
    constexpr ExtendedValue(bool f, double v) : finite_(f), value_(v) {}
    bool finite_ = true;
    double value_ = 0.0;
};

/// H = {x_axis = offset}, unit normal e_axis; H+ = {x_axis >= offset}.
struct Hyperplane {
    std::size_t axis = 0;
    double offset = 0.0;
};

/// Intersection of axis-aligned hyperplanes; the remaining axes are free.
class AffineSubspace {
public:
    AffineSubspace() = default;
    explicit AffineSubspace(std::size_t dim) : dim_(dim) {}
    AffineSubspace(std::size_t dim, std::vector<Hyperplane> fixed);

    static AffineSubspace whole_space(std::size_t dim) { return AffineSubspace(dim); }

    std::size_t dim() const { return dim_; }
    const std::vector<Hyperplane>& fixed() const { return fixed_; }
    bool is_fixed(std::size_t axis) const;
    std::vector<std::size_t> free_axes() const;
    /// Sets the fixed coordinates of z (orthogonal projection onto G).
    Point project(Point z) const;
    bool contains(const Point& z) const;
    AffineSubspace with(const Hyperplane& h) const;

private:
    std::size_t dim_ = 0;
    std::vector<Hyperplane> fixed_;
};

}  // namespace lcf
