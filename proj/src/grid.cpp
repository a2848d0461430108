#include "lcf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "lcf/errors.hpp"

namespace lcf {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::MassOutOfRange: return "MassOutOfRange";
        case ErrorKind::OffsetNotOnGrid: return "OffsetNotOnGrid";
        case ErrorKind::AllInfinite: return "AllInfinite";
        case ErrorKind::PlanMismatch: return "PlanMismatch";
        case ErrorKind::CenterTooCloseToEdge: return "CenterTooCloseToEdge";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::NotConverged: return "NotConverged";
        case ErrorKind::SubspaceOutsideSupport: return "SubspaceOutsideSupport";
        case ErrorKind::DegenerateMarginal: return "DegenerateMarginal";
        case ErrorKind::SliceOutOfRange: return "SliceOutOfRange";
        case ErrorKind::HypothesisFailed: return "HypothesisFailed";
        case ErrorKind::NotUnconditional: return "NotUnconditional";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

GridSpec::GridSpec(std::vector<AxisSpec> axes) {
    require(!axes.empty() && axes.size() <= kMaxDim, ErrorKind::InvalidArgument,
            "grid dimension must be 1..3, got " + std::to_string(axes.size()));
    dim_ = axes.size();
    size_ = 1;
    for (std::size_t k = 0; k < dim_; ++k) {
        const AxisSpec& a = axes[k];
        require(std::isfinite(a.lo) && std::isfinite(a.hi) && a.lo < a.hi, ErrorKind::InvalidArgument,
                "axis " + std::to_string(k) + ": need lo < hi");
        require(a.count >= 3, ErrorKind::InvalidArgument, "axis " + std::to_string(k) + ": need at least 3 nodes");
        axes_[k] = a;
        steps_[k] = (a.hi - a.lo) / static_cast<double>(a.count - 1);
        require(size_ <= node_cap() / a.count, ErrorKind::InvalidArgument, "grid exceeds the node cap");
        size_ *= a.count;
    }
    std::size_t s = 1;
    for (std::size_t k = dim_; k-- > 0;) {
        strides_[k] = s;
        s *= axes_[k].count;
    }
}

GridSpec GridSpec::cube(std::size_t dim, double lo, double hi, std::size_t count) {
    return GridSpec(std::vector<AxisSpec>(dim, AxisSpec{lo, hi, count}));
}

std::size_t GridSpec::node_cap() {
    static const std::size_t cap = [] {
        if (const char* env = std::getenv("LCF_GRID_CAP")) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (end != env && v > 0) return static_cast<std::size_t>(v);
        }
        return kDefaultNodeCap;
    }();
    return cap;
}

std::vector<double> GridSpec::coords(std::size_t k) const {
    std::vector<double> out(axes_[k].count);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = coord(k, i);
    return out;
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < dim_; ++k) v *= steps_[k];
    return v;
}

double GridSpec::extent() const {
    double e = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) e = std::max(e, axes_[k].hi - axes_[k].lo);
    return e;
}

std::size_t GridSpec::flat(const std::array<std::size_t, kMaxDim>& idx) const {
    std::size_t f = 0;
    for (std::size_t k = 0; k < dim_; ++k) f += idx[k] * strides_[k];
    return f;
}

std::array<std::size_t, GridSpec::kMaxDim> GridSpec::unflat(std::size_t flat_index) const {
    std::array<std::size_t, kMaxDim> idx{};
    for (std::size_t k = 0; k < dim_; ++k) {
        idx[k] = flat_index / strides_[k];
        flat_index %= strides_[k];
    }
    return idx;
}

Point GridSpec::node_point(std::size_t flat_index) const {
    const auto idx = unflat(flat_index);
    Point p(dim_);
    for (std::size_t k = 0; k < dim_; ++k) p[k] = coord(k, idx[k]);
    return p;
}

std::optional<std::size_t> GridSpec::node_index(std::size_t k, double offset) const {
    const std::size_t i = nearest_index(k, offset);
    if (std::fabs(coord(k, i) - offset) <= 1e-9 * steps_[k]) return i;
    return std::nullopt;
}

std::size_t GridSpec::nearest_index(std::size_t k, double offset) const {
    const double r = std::nearbyint((offset - axes_[k].lo) / steps_[k]);
    if (!(r > 0.0)) return 0;
    const auto last = axes_[k].count - 1;
    return r >= static_cast<double>(last) ? last : static_cast<std::size_t>(r);
}

std::size_t GridSpec::line_start(std::size_t k, std::size_t line) const {
    // Lines along k are enumerated by the remaining axes in axis-major order.
    const std::size_t inner = strides_[k];
    const std::size_t outer = line / inner;
    const std::size_t rest = line % inner;
    return outer * inner * axes_[k].count + rest;
}

bool GridSpec::same_spacing(const GridSpec& other) const {
    if (dim_ != other.dim_) return false;
    for (std::size_t k = 0; k < dim_; ++k)
        if (std::fabs(steps_[k] - other.steps_[k]) > 1e-12 * steps_[k]) return false;
    return true;
}

ExtendedValue ExtendedValue::finite(double v) {
    require(std::isfinite(v), ErrorKind::InvalidArgument, "ExtendedValue::finite given a non-finite value");
    return ExtendedValue(true, v);
}

double ExtendedValue::to_double() const {
    return finite_ ? value_ : std::numeric_limits<double>::infinity();
}

ExtendedValue ExtendedValue::from_double(double v) {
    require(!std::isnan(v) && v != -std::numeric_limits<double>::infinity(), ErrorKind::InvalidArgument,
            "extended value must be finite or +inf");
    return std::isinf(v) ? plus_infinity() : ExtendedValue(true, v);
}

ExtendedValue operator+(ExtendedValue a, ExtendedValue b) {
    if (!a.finite_ || !b.finite_) return ExtendedValue::plus_infinity();
    return ExtendedValue::from_double(a.value_ + b.value_);
}

ExtendedValue max(ExtendedValue a, ExtendedValue b) {
    if (!a.finite_) return a;
    if (!b.finite_) return b;
    return a.value_ >= b.value_ ? a : b;
}

AffineSubspace::AffineSubspace(std::size_t dim, std::vector<Hyperplane> fixed) : dim_(dim), fixed_(std::move(fixed)) {
    require(fixed_.size() <= dim_, ErrorKind::InvalidArgument, "too many fixed axes");
    for (std::size_t i = 0; i < fixed_.size(); ++i) {
        require(fixed_[i].axis < dim_, ErrorKind::InvalidArgument, "fixed axis out of range");
        for (std::size_t j = 0; j < i; ++j)
            require(fixed_[i].axis != fixed_[j].axis, ErrorKind::InvalidArgument, "fixed axes must be distinct");
    }
}

bool AffineSubspace::is_fixed(std::size_t axis) const {
    return std::any_of(fixed_.begin(), fixed_.end(), [&](const Hyperplane& h) { return h.axis == axis; });
}

std::vector<std::size_t> AffineSubspace::free_axes() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < dim_; ++k)
        if (!is_fixed(k)) out.push_back(k);
    return out;
}

Point AffineSubspace::project(Point z) const {
    for (const auto& h : fixed_) z[h.axis] = h.offset;
    return z;
}

bool AffineSubspace::contains(const Point& z) const {
    return std::all_of(fixed_.begin(), fixed_.end(), [&](const Hyperplane& h) { return z[h.axis] == h.offset; });
}

AffineSubspace AffineSubspace::with(const Hyperplane& h) const {
    auto f = fixed_;
    f.push_back(h);
    return AffineSubspace(dim_, std::move(f));
}

}  // namespace lcf
