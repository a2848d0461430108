#include "lcf/fn_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lcf/errors.hpp"
#include "lcf/exact_sum.hpp"

namespace lcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTiny = std::numeric_limits<double>::min();

template <class Fn>
void for_each_line(const GridSpec& spec, std::size_t axis, Fn&& fn) {
    const std::size_t n = spec.count(axis);
    const std::size_t stride = spec.stride(axis);
    for (std::size_t line = 0; line < spec.line_count(axis); ++line) fn(spec.line_start(axis, line), n, stride);
}

void check_shape(const GridSpec& spec, std::size_t n) {
    require(spec.dim() >= 1, ErrorKind::InvalidArgument, "grid is empty");
    require(n == spec.size(), ErrorKind::GridMismatch,
            "value count " + std::to_string(n) + " does not match grid size " + std::to_string(spec.size()));
}

}  // namespace

// --- ConvexFnGrid ---------------------------------------------------------

ConvexFnGrid::ConvexFnGrid(GridSpec spec, std::vector<ExtendedValue> values, bool)
    : spec_(std::move(spec)), values_(std::move(values)) {
    check_shape(spec_, values_.size());
    require(std::any_of(values_.begin(), values_.end(), [](const ExtendedValue& v) { return v.is_finite(); }),
            ErrorKind::InvariantViolation, "convex function has empty domain (not proper)");
}

ConvexFnGrid::ConvexFnGrid(GridSpec spec, std::vector<ExtendedValue> values, ConvexChecks checks)
    : ConvexFnGrid(std::move(spec), std::move(values), true) {
    require(finite_intervals_contiguous(), ErrorKind::InvariantViolation,
            "domain is not an interval along some grid line");
    if (!checks.convexity) return;
    double lo = kInf, hi = -kInf;
    for (const auto& v : values_)
        if (v.is_finite()) {
            lo = std::min(lo, v.value());
            hi = std::max(hi, v.value());
        }
    const double eps = checks.eps_conv_rel * (hi - lo);
    const double defect = convexity_defect();
    require(defect <= eps, ErrorKind::InvariantViolation,
            "midpoint convexity violated by " + std::to_string(defect) + " (tolerance " + std::to_string(eps) + ")");
}

ConvexFnGrid ConvexFnGrid::unchecked(GridSpec spec, std::vector<ExtendedValue> values) {
    return ConvexFnGrid(std::move(spec), std::move(values), true);
}

std::vector<double> ConvexFnGrid::to_doubles() const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](const ExtendedValue& v) { return v.to_double(); });
    return out;
}

ConvexFnGrid ConvexFnGrid::from_doubles(GridSpec spec, std::span<const double> values, bool check_convexity) {
    std::vector<ExtendedValue> ev(values.size());
    std::transform(values.begin(), values.end(), ev.begin(), [](double v) { return ExtendedValue::from_double(v); });
    if (check_convexity) return ConvexFnGrid(std::move(spec), std::move(ev));
    return unchecked(std::move(spec), std::move(ev));
}

double ConvexFnGrid::convexity_defect() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < spec_.dim(); ++k) {
        for_each_line(spec_, k, [&](std::size_t start, std::size_t n, std::size_t stride) {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const auto& a = values_[start + (i - 1) * stride];
                const auto& b = values_[start + i * stride];
                const auto& c = values_[start + (i + 1) * stride];
                if (!a.is_finite() || !c.is_finite()) continue;
                if (!b.is_finite()) return void(worst = kInf);
                worst = std::max(worst, b.value() - 0.5 * (a.value() + c.value()));
            }
        });
    }
    return worst;
}

bool ConvexFnGrid::finite_intervals_contiguous() const {
    for (std::size_t k = 0; k < spec_.dim(); ++k) {
        bool ok = true;
        for_each_line(spec_, k, [&](std::size_t start, std::size_t n, std::size_t stride) {
            int state = 0;  // 0: before domain, 1: inside, 2: after
            for (std::size_t i = 0; i < n; ++i) {
                const bool fin = values_[start + i * stride].is_finite();
                if (state == 0 && fin) state = 1;
                else if (state == 1 && !fin) state = 2;
                else if (state == 2 && fin) ok = false;
            }
        });
        if (!ok) return false;
    }
    return true;
}

// --- LogConcaveFnGrid -----------------------------------------------------

LogConcaveFnGrid::LogConcaveFnGrid(GridSpec spec, std::vector<double> values, LogConcaveChecks checks)
    : spec_(std::move(spec)), values_(std::move(values)) {
    check_shape(spec_, values_.size());
    for (double v : values_)
        require(std::isfinite(v) && v >= 0.0, ErrorKind::InvariantViolation, "values must be finite and nonnegative");
    const double mass = integrate_values(spec_, values_);
    require(mass >= LogConcaveChecks::kMinMass && mass <= LogConcaveChecks::kMaxMass, ErrorKind::MassOutOfRange,
            "mass " + std::to_string(mass) + " outside [1e-300, 1e300]");
    if (checks.log_concavity) {
        const double d = log_concavity_defect();
        require(d <= checks.eps_lc, ErrorKind::InvariantViolation,
                "log-concavity violated (relative defect " + std::to_string(d) + ")");
    }
    if (checks.boundary_decay) {
        const double r = boundary_ratio();
        require(r <= checks.decay_ratio, ErrorKind::InvariantViolation,
                "boundary values too large: ratio " + std::to_string(r) + " > " + std::to_string(checks.decay_ratio));
    }
}

double LogConcaveFnGrid::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

ConvexFnGrid LogConcaveFnGrid::to_convex(bool check_convexity) const {
    std::vector<ExtendedValue> phi(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
        phi[i] = values_[i] > 0.0 ? ExtendedValue::finite(-std::log(values_[i])) : ExtendedValue::plus_infinity();
    if (check_convexity) return ConvexFnGrid(spec_, std::move(phi));
    return ConvexFnGrid::unchecked(spec_, std::move(phi));
}

LogConcaveFnGrid LogConcaveFnGrid::from_convex(const ConvexFnGrid& phi, LogConcaveChecks checks) {
    std::vector<double> f(phi.spec().size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = phi[i].is_finite() ? std::exp(-phi[i].value()) : 0.0;
    return LogConcaveFnGrid(phi.spec(), std::move(f), checks);
}

// Defect is measured in the log domain: 2 log f_i - log f_{i-1} - log f_{i+1}
// must be >= log(1 - eps).
double LogConcaveFnGrid::log_concavity_defect() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < spec_.dim(); ++k) {
        for_each_line(spec_, k, [&](std::size_t start, std::size_t n, std::size_t stride) {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double a = values_[start + (i - 1) * stride];
                const double b = values_[start + i * stride];
                const double c = values_[start + (i + 1) * stride];
                // Subnormal values carry too few bits to test.
                if (a < kTiny || c < kTiny) continue;
                if (b < kTiny) return void(worst = kInf);
                const double gap = std::log(a) + std::log(c) - 2.0 * std::log(b);
                if (gap > 0.0) worst = std::max(worst, -std::expm1(-gap));
            }
        });
    }
    return worst;
}

double LogConcaveFnGrid::boundary_ratio() const {
    const double top = max_value();
    if (top <= 0.0) return 0.0;
    double edge = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const auto idx = spec_.unflat(i);
        bool on_boundary = false;
        for (std::size_t k = 0; k < spec_.dim(); ++k)
            on_boundary = on_boundary || idx[k] == 0 || idx[k] + 1 == spec_.count(k);
        if (on_boundary) edge = std::max(edge, values_[i]);
    }
    return edge / top;
}

// --- quadrature -----------------------------------------------------------

double integrate_values(const GridSpec& spec, std::span<const double> values) {
    return spec.cell_volume() * ExactSum(values).value();
}

double integrate(const LogConcaveFnGrid& f) { return integrate_values(f.spec(), f.values()); }

Point barycenter(const LogConcaveFnGrid& f) {
    const GridSpec& spec = f.spec();
    const double total = ExactSum(f.values()).value();
    require(total * spec.cell_volume() >= LogConcaveChecks::kMinMass, ErrorKind::MassOutOfRange,
            "barycenter of a function with vanishing mass");
    Point out(spec.dim());
    for (std::size_t k = 0; k < spec.dim(); ++k) {
        ExactSum moment;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const std::size_t ik = (i / spec.stride(k)) % spec.count(k);
            moment.add(spec.coord(k, ik) * f[i]);
        }
        out[k] = moment.value() / total;
    }
    return out;
}

std::size_t hyperplane_node(const GridSpec& spec, const Hyperplane& h) {
    require(h.axis < spec.dim(), ErrorKind::InvalidArgument, "hyperplane axis out of range");
    const auto idx = spec.node_index(h.axis, h.offset);
    require(idx.has_value(), ErrorKind::OffsetNotOnGrid,
            "offset " + std::to_string(h.offset) + " is not a node on axis " + std::to_string(h.axis));
    return *idx;
}

HalfSpaceMasses half_space_masses(const LogConcaveFnGrid& f, const Hyperplane& h) {
    const GridSpec& spec = f.spec();
    const std::size_t c = hyperplane_node(spec, h);
    ExactSum plus, minus;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const std::size_t ik = (i / spec.stride(h.axis)) % spec.count(h.axis);
        if (ik > c) plus.add(f[i]);
        else if (ik < c) minus.add(f[i]);
        else {
            plus.add(0.5 * f[i]);
            minus.add(0.5 * f[i]);
        }
    }
    return {spec.cell_volume() * plus.value(), spec.cell_volume() * minus.value()};
}

std::vector<double> line_sums(const LogConcaveFnGrid& f, std::size_t axis) {
    std::vector<double> out;
    std::vector<double> line;
    for_each_line(f.spec(), axis, [&](std::size_t start, std::size_t n, std::size_t stride) {
        line.resize(n);
        for (std::size_t i = 0; i < n; ++i) line[i] = f[start + i * stride];
        out.push_back(exact_sum(line));
    });
    return out;
}

double symmetry_defect(const GridSpec& spec, std::span<const double> values, const Hyperplane& h) {
    const std::size_t c = hyperplane_node(spec, h);
    double worst = 0.0;
    for_each_line(spec, h.axis, [&](std::size_t start, std::size_t n, std::size_t stride) {
        for (std::size_t t = 1; t <= c && c + t < n; ++t)
            worst = std::max(worst, std::fabs(values[start + (c + t) * stride] - values[start + (c - t) * stride]));
    });
    return worst;
}

double symmetry_defect(const LogConcaveFnGrid& f, const Hyperplane& h) {
    return symmetry_defect(f.spec(), f.values(), h);
}

// --- closed forms ---------------------------------------------------------

namespace {

struct PhiVisitor {
    std::span<const double> x;

    double operator()(const Gaussian& g) const {
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double d = x[k] - g.mean[k];
            s += d * d / (2.0 * g.variance[k]);
        }
        return s;
    }
    double operator()(const ExponentialBox& e) const {
        double s = e.shift;
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (x[k] < e.lo[k] || x[k] > e.hi[k]) return kInf;
            s += e.rate[k] * x[k];
        }
        return s;
    }
    double operator()(const BoxIndicator& b) const {
        for (std::size_t k = 0; k < x.size(); ++k)
            if (x[k] < b.lo[k] || x[k] > b.hi[k]) return kInf;
        return 0.0;
    }
    double operator()(const PolyhedralQuadratic& p) const {
        double m = -kInf;
        for (std::size_t j = 0; j < p.slopes.size(); ++j) {
            double s = p.intercepts[j];
            for (std::size_t k = 0; k < x.size(); ++k) s += p.slopes[j][k] * x[k];
            m = std::max(m, s);
        }
        if (p.slopes.empty()) m = 0.0;
        double q = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double d = x[k] - (p.center.empty() ? 0.0 : p.center[k]);
            q += d * d;
        }
        return m + p.quadratic * q;
    }
};

std::size_t primitive_dim(const Primitive& p) {
    return std::visit(
        [](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Gaussian>) return v.mean.size();
            else if constexpr (std::is_same_v<T, ExponentialBox>) return v.rate.size();
            else if constexpr (std::is_same_v<T, BoxIndicator>) return v.lo.size();
            else return v.slopes.empty() ? v.center.size() : v.slopes.front().size();
        },
        p);
}

void put_vec(std::ostringstream& os, const std::vector<double>& v) {
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ']';
}

}  // namespace

Expression Expression::gaussian(Point mean, std::vector<double> variance) {
    require(mean.size() == variance.size(), ErrorKind::InvalidArgument, "gaussian: mean/variance size mismatch");
    for (double v : variance) require(v > 0.0, ErrorKind::InvalidArgument, "gaussian: variance must be positive");
    return Expression(Gaussian{std::move(mean), std::move(variance)});
}

Expression Expression::standard_gaussian(std::size_t dim) {
    return gaussian(Point(dim, 0.0), std::vector<double>(dim, 1.0));
}

Expression Expression::exponential_box(std::vector<double> rate, Point lo, Point hi, double shift) {
    require(rate.size() == lo.size() && lo.size() == hi.size(), ErrorKind::InvalidArgument,
            "exponential_box: size mismatch");
    return Expression(ExponentialBox{std::move(rate), std::move(lo), std::move(hi), shift});
}

Expression Expression::box_indicator(Point lo, Point hi) {
    require(lo.size() == hi.size(), ErrorKind::InvalidArgument, "box_indicator: size mismatch");
    return Expression(BoxIndicator{std::move(lo), std::move(hi)});
}

Expression Expression::polyhedral_quadratic(std::vector<Point> slopes, std::vector<double> intercepts,
                                            double quadratic, Point center) {
    require(slopes.size() == intercepts.size(), ErrorKind::InvalidArgument, "polyhedral: slopes/intercepts mismatch");
    require(!slopes.empty() || !center.empty(), ErrorKind::InvalidArgument, "polyhedral: dimension unknown");
    return Expression(PolyhedralQuadratic{std::move(slopes), std::move(intercepts), quadratic, std::move(center)});
}

Expression Expression::l1_norm(std::size_t dim, double scale) {
    std::vector<Point> slopes;
    for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
        Point a(dim);
        for (std::size_t k = 0; k < dim; ++k) a[k] = (mask >> k) & 1 ? scale : -scale;
        slopes.push_back(a);
    }
    std::vector<double> b(slopes.size(), 0.0);
    return polyhedral_quadratic(std::move(slopes), std::move(b), 0.0, Point(dim, 0.0));
}

Expression Expression::operator+(const Expression& other) const {
    auto t = terms_;
    t.insert(t.end(), other.terms_.begin(), other.terms_.end());
    return Expression(std::move(t));
}

Expression Expression::on_axes(std::vector<std::size_t> axes) const {
    auto t = terms_;
    for (auto& term : t) term.axes = axes;
    return Expression(std::move(t));
}

double Expression::phi(std::span<const double> x) const {
    double total = 0.0;
    std::vector<double> sub;
    for (const auto& term : terms_) {
        std::span<const double> arg = x;
        if (!term.axes.empty()) {
            sub.clear();
            for (std::size_t a : term.axes) sub.push_back(x[a]);
            arg = sub;
        }
        require(primitive_dim(term.primitive) == arg.size(), ErrorKind::InvalidArgument,
                "expression term dimension does not match its arguments");
        const double v = std::visit(PhiVisitor{arg}, term.primitive);
        if (std::isinf(v)) return kInf;
        total += v;
    }
    return total;
}

std::string Expression::describe() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) os << " + ";
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Gaussian>) {
                    os << "gaussian(mean=";
                    put_vec(os, v.mean);
                    os << ",var=";
                    put_vec(os, v.variance);
                } else if constexpr (std::is_same_v<T, ExponentialBox>) {
                    os << "exponential_box(rate=";
                    put_vec(os, v.rate);
                    os << ",lo=";
                    put_vec(os, v.lo);
                    os << ",hi=";
                    put_vec(os, v.hi);
                    os << ",shift=" << v.shift;
                } else if constexpr (std::is_same_v<T, BoxIndicator>) {
                    os << "box(lo=";
                    put_vec(os, v.lo);
                    os << ",hi=";
                    put_vec(os, v.hi);
                } else {
                    os << "polyhedral_quadratic(pieces=" << v.slopes.size() << ",q=" << v.quadratic;
                }
                os << ')';
            },
            terms_[i].primitive);
        if (!terms_[i].axes.empty()) {
            os << "@axes(";
            for (std::size_t j = 0; j < terms_[i].axes.size(); ++j) os << (j ? "," : "") << terms_[i].axes[j];
            os << ')';
        }
    }
    return os.str();
}

LogConcaveFnGrid sample(const Expression& expr, const GridSpec& spec, LogConcaveChecks checks) {
    std::vector<double> f(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double p = expr.phi(spec.node_point(i));
        f[i] = std::isinf(p) ? 0.0 : std::exp(-p);
    }
    return LogConcaveFnGrid(spec, std::move(f), checks);
}

ConvexFnGrid sample_convex(const Expression& expr, const GridSpec& spec, ConvexChecks checks) {
    std::vector<ExtendedValue> phi(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) phi[i] = ExtendedValue::from_double(expr.phi(spec.node_point(i)));
    return ConvexFnGrid(spec, std::move(phi), checks);
}

}  // namespace lcf
