#include "lcf/steiner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "lcf/errors.hpp"
#include "lcf/exact_sum.hpp"

namespace lcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Results of the constructions below are checked for shape and mass only; the
// shape invariants are the caller's to assert.
constexpr LogConcaveChecks kDerived{1e-9, 1e-6, false, false};

bool symmetric_decreasing(std::span<const double> v, std::size_t c) {
    const std::size_t n = v.size();
    const std::size_t reach = std::min(c, n - 1 - c);
    for (std::size_t j = 1; j <= reach; ++j) {
        if (v[c + j] != v[c - j]) return false;
        if (v[c + j] > v[c + j - 1] && j > 1) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t d = i > c ? i - c : c - i;
        if (d > reach && v[i] != 0.0) return false;
    }
    return reach == 0 || v[c] >= v[c + 1] * (1.0 - 1e-12);
}

double rounded_sum(std::span<const double> v) { return exact_sum(v); }

// Moves out[c] by ulps until the rounded exact sum of `out` equals `target`.
void settle_center(std::vector<double>& out, std::size_t c, double target) {
    for (int iter = 0; iter < 256; ++iter) {
        const double s = rounded_sum(out);
        if (s == target) return;
        out[c] = std::nextafter(out[c], s < target ? kInf : -kInf);
    }
    raise(ErrorKind::InvariantViolation, "rearrangement could not restore the line sum");
}

template <class Fn>
void for_each_line(const GridSpec& spec, std::size_t axis, Fn&& fn) {
    const std::size_t n = spec.count(axis);
    const std::size_t stride = spec.stride(axis);
    for (std::size_t line = 0; line < spec.line_count(axis); ++line) fn(spec.line_start(axis, line), n, stride);
}

void require_same_spacing(const GridSpec& a, const GridSpec& b) {
    require(a.dim() == b.dim(), ErrorKind::GridMismatch, "grids have different dimensions");
    for (std::size_t k = 0; k < a.dim(); ++k)
        require(std::fabs(a.step(k) - b.step(k)) <= 1e-9 * a.step(k), ErrorKind::GridMismatch,
                "grid spacings differ on axis " + std::to_string(k));
}

GridSpec sum_grid(const GridSpec& a, const GridSpec& b) {
    std::vector<AxisSpec> axes;
    for (std::size_t k = 0; k < a.dim(); ++k)
        axes.push_back({a.lo(k) + b.lo(k), a.hi(k) + b.hi(k), a.count(k) + b.count(k) - 1});
    return GridSpec(std::move(axes));
}

// Generic all-pairs max over node splits; `combine` maps (i, j) to a value.
std::vector<double> split_max(const GridSpec& a, const GridSpec& b, const GridSpec& out,
                              const std::function<double(std::size_t, std::size_t)>& combine, double init) {
    std::vector<double> res(out.size(), init);
    const std::size_t dim = a.dim();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto ia = a.unflat(i);
        for (std::size_t j = 0; j < b.size(); ++j) {
            const auto jb = b.unflat(j);
            std::array<std::size_t, GridSpec::kMaxDim> o{};
            for (std::size_t k = 0; k < dim; ++k) o[k] = ia[k] + jb[k];
            const double v = combine(i, j);
            double& slot = res[out.flat(o)];
            if (v > slot) slot = v;
        }
    }
    return res;
}

std::vector<double> merge_1d(std::span<const double> f, std::span<const double> g, std::size_t n_out) {
    std::vector<double> out(n_out, 0.0);
    auto support = [](std::span<const double> v) {
        std::size_t s = 0;
        while (s < v.size() && v[s] <= 0.0) ++s;
        std::size_t e = v.size();
        while (e > s && v[e - 1] <= 0.0) --e;
        return std::pair{s, e};
    };
    const auto [fs, fe] = support(f);
    const auto [gs, ge] = support(g);
    std::size_t i = fs, j = gs;
    out[i + j] = f[i] * g[j];
    while (i + 1 < fe || j + 1 < ge) {
        bool take_f;
        if (i + 1 >= fe) take_f = false;
        else if (j + 1 >= ge) take_f = true;
        else take_f = std::log(f[i + 1]) - std::log(f[i]) >= std::log(g[j + 1]) - std::log(g[j]);
        if (take_f) ++i;
        else ++j;
        out[i + j] = f[i] * g[j];
    }
    return out;
}

}  // namespace

std::vector<double> rearrange_line(std::span<const double> profile, std::size_t c) {
    const std::size_t n = profile.size();
    require(c < n, ErrorKind::InvalidArgument, "center index outside the line");
    for (double v : profile)
        require(std::isfinite(v) && v >= 0.0, ErrorKind::InvalidArgument, "line values must be finite and >= 0");
    if (symmetric_decreasing(profile, c)) return {profile.begin(), profile.end()};

    std::vector<double> v(profile.begin(), profile.end());
    std::sort(v.begin(), v.end(), std::greater<>());
    std::vector<double> out(n, 0.0);
    out[c] = v[0];
    for (std::size_t j = 1; 2 * j - 1 < n; ++j) {
        const double a = v[2 * j - 1];
        const double b = 2 * j < n ? v[2 * j] : 0.0;
        if (a == 0.0) break;
        require(j <= c && c + j < n, ErrorKind::CenterTooCloseToEdge,
                "support of width " + std::to_string(2 * j + 1) + " does not fit around node " + std::to_string(c) +
                    " of a line with " + std::to_string(n) + " nodes");
        const double m = 0.5 * a + 0.5 * b;
        out[c + j] = m;
        out[c - j] = m;
    }
    const double target = rounded_sum(profile);
    ExactSum residual(profile);
    residual -= ExactSum(out);
    out[c] += residual.value();
    settle_center(out, c, target);
    return out;
}

LogConcaveFnGrid steiner_symmetrize(const LogConcaveFnGrid& f, const Hyperplane& h) {
    const GridSpec& spec = f.spec();
    const std::size_t c = hyperplane_node(spec, h);
    std::vector<double> out(f.values().begin(), f.values().end());
    std::vector<double> line;
    std::vector<std::size_t> centers;
    for_each_line(spec, h.axis, [&](std::size_t start, std::size_t n, std::size_t stride) {
        line.resize(n);
        for (std::size_t i = 0; i < n; ++i) line[i] = f[start + i * stride];
        const auto r = rearrange_line(line, c);
        for (std::size_t i = 0; i < n; ++i) out[start + i * stride] = r[i];
        centers.push_back(start + c * stride);
    });

    // Line sums are exact; the grand total can still differ in its last bit.
    // Nudge line centers by one ulp where that leaves the line's sum intact.
    const double target = exact_sum(f.values());
    const std::size_t n = spec.count(h.axis);
    const std::size_t stride = spec.stride(h.axis);
    for (int iter = 0; iter < 64; ++iter) {
        const double total = exact_sum(out);
        if (total == target) break;
        const double dir = total < target ? kInf : -kInf;
        bool moved = false;
        for (std::size_t li = 0; li < centers.size(); ++li) {
            const std::size_t start = spec.line_start(h.axis, li);
            const std::size_t ci = centers[li];
            if (out[ci] == 0.0) continue;
            line.resize(n);
            for (std::size_t i = 0; i < n; ++i) line[i] = out[start + i * stride];
            const double before = exact_sum(line);
            const double old = out[ci];
            line[c] = std::nextafter(old, dir);
            if (exact_sum(line) != before || line[c] < 0.0) continue;
            out[ci] = line[c];
            moved = true;
            if (exact_sum(out) == target) break;
        }
        if (!moved) break;
    }
    return LogConcaveFnGrid(spec, std::move(out), kDerived);
}

ConvexFnGrid steiner_symmetrize_convex(const ConvexFnGrid& phi, const Hyperplane& h) {
    const LogConcaveFnGrid f = LogConcaveFnGrid::from_convex(phi, kDerived);
    const LogConcaveFnGrid s = steiner_symmetrize(f, h);
    return s.to_convex(false);
}

LogConcaveFnGrid pad_symmetric(const LogConcaveFnGrid& f, const Hyperplane& h) {
    const GridSpec& spec = f.spec();
    const std::size_t c = hyperplane_node(spec, h);
    const std::size_t n = spec.count(h.axis);
    const std::size_t half = std::max(c, n - 1 - c);
    const double step = spec.step(h.axis);
    std::vector<AxisSpec> axes;
    for (std::size_t k = 0; k < spec.dim(); ++k) axes.push_back(spec.axis(k));
    const double mid = spec.coord(h.axis, c);
    axes[h.axis] = {mid - static_cast<double>(half) * step, mid + static_cast<double>(half) * step, 2 * half + 1};
    GridSpec padded(std::move(axes));
    std::vector<double> out(padded.size(), 0.0);
    const std::size_t shift = half - c;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto idx = spec.unflat(i);
        idx[h.axis] += shift;
        out[padded.flat(idx)] = f[i];
    }
    return LogConcaveFnGrid(std::move(padded), std::move(out), kDerived);
}

LogConcaveFnGrid asplund_product(const LogConcaveFnGrid& f, const LogConcaveFnGrid& g, AsplundMethod method) {
    require_same_spacing(f.spec(), g.spec());
    const GridSpec out = sum_grid(f.spec(), g.spec());
    const bool one_d = f.spec().dim() == 1;
    if (method == AsplundMethod::Auto) method = one_d && out.size() > 4096 ? AsplundMethod::Merge : AsplundMethod::Direct;
    if (method == AsplundMethod::Merge) {
        require(one_d, ErrorKind::InvalidArgument, "the merge route is one-dimensional");
        return LogConcaveFnGrid(out, merge_1d(f.values(), g.values(), out.size()), kDerived);
    }
    auto vals = split_max(f.spec(), g.spec(), out, [&](std::size_t i, std::size_t j) { return f[i] * g[j]; }, 0.0);
    return LogConcaveFnGrid(out, std::move(vals), kDerived);
}

LogConcaveFnGrid asplund_product_inf_convolution(const LogConcaveFnGrid& f, const LogConcaveFnGrid& g) {
    require_same_spacing(f.spec(), g.spec());
    const GridSpec out = sum_grid(f.spec(), g.spec());
    const auto phi = f.to_convex().to_doubles();
    const auto psi = g.to_convex().to_doubles();
    // max of -(φ + ψ) is the infimal convolution with its sign flipped.
    auto neg = split_max(f.spec(), g.spec(), out, [&](std::size_t i, std::size_t j) { return -(phi[i] + psi[j]); },
                         -kInf);
    std::vector<double> vals(neg.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = std::isinf(neg[i]) ? 0.0 : std::exp(neg[i]);
    return LogConcaveFnGrid(out, std::move(vals), kDerived);
}

GridSpec homothety_grid(double lambda, const GridSpec& source) {
    require(lambda > 0.0 && lambda <= 1.0, ErrorKind::InvalidArgument, "homothety factor must lie in (0, 1]");
    std::vector<AxisSpec> axes;
    for (std::size_t k = 0; k < source.dim(); ++k) {
        const double h = source.step(k);
        const double lo = h * std::floor(lambda * source.lo(k) / h + 1e-9);
        const double hi = h * std::ceil(lambda * source.hi(k) / h - 1e-9);
        const auto count = static_cast<std::size_t>(std::llround((hi - lo) / h)) + 1;
        axes.push_back({lo, lo + static_cast<double>(count - 1) * h, std::max<std::size_t>(count, 3)});
    }
    return GridSpec(std::move(axes));
}

LogConcaveFnGrid homothety(double lambda, const LogConcaveFnGrid& f, const GridSpec& target) {
    require(lambda > 0.0 && lambda <= 1.0, ErrorKind::InvalidArgument, "homothety factor must lie in (0, 1]");
    const GridSpec& src = f.spec();
    require(target.dim() == src.dim(), ErrorKind::GridMismatch, "homothety target has a different dimension");
    const std::size_t dim = src.dim();
    std::vector<double> out(target.size(), 0.0);
    for (std::size_t t = 0; t < target.size(); ++t) {
        const Point x = target.node_point(t);
        std::array<std::size_t, GridSpec::kMaxDim> base{};
        std::array<double, GridSpec::kMaxDim> frac{};
        bool inside = true;
        for (std::size_t k = 0; k < dim && inside; ++k) {
            const double u = (x[k] / lambda - src.lo(k)) / src.step(k);
            const double last = static_cast<double>(src.count(k) - 1);
            if (u < -1e-9 || u > last + 1e-9) {
                inside = false;
                break;
            }
            const double r = std::nearbyint(u);
            if (std::fabs(u - r) <= 1e-9) {
                base[k] = static_cast<std::size_t>(std::clamp(r, 0.0, last));
                frac[k] = 0.0;
            } else {
                const double fl = std::floor(u);
                base[k] = static_cast<std::size_t>(fl);
                frac[k] = u - fl;
            }
        }
        if (!inside) continue;
        if (std::all_of(frac.begin(), frac.begin() + dim, [](double q) { return q == 0.0; })) {
            out[t] = std::pow(f[src.flat(base)], lambda);
            continue;
        }
        double logv = 0.0;
        bool zero = false;
        for (std::size_t corner = 0; corner < (std::size_t{1} << dim) && !zero; ++corner) {
            double w = 1.0;
            auto idx = base;
            for (std::size_t k = 0; k < dim; ++k) {
                const bool up = (corner >> k) & 1U;
                if (up) {
                    if (frac[k] == 0.0) {
                        w = 0.0;
                        break;
                    }
                    ++idx[k];
                    w *= frac[k];
                } else {
                    w *= 1.0 - frac[k];
                }
            }
            if (w == 0.0) continue;
            const double v = f[src.flat(idx)];
            if (v <= 0.0) zero = true;
            else logv += w * std::log(v);
        }
        if (!zero) out[t] = std::exp(lambda * logv);
    }
    return LogConcaveFnGrid(target, std::move(out), kDerived);
}

LogConcaveFnGrid homothety(double lambda, const LogConcaveFnGrid& f) {
    return homothety(lambda, f, homothety_grid(lambda, f.spec()));
}

PrekopaReport prekopa_check(const LogConcaveFnGrid& f, const LogConcaveFnGrid& g, double lambda, double eps_ineq) {
    require(lambda > 0.0 && lambda < 1.0, ErrorKind::InvalidArgument, "Prekopa weight must lie in (0, 1)");
    require_same_spacing(f.spec(), g.spec());
    const LogConcaveFnGrid lf = homothety(lambda, f);
    const LogConcaveFnGrid lg = homothety(1.0 - lambda, g);
    const LogConcaveFnGrid prod = asplund_product(lf, lg);
    PrekopaReport r;
    r.lambda = lambda;
    r.lhs = integrate(prod);
    r.rhs = std::pow(integrate(f), lambda) * std::pow(integrate(g), 1.0 - lambda);
    r.ok = r.lhs >= r.rhs * (1.0 - eps_ineq);
    return r;
}

}  // namespace lcf
