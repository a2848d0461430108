#include "lcf/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lcf/errors.hpp"

namespace lcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Conjugate of one line. `v` holds +inf for excluded entries; the result is
// -inf where nothing is finite. argmax[j] is the maximizing x index.
void conjugate_line(std::span<const double> v, std::span<const double> xs, std::span<const double> ys,
                    std::span<double> out, std::span<std::size_t> argmax, std::vector<std::size_t>& hull) {
    hull.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isinf(v[i])) continue;
        // Lower convex hull; collinear points stay so exact ties are seen.
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull.back();
            const double cross = (xs[b] - xs[a]) * (v[i] - v[a]) - (v[b] - v[a]) * (xs[i] - xs[a]);
            if (cross < 0.0) hull.pop_back();
            else break;
        }
        hull.push_back(i);
    }
    if (hull.empty()) {
        std::fill(out.begin(), out.end(), -kInf);
        std::fill(argmax.begin(), argmax.end(), kNone);
        return;
    }
    // Maximizers move right as y increases.
    std::size_t k = 0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
        const double y = ys[j];
        double best = xs[hull[k]] * y - v[hull[k]];
        while (k + 1 < hull.size()) {
            const double next = xs[hull[k + 1]] * y - v[hull[k + 1]];
            if (next > best) {
                best = next;
                ++k;
            } else {
                break;
            }
        }
        out[j] = best;
        argmax[j] = hull[k];
    }
}

void brute_line(std::span<const double> v, std::span<const double> xs, std::span<const double> ys,
                std::span<double> out) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
        double best = -kInf;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (std::isinf(v[i])) continue;
            const double c = xs[i] * ys[j] - v[i];
            if (c > best) best = c;
        }
        out[j] = best;
    }
}

void check_line_args(std::span<const ExtendedValue> values, std::span<const double> xs, std::span<const double> ys) {
    require(values.size() == xs.size(), ErrorKind::InvalidArgument, "conjugate_1d: values/xs size mismatch");
    require(std::any_of(values.begin(), values.end(), [](const ExtendedValue& e) { return e.is_finite(); }),
            ErrorKind::AllInfinite, "conjugate_1d: no finite entry");
    for (std::size_t i = 1; i < xs.size(); ++i)
        require(xs[i - 1] < xs[i], ErrorKind::InvalidArgument, "conjugate_1d: xs must be strictly increasing");
    for (std::size_t j = 1; j < ys.size(); ++j)
        require(ys[j - 1] < ys[j], ErrorKind::InvalidArgument, "conjugate_1d: ys must be strictly increasing");
}

std::vector<double> as_doubles(std::span<const ExtendedValue> values) {
    std::vector<double> v(values.size());
    std::transform(values.begin(), values.end(), v.begin(), [](const ExtendedValue& e) { return e.to_double(); });
    return v;
}

std::vector<ExtendedValue> as_extended(std::span<const double> v) {
    std::vector<ExtendedValue> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double d) { return ExtendedValue::finite(d); });
    return out;
}

std::vector<double> shifted_coords(const GridSpec& g, std::size_t k, double z) {
    auto c = g.coords(k);
    for (double& x : c) x -= z;
    return c;
}

void check_plan(const ConvexFnGrid& phi, const Point& z, const ConjugatePlan& plan) {
    require(phi.spec() == plan.source, ErrorKind::PlanMismatch, "function grid differs from the plan's source grid");
    require(plan.target.dim() == plan.source.dim(), ErrorKind::PlanMismatch, "plan source/target dimension differ");
    require(z.size() == plan.source.dim(), ErrorKind::InvalidArgument, "center dimension does not match the grid");
}

}  // namespace

ConjugatePlan ConjugatePlan::same_grid(const GridSpec& grid, Point z) { return {grid, grid, std::move(z)}; }

ConjugatePlan ConjugatePlan::scaled(const GridSpec& grid, double factor, Point z) {
    require(factor > 0.0, ErrorKind::InvalidArgument, "dual grid scale must be positive");
    std::vector<AxisSpec> axes;
    for (std::size_t k = 0; k < grid.dim(); ++k) {
        const double mid = 0.5 * (grid.lo(k) + grid.hi(k));
        const double half = 0.5 * (grid.hi(k) - grid.lo(k)) * factor;
        axes.push_back({mid - half, mid + half, grid.count(k)});
    }
    return {grid, GridSpec(std::move(axes)), std::move(z)};
}

ConjugatePlan ConjugatePlan::moved_to(const Point& z) const {
    require(z.size() == target.dim() && center.size() == target.dim(), ErrorKind::InvalidArgument,
            "center dimension does not match the plan");
    std::vector<AxisSpec> axes;
    for (std::size_t k = 0; k < target.dim(); ++k) {
        const double d = z[k] - center[k];
        axes.push_back({target.lo(k) + d, target.hi(k) + d, target.count(k)});
    }
    return {source, GridSpec(std::move(axes)), z};
}

std::vector<ExtendedValue> conjugate_1d(std::span<const ExtendedValue> values, std::span<const double> xs,
                                        std::span<const double> ys) {
    check_line_args(values, xs, ys);
    const auto v = as_doubles(values);
    std::vector<double> out(ys.size());
    std::vector<std::size_t> arg(ys.size()), hull;
    conjugate_line(v, xs, ys, out, arg, hull);
    return as_extended(out);
}

std::vector<ExtendedValue> conjugate_1d_brute(std::span<const ExtendedValue> values, std::span<const double> xs,
                                              std::span<const double> ys) {
    check_line_args(values, xs, ys);
    const auto v = as_doubles(values);
    std::vector<double> out(ys.size());
    brute_line(v, xs, ys, out);
    return as_extended(out);
}

ConvexFnGrid legendre_nd(const ConvexFnGrid& phi, const Point& z, const ConjugatePlan& plan,
                         ConjugateDiagnostics* diagnostics) {
    check_plan(phi, z, plan);
    const std::size_t dim = plan.source.dim();

    std::array<std::size_t, GridSpec::kMaxDim> counts{};
    for (std::size_t k = 0; k < dim; ++k) counts[k] = plan.source.count(k);

    std::vector<double> cur = phi.to_doubles();
    std::vector<char> flag(cur.size(), 0);
    std::vector<double> next;
    std::vector<char> next_flag;
    std::vector<double> line_in, line_out;
    std::vector<std::size_t> arg, hull;

    // Pass k replaces axis k's source coordinate by its dual coordinate. The
    // running value after a pass is a partial sup; negating it turns it into
    // the "φ" of the next pass.
    for (std::size_t pass = 0; pass < dim; ++pass) {
        const std::size_t k = dim - 1 - pass;
        const auto xs = shifted_coords(plan.source, k, z[k]);
        const auto ys = shifted_coords(plan.target, k, z[k]);
        const std::size_t n_in = counts[k];
        const std::size_t n_out = plan.target.count(k);
        std::size_t inner = 1;
        for (std::size_t m = k + 1; m < dim; ++m) inner *= counts[m];
        std::size_t outer = 1;
        for (std::size_t m = 0; m < k; ++m) outer *= counts[m];

        next.assign(outer * n_out * inner, 0.0);
        next_flag.assign(next.size(), 0);
        line_in.resize(n_in);
        line_out.resize(n_out);
        arg.resize(n_out);
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t r = 0; r < inner; ++r) {
                const std::size_t in0 = o * n_in * inner + r;
                const std::size_t out0 = o * n_out * inner + r;
                for (std::size_t i = 0; i < n_in; ++i) {
                    const double c = cur[in0 + i * inner];
                    line_in[i] = pass == 0 ? c : -c;
                }
                conjugate_line(line_in, xs, ys, line_out, arg, hull);
                for (std::size_t j = 0; j < n_out; ++j) {
                    next[out0 + j * inner] = line_out[j];
                    const std::size_t a = arg[j];
                    next_flag[out0 + j * inner] =
                        a != kNone && (a == 0 || a + 1 == n_in || flag[in0 + a * inner]) ? 1 : 0;
                }
            }
        }
        cur.swap(next);
        flag.swap(next_flag);
        counts[k] = n_out;
    }

    if (diagnostics) {
        const auto hits = static_cast<double>(std::count(flag.begin(), flag.end(), 1));
        diagnostics->boundary_argmax_fraction = hits / static_cast<double>(flag.size());
        diagnostics->boundary_warning = diagnostics->boundary_argmax_fraction > 1e-3;
    }
    return ConvexFnGrid::unchecked(plan.target, as_extended(cur));
}

ConvexFnGrid legendre_nd_brute(const ConvexFnGrid& phi, const Point& z, const ConjugatePlan& plan) {
    check_plan(phi, z, plan);
    const GridSpec& src = plan.source;
    const GridSpec& dst = plan.target;
    const std::size_t dim = src.dim();
    std::array<std::vector<double>, GridSpec::kMaxDim> xs, ys;
    for (std::size_t k = 0; k < dim; ++k) {
        xs[k] = shifted_coords(src, k, z[k]);
        ys[k] = shifted_coords(dst, k, z[k]);
    }
    const auto v = phi.to_doubles();
    std::vector<double> out(dst.size(), -kInf);
    for (std::size_t j = 0; j < dst.size(); ++j) {
        const auto jy = dst.unflat(j);
        double best = -kInf;
        for (std::size_t i = 0; i < src.size(); ++i) {
            if (std::isinf(v[i])) continue;
            const auto ix = src.unflat(i);
            // innermost axis first: p_{d-1} - φ, then p_k + (...)
            double acc = xs[dim - 1][ix[dim - 1]] * ys[dim - 1][jy[dim - 1]] - v[i];
            for (std::size_t k = dim - 1; k-- > 0;) acc = xs[k][ix[k]] * ys[k][jy[k]] + acc;
            if (acc > best) best = acc;
        }
        out[j] = best;
    }
    return ConvexFnGrid::unchecked(dst, as_extended(out));
}

LogConcaveFnGrid polar(const LogConcaveFnGrid& f, const Point& z, const ConjugatePlan& plan,
                       ConjugateDiagnostics* diagnostics, LogConcaveChecks checks) {
    const ConvexFnGrid phi = f.to_convex();
    const ConvexFnGrid conj = legendre_nd(phi, z, plan, diagnostics);
    if (diagnostics) {
        // interior of the support: the nearest node and all its axis neighbours are positive
        const GridSpec& g = f.spec();
        std::array<std::size_t, GridSpec::kMaxDim> idx{};
        bool inside = true;
        for (std::size_t k = 0; k < g.dim(); ++k) {
            inside = inside && z[k] > g.lo(k) && z[k] < g.hi(k);
            idx[k] = g.nearest_index(k, z[k]);
        }
        if (inside) {
            inside = f[g.flat(idx)] > 0.0;
            for (std::size_t k = 0; k < g.dim() && inside; ++k)
                for (int d : {-1, 1}) {
                    auto nb = idx;
                    if ((d < 0 && nb[k] == 0) || (d > 0 && nb[k] + 1 == g.count(k))) continue;
                    nb[k] = d < 0 ? nb[k] - 1 : nb[k] + 1;
                    inside = inside && f[g.flat(nb)] > 0.0;
                }
        }
        diagnostics->center_outside_support = !inside;
    }
    std::vector<double> out(conj.spec().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(-conj[i].value());
    return LogConcaveFnGrid(plan.target, std::move(out), checks);
}

ConvexFnGrid double_conjugate(const ConvexFnGrid& phi, const Point& z, const ConjugatePlan& plan) {
    const ConvexFnGrid once = legendre_nd(phi, z, plan);
    return legendre_nd(once, z, plan.reversed());
}

ConvexFnGrid double_conjugate(const ConvexFnGrid& phi, const Point& z) {
    return double_conjugate(phi, z, ConjugatePlan::same_grid(phi.spec(), z));
}

}  // namespace lcf
