#include "lcf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "lcf/errors.hpp"
#include "lcf/exact_sum.hpp"
#include "lcf/steiner.hpp"

namespace lcf {

namespace {

constexpr LogConcaveChecks kDerived{1e-9, 1e-6, false, false};
constexpr double kInf = std::numeric_limits<double>::infinity();

// f^z on the plan's dual grid moved to z.
LogConcaveFnGrid polar_at(const LogConcaveFnGrid& f, const Point& z, const ConjugatePlan& plan) {
    return polar(f, z, plan.with_source(f.spec()).moved_to(z), nullptr, kDerived);
}

LogConcaveFnGrid polar_onto(const LogConcaveFnGrid& f, const Point& z, const GridSpec& target) {
    return polar(f, z, ConjugatePlan{f.spec(), target, z}, nullptr, kDerived);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

double two_pi_pow(std::size_t n) { return std::pow(2.0 * std::numbers::pi, static_cast<double>(n)); }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// Mass of the slice {y_axis = node i}: Σ over the other axes times their cell volume.
std::vector<double> slice_masses(const LogConcaveFnGrid& f, std::size_t axis) {
    const GridSpec& g = f.spec();
    const std::size_t n = g.count(axis);
    std::vector<ExactSum> acc(n);
    for (std::size_t i = 0; i < g.size(); ++i) acc[(i / g.stride(axis)) % n].add(f[i]);
    const double w = g.cell_volume() / g.step(axis);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = acc[i].value() * w;
    return out;
}

// The slice {y_axis = node i} as a function on the remaining axes, in
// coordinates relative to z.
struct Slice {
    GridSpec grid;
    std::vector<double> values;
};

GridSpec relative_slice_grid(const GridSpec& g, std::size_t axis, const Point& z) {
    std::vector<AxisSpec> axes;
    for (std::size_t k = 0; k < g.dim(); ++k)
        if (k != axis) axes.push_back({g.lo(k) - z[k], g.hi(k) - z[k], g.count(k)});
    return GridSpec(std::move(axes));
}

std::vector<double> slice_values(const LogConcaveFnGrid& f, std::size_t axis, std::size_t node) {
    const GridSpec& g = f.spec();
    std::vector<double> out;
    out.reserve(g.size() / g.count(axis));
    for (std::size_t i = 0; i < g.size(); ++i)
        if ((i / g.stride(axis)) % g.count(axis) == node) out.push_back(f[i]);
    return out;
}

double low3(const std::vector<double>& v, std::size_t i) {
    return std::min({v[i - 1], v[i], v[std::min(i + 1, v.size() - 1)]});
}

double trapezoid(std::span<const double> v, double h) {
    ExactSum s(v);
    s.add(-0.5 * v.front());
    s.add(-0.5 * v.back());
    return h * s.value();
}

}  // namespace

GridSpec centered_at(const GridSpec& grid, const Point& z) {
    require(z.size() == grid.dim(), ErrorKind::InvalidArgument, "center dimension does not match the grid");
    std::vector<AxisSpec> axes;
    for (std::size_t k = 0; k < grid.dim(); ++k) {
        const double h = grid.step(k);
        const std::size_t m = (grid.count(k) - 1) / 2;
        const double lo = z[k] - static_cast<double>(m) * h;
        axes.push_back({lo, lo + static_cast<double>(grid.count(k) - 1) * h, grid.count(k)});
    }
    return GridSpec(std::move(axes));
}

bool PipelineReport::passed() const {
    return !aborted && std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

PipelineReport run_pipeline(const LogConcaveFnGrid& f, const Hyperplane& h1, double lambda, const ConjugatePlan& plan,
                            const PipelineOptions& options) {
    PipelineReport rep;
    const std::size_t n = f.spec().dim();
    rep.dim = n;
    rep.lambda_requested = lambda;
    try {
        require(h1.axis < n, ErrorKind::InvalidArgument, "H1 axis out of range");
        const HalfSpaceMasses hm = half_space_masses(f, h1);
        rep.lambda_1 = hm.plus / (hm.plus + hm.minus);
        rep.bound = two_pi_pow(n) / (4.0 * rep.lambda_1 * (1.0 - rep.lambda_1));
        rep.initial_mass = integrate(f);

        std::vector<std::size_t> axes{h1.axis};
        for (std::size_t k = 0; k < n; ++k)
            if (k != h1.axis) axes.push_back(k);

        std::vector<Hyperplane> fixed;
        LogConcaveFnGrid prev = f;
        for (std::size_t i = 1; i <= n; ++i) {
            PipelineStep step;
            step.i = i;
            if (i == 1) {
                step.hyperplane = h1;
                step.lambda = rep.lambda_1;
            } else {
                const LambdaSplit split = lambda_split(prev, axes[i - 1], 0.5);
                if (options.snap_medial) {
                    step.hyperplane = split.hyperplane;
                    step.lambda = split.achieved_lambda;
                } else {
                    step.hyperplane = {axes[i - 1], split.unsnapped_offset};
                    step.lambda = split.unsnapped_lambda;
                }
            }
            fixed.push_back(step.hyperplane);
            const AffineSubspace g(n, fixed);
            const SantaloResult sr = santalo_point(prev, g, plan, options.santalo);
            step.z = sr.z_star;
            step.santalo_converged = sr.converged;

            const LogConcaveFnGrid pz = polar_at(prev, step.z, plan);
            step.pre_polar_mass = integrate(pz);
            if (i == 1) {
                rep.initial_polar_mass = step.pre_polar_mass;
                rep.initial_product = rep.initial_mass * rep.initial_polar_mass;
            }
            const Hyperplane hy{step.hyperplane.axis, step.z[step.hyperplane.axis]};
            const LogConcaveFnGrid gz = steiner_symmetrize(pad_symmetric(pz, hy), hy);
            step.polar_mass = integrate(gz);

            const LogConcaveFnGrid next = polar_onto(gz, step.z, centered_at(f.spec(), step.z));
            step.mass = integrate(next);
            step.product = step.mass * step.polar_mass;
            const LogConcaveFnGrid back = polar_onto(next, step.z, gz.spec());
            step.involution_residual = max_abs_diff(back.values(), gz.values()) / gz.max_value();

            rep.steps.push_back(step);
            prev = next;
        }

        const Point& zn = rep.steps.back().z;
        const double top = prev.max_value();
        for (std::size_t k = 0; k < n; ++k)
            rep.final_symmetry_defects.push_back(symmetry_defect(prev, Hyperplane{k, zn[k]}) / top);
    } catch (const Error& e) {
        rep.aborted = true;
        rep.error = e.what();
        rep.verdicts.push_back({"completed", false, 0.0, 0.0, e.what()});
        return rep;
    }

    // Verdicts.
    {
        bool ok = true;
        double worst = 0.0;
        for (const auto& s : rep.steps) {
            ok = ok && s.polar_mass == s.pre_polar_mass;
            worst = std::max(worst, std::fabs(s.polar_mass - s.pre_polar_mass));
        }
        rep.verdicts.push_back({"mass_conservation", ok, worst, 0.0, "|∫S(f^z) - ∫f^z| per step"});
    }
    {
        const double lam = rep.lambda_1;
        const double rhs = 4.0 * lam * (1.0 - lam) * rep.initial_product * (1.0 - options.eps_ineq);
        rep.verdicts.push_back({"first_step_lower_bound", rep.steps.front().product >= rhs, rep.steps.front().product,
                                rhs, "product_1 >= 4λ(1-λ)·∫f·∫f^{z1}"});
    }
    {
        bool ok = true;
        double worst = kInf;
        for (std::size_t i = 1; i < rep.steps.size(); ++i) {
            const double r = rep.steps[i].product / rep.steps[i - 1].product;
            worst = std::min(worst, r);
            ok = ok && rep.steps[i].product >= rep.steps[i - 1].product * (1.0 - options.eps_mono);
        }
        if (rep.steps.size() < 2) worst = 1.0;
        rep.verdicts.push_back({"monotone_products", ok, worst, 1.0 - options.eps_mono,
                                "min product_{i+1}/product_i"});
    }
    {
        const double limit = rep.bound * (1.0 + options.eps_tot);
        rep.verdicts.push_back({"theorem_bound", rep.initial_product <= limit, rep.initial_product, limit,
                                "∫f·∫f^{z1} <= (2π)^n/(4λ(1-λ))·(1+eps_tot)"});
    }
    {
        const double worst = *std::max_element(rep.final_symmetry_defects.begin(), rep.final_symmetry_defects.end());
        rep.verdicts.push_back({"final_unconditional", worst <= options.eps_sym, worst, options.eps_sym,
                                "max per-axis symmetry defect of f_n about z_n, relative"});
    }
    {
        const bool ok = std::all_of(rep.steps.begin(), rep.steps.end(), [](const PipelineStep& s) {
            return s.santalo_converged;
        });
        rep.verdicts.push_back({"santalo_converged", ok, ok ? 1.0 : 0.0, 1.0, "every z_i met its gradient tolerance"});
    }
    return rep;
}

PipelineReport run_pipeline(const LogConcaveFnGrid& f, std::size_t axis, double lambda, const ConjugatePlan& plan,
                            const PipelineOptions& options) {
    LambdaSplit split;
    try {
        split = lambda_split(f, axis, lambda);
    } catch (const Error& e) {
        PipelineReport rep;
        rep.dim = f.spec().dim();
        rep.lambda_requested = lambda;
        rep.aborted = true;
        rep.error = e.what();
        rep.verdicts.push_back({"completed", false, 0.0, 0.0, e.what()});
        return rep;
    }
    return run_pipeline(f, split.hyperplane, lambda, plan, options);
}

SeparationReport verify_separation_lemma(const LogConcaveFnGrid& f, const Point& z, const Hyperplane& h,
                                         const ConjugatePlan& plan, double eps_ineq) {
    require(z.size() == f.spec().dim() && h.axis < z.size(), ErrorKind::InvalidArgument, "bad point or hyperplane");
    require(std::fabs(z[h.axis] - h.offset) <= 1e-9 * f.spec().step(h.axis), ErrorKind::InvalidArgument,
            "z must lie on H");
    const LogConcaveFnGrid fz = polar_at(f, z, plan);
    const Hyperplane hy{h.axis, z[h.axis]};
    const HalfSpaceMasses hm = half_space_masses(fz, hy);
    SeparationReport r;
    r.lambda = hm.plus / (hm.plus + hm.minus);
    const LogConcaveFnGrid sf = steiner_symmetrize(pad_symmetric(f, h), h);
    r.lhs = integrate(polar_at(sf, z, plan));
    r.rhs = 4.0 * r.lambda * (1.0 - r.lambda) * integrate(fz);
    r.ok = r.lhs >= r.rhs * (1.0 - eps_ineq);
    return r;
}

SliceReport slice_inequality_check(const LogConcaveFnGrid& f, const Point& z, const Hyperplane& h,
                                   const ConjugatePlan& plan, int samples, std::uint64_t seed, double eps_slice) {
    require(samples > 0, ErrorKind::InvalidArgument, "need at least one sample");
    const std::size_t a = h.axis;
    const std::size_t n = f.spec().dim();
    const LogConcaveFnGrid fz = polar_at(f, z, plan);
    const LogConcaveFnGrid sf = steiner_symmetrize(pad_symmetric(f, h), h);
    const LogConcaveFnGrid sfz = polar_at(sf, z, plan);
    require(fz.spec() == sfz.spec(), ErrorKind::GridMismatch, "dual grids differ");
    const std::size_t c = hyperplane_node(fz.spec(), Hyperplane{a, z[a]});
    const std::size_t count = fz.spec().count(a);

    // Heights whose slices carry non-negligible mass.
    const auto masses = slice_masses(fz, a);
    const double top = *std::max_element(masses.begin(), masses.end());
    std::size_t up = 0, down = 0;
    while (c + up + 1 < count && masses[c + up + 1] > 1e-12 * top) ++up;
    while (down + 1 <= c && masses[c - down - 1] > 1e-12 * top) ++down;
    require(up >= 1 && down >= 1, ErrorKind::SliceOutOfRange, "no slices on one side of H");

    std::mt19937_64 rng(seed);
    SliceReport rep;
    rep.ok = true;
    for (int q = 0; q < samples; ++q) {
        const std::size_t ks = 1 + rng() % up;
        const std::size_t kt = 1 + rng() % down;
        const double step = fz.spec().step(a);
        SliceSample smp;
        smp.s = static_cast<double>(ks) * step;
        smp.t = static_cast<double>(kt) * step;
        const double ls = static_cast<double>(kt) / static_cast<double>(ks + kt);
        const double lt = static_cast<double>(ks) / static_cast<double>(ks + kt);
        const double m = 2.0 * static_cast<double>(ks * kt) / static_cast<double>(ks + kt);
        const auto mlo = static_cast<std::size_t>(std::floor(m));
        const std::size_t mhi = std::min(mlo + 1, count - 1 - c);
        require(c + mhi < count, ErrorKind::SliceOutOfRange, "harmonic height leaves the grid");

        if (n == 1) {
            const double lhs = std::pow(fz[c + ks], ls) * std::pow(fz[c - kt], lt);
            const double allowed = std::max(sfz[c + mlo], sfz[c + mhi]);
            smp.worst_ratio = allowed > 0.0 ? lhs / allowed : (lhs > 0.0 ? kInf : 0.0);
            smp.ok = lhs <= allowed * (1.0 + eps_slice);
        } else {
            const GridSpec sg = relative_slice_grid(fz.spec(), a, z);
            const LogConcaveFnGrid fs(sg, slice_values(fz, a, c + ks), kDerived);
            const LogConcaveFnGrid ft(sg, slice_values(fz, a, c - kt), kDerived);
            const LogConcaveFnGrid lhs = asplund_product(homothety(ls, fs), homothety(lt, ft));
            const auto r_lo = slice_values(sfz, a, c + mlo);
            const auto r_hi = slice_values(sfz, a, c + mhi);
            const double floor_abs = 1e-12 * lhs.max_value();
            smp.ok = true;
            smp.worst_ratio = 0.0;
            const GridSpec& lg = lhs.spec();
            for (std::size_t i = 0; i < lg.size(); ++i) {
                const double v = lhs[i];
                if (v == 0.0) continue;
                const auto li = lg.unflat(i);
                // Matching node of the slice grid plus its neighbours.
                std::array<long, GridSpec::kMaxDim> base{};
                bool inside = true;
                for (std::size_t k = 0; k < sg.dim(); ++k) {
                    const double w = lg.coord(k, li[k]);
                    base[k] = std::lround((w - sg.lo(k)) / sg.step(k));
                    inside = inside && base[k] >= 0 && base[k] < static_cast<long>(sg.count(k));
                }
                double allowed = 0.0;
                if (inside) {
                    const std::size_t corners = sg.dim() == 1 ? 3 : 9;
                    for (std::size_t cidx = 0; cidx < corners; ++cidx) {
                        std::array<std::size_t, GridSpec::kMaxDim> idx{};
                        bool ok_idx = true;
                        std::size_t code = cidx;
                        for (std::size_t k = 0; k < sg.dim(); ++k) {
                            const long d = static_cast<long>(code % 3) - 1;
                            code /= 3;
                            const long p = base[k] + d;
                            ok_idx = ok_idx && p >= 0 && p < static_cast<long>(sg.count(k));
                            idx[k] = static_cast<std::size_t>(std::max(p, 0L));
                        }
                        if (!ok_idx) continue;
                        const std::size_t fi = sg.flat(idx);
                        allowed = std::max({allowed, r_lo[fi], r_hi[fi]});
                    }
                }
                const double ratio = allowed > 0.0 ? v / allowed : kInf;
                if (v > allowed * (1.0 + eps_slice) + floor_abs) {
                    smp.ok = false;
                }
                if (v > floor_abs) smp.worst_ratio = std::max(smp.worst_ratio, ratio);
            }
        }
        rep.worst_ratio = std::max(rep.worst_ratio, smp.worst_ratio);
        rep.ok = rep.ok && smp.ok;
        rep.samples.push_back(smp);
    }
    return rep;
}

BallLemmaReport ball_lemma_check(const BallTriple& tr, double eps_ineq, double eps_hyp,
                                 std::size_t max_pairs_per_axis, double floor_rel) {
    const std::size_t n = tr.w.size();
    require(n >= 3 && tr.f0.size() == n && tr.f1.size() == n && tr.f2.size() == n, ErrorKind::InvalidArgument,
            "triple arrays must share one sample grid of at least 3 points");
    require(tr.w.front() == 0.0, ErrorKind::InvalidArgument, "sample grid must start at 0");
    const double h = tr.w[1] - tr.w[0];
    for (const auto* v : {&tr.f0, &tr.f1, &tr.f2})
        for (double x : *v) require(std::isfinite(x) && x >= 0.0, ErrorKind::InvalidArgument, "values must be >= 0");

    double scale = 0.0;
    for (const auto* v : {&tr.f0, &tr.f1, &tr.f2}) scale = std::max(scale, *std::max_element(v->begin(), v->end()));
    const double floor = floor_rel * scale;

    BallLemmaReport r;
    const std::size_t stride = std::max<std::size_t>(1, (n - 1 + max_pairs_per_axis - 1) / max_pairs_per_axis);
    for (std::size_t i = 1; i < n; i += stride) {
        for (std::size_t j = 1; j < n; j += stride) {
            const double x = tr.w[i], y = tr.w[j];
            const double rhs = std::pow(low3(tr.f1, i), y / (x + y)) * std::pow(low3(tr.f2, j), x / (x + y));
            if (rhs == 0.0 || rhs <= floor) continue;
            const double m = 2.0 * x * y / (x + y) / h;
            // One-cell allowance on every argument: F1 and F2 at their lowest
            // over the node and its neighbours, F0 at its highest over the
            // bracketing nodes and the node below.
            const auto lo = std::min(static_cast<std::size_t>(std::floor(m)), n - 1);
            const std::size_t hi = std::min(lo + 1, n - 1);
            const double lhs = std::max({tr.f0[lo > 0 ? lo - 1 : 0], tr.f0[lo], tr.f0[hi]});
            const double ratio = lhs > 0.0 ? rhs / lhs : kInf;
            if (ratio > r.worst_hypothesis_ratio) {
                r.worst_hypothesis_ratio = ratio;
                r.witness_x = x;
                r.witness_y = y;
            }
        }
    }
    r.hypothesis_ok = r.worst_hypothesis_ratio <= 1.0 + eps_hyp;
    if (!r.hypothesis_ok)
        raise(ErrorKind::HypothesisFailed, "F0(2xy/(x+y)) < F1(x)^{y/(x+y)} F2(y)^{x/(x+y)} at x = " +
                                               fmt(r.witness_x) + ", y = " + fmt(r.witness_y) + " (ratio " +
                                               fmt(r.worst_hypothesis_ratio) + ")");

    const double i0 = trapezoid(tr.f0, h), i1 = trapezoid(tr.f1, h), i2 = trapezoid(tr.f2, h);
    for (double m : {i0, i1, i2})
        require(m > LogConcaveChecks::kMinMass && m < LogConcaveChecks::kMaxMass, ErrorKind::MassOutOfRange,
                "triple mass out of range");
    r.lhs = 1.0 / i0;
    r.rhs = 0.5 * (1.0 / i1 + 1.0 / i2);
    r.ok = r.lhs <= r.rhs * (1.0 + eps_ineq);
    return r;
}

BallTriple separation_triple(const LogConcaveFnGrid& f, const Point& z, const Hyperplane& h,
                             const ConjugatePlan& plan) {
    const std::size_t a = h.axis;
    const LogConcaveFnGrid fz = polar_at(f, z, plan);
    const LogConcaveFnGrid sf = steiner_symmetrize(pad_symmetric(f, h), h);
    const LogConcaveFnGrid sfz = polar_at(sf, z, plan);
    const std::size_t c = hyperplane_node(fz.spec(), Hyperplane{a, z[a]});
    const std::size_t reach = std::min(c, fz.spec().count(a) - 1 - c);
    const auto m_f = slice_masses(fz, a);
    const auto m_s = slice_masses(sfz, a);
    BallTriple t;
    const double step = fz.spec().step(a);
    for (std::size_t k = 0; k <= reach; ++k) {
        t.w.push_back(static_cast<double>(k) * step);
        t.f0.push_back(m_s[c + k]);
        t.f1.push_back(m_f[c + k]);
        t.f2.push_back(m_f[c - k]);
    }
    return t;
}

UnconditionalReport unconditional_product_check(const LogConcaveFnGrid& f, const ConjugatePlan& plan,
                                                std::optional<Point> center, double eps_sym, double eps_tot) {
    const GridSpec& g = f.spec();
    UnconditionalReport r;
    if (center) {
        r.center = *center;
    } else {
        r.center.resize(g.dim());
        for (std::size_t k = 0; k < g.dim(); ++k) r.center[k] = g.coord(k, (g.count(k) - 1) / 2);
    }
    const double top = f.max_value();
    for (std::size_t k = 0; k < g.dim(); ++k) {
        const double d = symmetry_defect(f, Hyperplane{k, r.center[k]}) / top;
        r.symmetry_defects.push_back(d);
        require(d <= eps_sym, ErrorKind::NotUnconditional,
                "symmetry defect " + fmt(d) + " about axis " + std::to_string(k) + " exceeds " + fmt(eps_sym));
    }
    r.mass = integrate(f);
    r.polar_mass = integrate(polar_at(f, r.center, plan));
    r.product = r.mass * r.polar_mass;
    r.bound = two_pi_pow(g.dim());
    r.ratio = r.product / r.bound;
    r.ok = r.ratio <= 1.0 + eps_tot;
    return r;
}

InvarianceReport verify_santalo_invariance(const LogConcaveFnGrid& f, const AffineSubspace& g, const Hyperplane& h,
                                           const ConjugatePlan& plan, double tol_rel, const SantaloOptions& options) {
    const bool inside = std::any_of(g.fixed().begin(), g.fixed().end(), [&](const Hyperplane& p) {
        return p.axis == h.axis && p.offset == h.offset;
    });
    require(inside, ErrorKind::InvalidArgument, "G must be contained in H");
    InvarianceReport r;
    r.z = santalo_point(f, g, plan, options).z_star;
    const LogConcaveFnGrid fz = polar_at(f, r.z, plan);
    const Hyperplane hy{h.axis, r.z[h.axis]};
    const LogConcaveFnGrid gz = steiner_symmetrize(pad_symmetric(fz, hy), hy);
    // Free axes keep f's lattice: a fractional shift moves box edges between
    // nodes and the recovered g loses its support boundary.
    Point center = r.z;
    for (std::size_t k : g.free_axes())
        if (k != h.axis) center[k] = f.spec().coord(k, (f.spec().count(k) - 1) / 2);
    const LogConcaveFnGrid back = polar_onto(gz, r.z, centered_at(f.spec(), center));
    r.z_after = santalo_point(back, g, plan, options).z_star;
    r.symmetry_defect = polar_symmetry_defect(back, r.z, hy, plan);
    double d = 0.0;
    for (std::size_t k = 0; k < r.z.size(); ++k) d += (r.z_after[k] - r.z[k]) * (r.z_after[k] - r.z[k]);
    r.drift = std::sqrt(d);
    r.tolerance = tol_rel * f.spec().extent();
    r.ok = r.drift <= r.tolerance;
    return r;
}

double polar_symmetry_defect(const LogConcaveFnGrid& f, const Point& z, const Hyperplane& h,
                             const ConjugatePlan& plan) {
    const LogConcaveFnGrid fz = polar_at(f, z, plan);
    return symmetry_defect(fz, Hyperplane{h.axis, z[h.axis]}) / fz.max_value();
}

}  // namespace lcf
