#include "lcf/santalo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lcf/errors.hpp"
#include "lcf/exact_sum.hpp"

namespace lcf {

namespace {

constexpr LogConcaveChecks kPolarChecks{1e-9, 1e-6, false, false};

struct PolarMoments {
    double mass = 0.0;
    Point mean;
    std::vector<double> variance;
};

PolarMoments polar_moments(const LogConcaveFnGrid& f, const Point& z, const ConjugatePlan& plan) {
    const LogConcaveFnGrid fz = polar(f, z, plan.with_source(f.spec()).moved_to(z), nullptr, kPolarChecks);
    const GridSpec& g = fz.spec();
    PolarMoments m;
    const double total = exact_sum(fz.values());
    m.mass = g.cell_volume() * total;
    m.mean.assign(g.dim(), 0.0);
    m.variance.assign(g.dim(), 0.0);
    for (std::size_t k = 0; k < g.dim(); ++k) {
        ExactSum first, second;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double d = g.coord(k, (i / g.stride(k)) % g.count(k)) - z[k];
            first.add(d * fz[i]);
            second.add(d * d * fz[i]);
        }
        const double e1 = first.value() / total;
        m.mean[k] = z[k] + e1;
        m.variance[k] = std::max(second.value() / total - e1 * e1, 1e-300);
    }
    return m;
}

double projected_norm(const std::vector<double>& grad, const AffineSubspace& g) {
    double s = 0.0;
    for (std::size_t k : g.free_axes()) s += grad[k] * grad[k];
    return std::sqrt(s);
}

// Start at the barycenter of f restricted to the grid slice nearest to G.
Point initial_point(const LogConcaveFnGrid& f, const AffineSubspace& g) {
    const GridSpec& spec = f.spec();
    std::array<std::size_t, GridSpec::kMaxDim> fixed_idx{};
    for (const auto& h : g.fixed()) {
        require(h.offset > spec.lo(h.axis) && h.offset < spec.hi(h.axis), ErrorKind::SubspaceOutsideSupport,
                "fixed offset " + std::to_string(h.offset) + " lies outside the grid");
        fixed_idx[h.axis] = spec.nearest_index(h.axis, h.offset);
    }
    ExactSum mass;
    std::vector<ExactSum> moments(spec.dim());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto idx = spec.unflat(i);
        bool on_slice = true;
        for (const auto& h : g.fixed()) on_slice = on_slice && idx[h.axis] == fixed_idx[h.axis];
        if (!on_slice || f[i] <= 0.0) continue;
        mass.add(f[i]);
        for (std::size_t k = 0; k < spec.dim(); ++k) moments[k].add(spec.coord(k, idx[k]) * f[i]);
    }
    require(mass.sign() > 0, ErrorKind::SubspaceOutsideSupport, "the subspace misses the support of f");
    const double total = mass.value();
    Point z(spec.dim());
    for (std::size_t k = 0; k < spec.dim(); ++k) z[k] = moments[k].value() / total;
    return g.project(z);
}

}  // namespace

double polar_mass(const LogConcaveFnGrid& f, const Point& z, const ConjugatePlan& plan) {
    return integrate(polar(f, z, plan.with_source(f.spec()).moved_to(z), nullptr, kPolarChecks));
}

std::vector<double> polar_mass_gradient(const LogConcaveFnGrid& f, const Point& z, const ConjugatePlan& plan) {
    const PolarMoments m = polar_moments(f, z, plan);
    std::vector<double> grad(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) grad[k] = (m.mean[k] - z[k]) * m.mass;
    return grad;
}

SantaloResult santalo_point(const LogConcaveFnGrid& f, const AffineSubspace& g, const ConjugatePlan& plan,
                            const SantaloOptions& options) {
    require(g.dim() == f.spec().dim(), ErrorKind::InvalidArgument, "subspace dimension does not match the grid");
    const auto free = g.free_axes();
    SantaloResult r;
    r.z_star = initial_point(f, g);
    PolarMoments m = polar_moments(f, r.z_star, plan);

    auto gradient = [&](const PolarMoments& pm, const Point& z) {
        std::vector<double> grad(z.size());
        for (std::size_t k = 0; k < z.size(); ++k) grad[k] = (pm.mean[k] - z[k]) * pm.mass;
        return grad;
    };

    for (r.iterations = 0;; ++r.iterations) {
        const auto grad = gradient(m, r.z_star);
        r.value = m.mass;
        r.grad_norm = projected_norm(grad, g);
        r.tol_grad = options.tol_grad_rel * m.mass;
        if (r.grad_norm <= r.tol_grad) {
            r.converged = true;
            break;
        }
        if (r.iterations >= options.max_iters) break;

        // Diagonal Newton scaling: for a Gaussian f, ∂²F/∂z_k² = F · Var_k(f^z).
        Point dir(r.z_star.size(), 0.0);
        double slope = 0.0;
        for (std::size_t k : free) {
            dir[k] = -grad[k] / (m.mass * m.variance[k]);
            slope += grad[k] * dir[k];
        }
        double t = 1.0;
        bool accepted = false;
        for (int b = 0; b < options.max_backtracks; ++b, t *= options.shrink) {
            Point trial = r.z_star;
            for (std::size_t k : free) trial[k] += t * dir[k];
            PolarMoments tm;
            try {
                tm = polar_moments(f, trial, plan);
            } catch (const Error&) {
                continue;  // step left the region where f^z has finite mass on the grid
            }
            // Once the predicted decrease is at the rounding level of F the
            // Armijo test is meaningless; take the step.
            const bool noise_floor = std::fabs(t * slope) <= 1e-13 * m.mass;
            if (tm.mass <= m.mass + options.armijo * t * slope || (noise_floor && tm.mass <= m.mass * (1 + 1e-13))) {
                r.z_star = trial;
                m = tm;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return r;
}

LambdaSplit lambda_split(const LogConcaveFnGrid& f, std::size_t axis, double lambda, double tol_split) {
    const GridSpec& spec = f.spec();
    require(axis < spec.dim(), ErrorKind::InvalidArgument, "axis out of range");
    require(lambda > 0.0 && lambda < 1.0, ErrorKind::InvalidArgument, "lambda must lie in (0, 1)");
    const std::size_t n = spec.count(axis);
    const double h = spec.step(axis);

    std::vector<ExactSum> acc(n);
    for (std::size_t i = 0; i < spec.size(); ++i) acc[(i / spec.stride(axis)) % n].add(f[i]);
    std::vector<double> marginal(n);
    ExactSum all;
    for (std::size_t i = 0; i < n; ++i) {
        marginal[i] = acc[i].value();
        all.add(marginal[i]);
    }
    const double total = all.value();
    require(total > 0.0, ErrorKind::DegenerateMarginal, "marginal vanishes");

    auto upper_fraction = [&](double c) {
        ExactSum s;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = std::clamp((spec.coord(axis, i) + 0.5 * h - c) / h, 0.0, 1.0);
            s.add(marginal[i] * w);
        }
        return s.value() / total;
    };

    double lo = spec.lo(axis) - 0.5 * h;  // fraction 1
    double hi = spec.hi(axis) + 0.5 * h;  // fraction 0
    double c = 0.5 * (lo + hi);
    double frac = upper_fraction(c);
    for (int it = 0; it < 200; ++it) {
        c = 0.5 * (lo + hi);
        frac = upper_fraction(c);
        if (std::fabs(frac - lambda) <= tol_split) break;
        if (frac > lambda) lo = c;
        else hi = c;
        if (hi - lo <= 1e-15 * h) break;
    }

    std::size_t node = spec.nearest_index(axis, c);
    node = std::clamp<std::size_t>(node, 1, n - 2);
    LambdaSplit out;
    out.unsnapped_offset = c;
    out.unsnapped_lambda = frac;
    out.hyperplane = {axis, spec.coord(axis, node)};
    const HalfSpaceMasses hm = half_space_masses(f, out.hyperplane);
    out.achieved_lambda = hm.plus / (hm.plus + hm.minus);
    require(out.achieved_lambda > 0.0 && out.achieved_lambda < 1.0, ErrorKind::DegenerateMarginal,
            "snapped hyperplane leaves all mass on one side");
    return out;
}

}  // namespace lcf
