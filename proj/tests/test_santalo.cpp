#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lcf/corpus.hpp"
#include "lcf/errors.hpp"
#include "lcf/exact_sum.hpp"
#include "lcf/legendre.hpp"
#include "lcf/santalo.hpp"

using namespace lcf;

namespace {

struct Setup {
    GridSpec grid;
    ConjugatePlan plan;
};

Setup setup(std::size_t dim, std::size_t nodes, double lo = -16, double hi = 16) {
    GridSpec g = GridSpec::cube(dim, lo, hi, nodes);
    return {g, ConjugatePlan{g, g, Point(dim, 0.0)}};
}

LogConcaveFnGrid one_sided_exponential(const GridSpec& g) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = g.coord(0, i) >= 0.0 ? std::exp(-g.coord(0, i)) : 0.0;
    return LogConcaveFnGrid(g, v);
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("gradient agrees with central finite differences on the corpus") {
    for (const auto& [dim, nodes] : {std::pair<std::size_t, std::size_t>{1, 2049}, {2, 129}}) {
        const auto s = setup(dim, nodes);
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        for (const auto& e : generate_corpus(CorpusFamily::Mixed, 6, 11, s.grid)) {
            const auto& f = e.function;
            Point z = barycenter(f);
            for (auto& c : z) c += u(rng);
            const double F = polar_mass(f, z, s.plan);
            const auto grad = polar_mass_gradient(f, z, s.plan);
            const double delta = 1e-3;
            for (std::size_t k = 0; k < dim; ++k) {
                Point zp = z, zm = z;
                zp[k] += delta;
                zm[k] -= delta;
                const double fd = (polar_mass(f, zp, s.plan) - polar_mass(f, zm, s.plan)) / (2.0 * delta);
                CHECK(std::fabs(grad[k] - fd) <= 1e-4 * std::fabs(F));
            }
        }
    }
}

TEST_CASE("gradient of the one-sided exponential matches finite differences") {
    const auto s = setup(1, 2049);
    const auto f = one_sided_exponential(s.grid);
    const Point z{0.5};
    const double fd = (polar_mass(f, {0.501}, s.plan) - polar_mass(f, {0.499}, s.plan)) / 2e-3;
    CHECK(std::fabs(polar_mass_gradient(f, z, s.plan)[0] - fd) <= 1e-4 * polar_mass(f, z, s.plan));
}

TEST_CASE("polar mass of the standard gaussian at its center") {
    const auto s1 = setup(1, 2049);
    CHECK(polar_mass(sample(Expression::standard_gaussian(1), s1.grid), {0.0}, s1.plan) ==
          doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-6));
    const auto s2 = setup(2, 257);
    CHECK(polar_mass(sample(Expression::standard_gaussian(2), s2.grid), {0.0, 0.0}, s2.plan) ==
          doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-4));
}

TEST_CASE("polar mass is even about the center of an even function") {
    const auto s = setup(2, 129);
    const auto f = sample(Expression::gaussian({0.0, 0.0}, {1.0, 2.5}), s.grid);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const Point z{u(rng), u(rng)};
        const double a = polar_mass(f, z, s.plan), b = polar_mass(f, {-z[0], -z[1]}, s.plan);
        CHECK(std::fabs(a - b) <= 1e-9 * a);
    }
}

TEST_CASE("polar mass is convex along random segments") {
    const auto s = setup(1, 1025);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& e : generate_corpus(CorpusFamily::Mixed, 5, 13, s.grid)) {
        const auto& f = e.function;
        const double b = barycenter(f)[0];
        for (int i = 0; i < 200; ++i) {
            const Point z1{b + 2.0 * u(rng) - 1.0}, z2{b + 2.0 * u(rng) - 1.0};
            const double a = u(rng);
            const Point zm{a * z1[0] + (1.0 - a) * z2[0]};
            const double F1 = polar_mass(f, z1, s.plan), F2 = polar_mass(f, z2, s.plan);
            CHECK(polar_mass(f, zm, s.plan) <= a * F1 + (1.0 - a) * F2 + 1e-6 * std::max(F1, F2));
        }
    }
}

TEST_CASE("santalo point of an even function is its center") {
    const auto s = setup(2, 129);
    const auto f = sample(Expression::gaussian({1.0, -2.0}, {1.0, 2.0}), s.grid);
    const auto r = santalo_point(f, AffineSubspace::whole_space(2), s.plan);
    CHECK(r.converged);
    CHECK(std::fabs(r.z_star[0] - 1.0) <= 1e-4 * 32.0);
    CHECK(std::fabs(r.z_star[1] + 2.0) <= 1e-4 * 32.0);
}

TEST_CASE("santalo point is the barycenter of its polar and optimal") {
    const auto s = setup(2, 129);
    for (const auto& e : generate_corpus(CorpusFamily::Mixed, 5, 17, s.grid)) {
        const auto& f = e.function;
        const auto r = santalo_point(f, AffineSubspace::whole_space(2), s.plan);
        REQUIRE(r.converged);
        CHECK(r.grad_norm <= r.tol_grad);
        const Point b = barycenter(polar(f, r.z_star, s.plan.moved_to(r.z_star), nullptr, {1e-9, 1e-6, false, false}));
        for (std::size_t k = 0; k < 2; ++k) CHECK(std::fabs(b[k] - r.z_star[k]) <= 1e-4 * 32.0);
        const double h = s.grid.step(0);
        for (std::size_t k = 0; k < 2; ++k)
            for (double sign : {-1.0, 1.0}) {
                Point z = r.z_star;
                z[k] += sign * h;
                CHECK(polar_mass(f, z, s.plan) >= r.value - r.tol_grad * h);
            }
        // Coercivity proxy: a ring near the edge of the support is worse.
        for (int a = 0; a < 8; ++a) {
            const double t = 2.0 * std::numbers::pi * a / 8.0;
            const Point z{r.z_star[0] + 4.0 * std::cos(t), r.z_star[1] + 4.0 * std::sin(t)};
            CHECK(polar_mass(f, z, s.plan) > r.value);
        }
    }
}

TEST_CASE("santalo point of the one-sided exponential matches a dense scan") {
    const auto s = setup(1, 2049);
    const auto f = one_sided_exponential(s.grid);
    const auto r = santalo_point(f, AffineSubspace::whole_space(1), s.plan);
    REQUIRE(r.converged);
    double best = std::numeric_limits<double>::infinity(), best_z = 0.0;
    const double lo = 0.05, hi = 3.0, dz = (hi - lo) / 999.0;
    for (int i = 0; i < 1000; ++i) {
        const double z = lo + dz * i;
        const double F = polar_mass(f, {z}, s.plan);
        if (F < best) best = F, best_z = z;
    }
    CHECK(best_z > lo);
    CHECK(best_z < hi);
    CHECK(std::fabs(r.z_star[0] - best_z) <= dz);
    CHECK(r.value <= best * (1.0 + 1e-12));
}

TEST_CASE("restricted santalo point stays in the subspace") {
    const auto s = setup(2, 129);
    const auto f = sample(Expression::gaussian({0.5, 0.5}, {1.0, 1.0}), s.grid);
    const AffineSubspace g(2, {Hyperplane{0, 1.5}});
    const auto r = santalo_point(f, g, s.plan);
    CHECK(r.converged);
    CHECK(r.z_star[0] == 1.5);
    CHECK(std::fabs(r.z_star[1] - 0.5) <= 1e-4 * 32.0);
    CHECK(kind_of([&] { santalo_point(f, AffineSubspace(2, {Hyperplane{0, 40.0}}), s.plan); }) ==
          ErrorKind::SubspaceOutsideSupport);
}

TEST_CASE("lambda split of an even function at one half is its center") {
    const auto s = setup(1, 2049);
    const auto f = sample(Expression::gaussian({2.0}, {1.0}), s.grid);
    const auto r = lambda_split(f, 0, 0.5);
    CHECK(r.hyperplane.offset == 2.0);
    CHECK(r.achieved_lambda == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("lambda split of the one-sided exponential is at ln 2") {
    const auto s = setup(1, 4097);
    const auto f = one_sided_exponential(s.grid);
    const auto r = lambda_split(f, 0, 0.5);
    CHECK(std::fabs(r.unsnapped_offset - std::numbers::ln2) <= s.grid.step(0));
    CHECK(r.unsnapped_lambda == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("snapped lambda stays within one cell of marginal mass") {
    const auto s = setup(2, 129);
    for (const auto& e : generate_corpus(CorpusFamily::Mixed, 8, 5, s.grid)) {
        const auto& f = e.function;
        for (double lambda : {0.2, 0.5, 0.8}) {
            const auto r = lambda_split(f, 1, lambda);
            const auto sums = line_sums(f, 1);
            double marginal_max = 0.0;
            const std::size_t n = s.grid.count(1);
            for (std::size_t i = 0; i < n; ++i) {
                double m = 0.0;
                for (std::size_t line = 0; line < s.grid.line_count(1); ++line)
                    m += f[s.grid.line_start(1, line) + i * s.grid.stride(1)];
                marginal_max = std::max(marginal_max, m);
            }
            CHECK(std::fabs(r.achieved_lambda - lambda) <= marginal_max / exact_sum(f.values()) + 1e-12);
        }
    }
}

TEST_CASE("lambda split rejects a degenerate marginal") {
    const GridSpec g = GridSpec::cube(1, -1, 1, 3);
    const LogConcaveFnGrid f(g, std::vector<double>{1.0, 0.0, 0.0}, {1e-9, 1e-6, true, false});
    CHECK(kind_of([&] { lambda_split(f, 0, 0.3); }) == ErrorKind::DegenerateMarginal);
}
