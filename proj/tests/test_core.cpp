#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lcf/corpus.hpp"
#include "lcf/errors.hpp"
#include "lcf/exact_sum.hpp"
#include "lcf/fn_grid.hpp"
#include "lcf/io.hpp"

using namespace lcf;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an lcf::Error");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("exact sum matches integer arithmetic on dyadic inputs") {
    // Values k·2^-20 with |k| < 2^40 sum exactly in int64.
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> xs;
        std::int64_t total = 0;
        for (int i = 0; i < 1000; ++i) {
            const std::int64_t k = static_cast<std::int64_t>(rng() >> 24) - (std::int64_t{1} << 39);
            total += k;
            xs.push_back(std::ldexp(static_cast<double>(k), -20));
        }
        CHECK(exact_sum(xs) == std::ldexp(static_cast<double>(total), -20));
    }
}

TEST_CASE("exact sum survives cancellation and is order independent") {
    const std::vector<double> xs = {1e16, 1.0, -1e16, 1e-300, -1e-300, 3.0};
    CHECK(exact_sum(xs) == 4.0);
    std::vector<double> ys;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 5000; ++i) ys.push_back(u(rng) * std::pow(10.0, static_cast<int>(rng() % 30) - 15));
    const double ref = exact_sum(ys);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(ys.begin(), ys.end(), rng);
        CHECK(exact_sum(ys) == ref);
    }
}

TEST_CASE("grid spec validates its axes") {
    CHECK(kind_of([] { GridSpec({{0.0, 1.0, 2}}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { GridSpec({{1.0, 1.0, 5}}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { GridSpec({{0, 1, 3}, {0, 1, 3}, {0, 1, 3}, {0, 1, 3}}); }) == ErrorKind::InvalidArgument);
    const GridSpec g({{-1.0, 1.0, 5}, {0.0, 3.0, 4}});
    CHECK(g.size() == 20);
    CHECK(g.step(0) == 0.5);
    CHECK(g.coord(1, 3) == 3.0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.flat(g.unflat(i)) == i);
    CHECK(g.node_index(0, 0.5).value() == 3);
    CHECK_FALSE(g.node_index(0, 0.25).has_value());
}

TEST_CASE("extended reals add and compare with +inf absorbing") {
    const auto a = ExtendedValue::finite(2.0);
    const auto inf = ExtendedValue::plus_infinity();
    CHECK((a + a).value() == 4.0);
    CHECK((a + inf).is_infinite());
    CHECK(max(a, inf).is_infinite());
    CHECK(ExtendedValue::from_double(std::numeric_limits<double>::infinity()).is_infinite());
    CHECK(kind_of([] { ExtendedValue::from_double(-std::numeric_limits<double>::infinity()); }) ==
          ErrorKind::InvalidArgument);
}

TEST_CASE("quadrature of the standard gaussian matches the closed form") {
    const auto f1 = sample(Expression::standard_gaussian(1), GridSpec::cube(1, -8, 8, 1025));
    CHECK(integrate(f1) == doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
    const auto f2 = sample(Expression::standard_gaussian(2), GridSpec::cube(2, -8, 8, 129));
    CHECK(integrate(f2) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("barycenter of a shifted gaussian is its mean") {
    const auto f = sample(Expression::gaussian({0.3, -0.7}, {1.0, 0.5}), GridSpec::cube(2, -10, 10, 201));
    const Point b = barycenter(f);
    CHECK(b[0] == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(b[1] == doctest::Approx(-0.7).epsilon(1e-10));
}

TEST_CASE("half-space masses split the total and locate the hyperplane") {
    const auto f = sample(Expression::standard_gaussian(1), GridSpec::cube(1, -8, 8, 1025));
    const auto m = half_space_masses(f, {0, 0.0});
    CHECK(m.plus == doctest::Approx(m.minus).epsilon(1e-14));
    CHECK(m.plus + m.minus == doctest::Approx(integrate(f)).epsilon(1e-14));
    CHECK(kind_of([&] { half_space_masses(f, {0, 0.001}); }) == ErrorKind::OffsetNotOnGrid);
}

TEST_CASE("symmetry defect vanishes for even functions only") {
    const GridSpec g = GridSpec::cube(2, -6, 6, 97);
    const auto even = sample(Expression::standard_gaussian(2), g);
    CHECK(symmetry_defect(even, {0, 0.0}) == 0.0);
    CHECK(symmetry_defect(even, {1, 0.0}) == 0.0);
    const auto shifted = sample(Expression::gaussian({0.5, 0.0}, {1.0, 1.0}), g);
    CHECK(symmetry_defect(shifted, {0, 0.0}) > 0.1);
    CHECK(symmetry_defect(shifted, {1, 0.0}) == 0.0);
}

TEST_CASE("log-concave grids reject violations of their invariants") {
    const GridSpec g = GridSpec::cube(1, -8, 8, 161);
    std::vector<double> bimodal(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coord(0, i);
        bimodal[i] = std::exp(-(x - 3) * (x - 3)) + std::exp(-(x + 3) * (x + 3));
    }
    CHECK(kind_of([&] { LogConcaveFnGrid(g, bimodal); }) == ErrorKind::InvariantViolation);
    std::vector<double> wide(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) wide[i] = std::exp(-std::fabs(g.coord(0, i)) / 10.0);
    CHECK(kind_of([&] { LogConcaveFnGrid(g, wide); }) == ErrorKind::InvariantViolation);
    CHECK(kind_of([&] { LogConcaveFnGrid(g, std::vector<double>(g.size(), 0.0)); }) == ErrorKind::MassOutOfRange);
    std::vector<double> negative(g.size(), 0.0);
    negative[80] = -1.0;
    CHECK(kind_of([&] { LogConcaveFnGrid(g, negative); }) == ErrorKind::InvariantViolation);
}

TEST_CASE("convex grids require a contiguous finite domain") {
    const GridSpec g = GridSpec::cube(1, -2, 2, 5);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_NOTHROW(ConvexFnGrid::from_doubles(g, std::vector<double>{inf, 1, 0, 1, inf}));
    CHECK(kind_of([&] { ConvexFnGrid::from_doubles(g, std::vector<double>{0, inf, 0, 1, 2}); }) ==
          ErrorKind::InvariantViolation);
    CHECK(kind_of([&] { ConvexFnGrid::from_doubles(g, std::vector<double>{0, 2, 1, 2, 0}); }) ==
          ErrorKind::InvariantViolation);
    CHECK(kind_of([&] { ConvexFnGrid::from_doubles(g, std::vector<double>(5, inf)); }) ==
          ErrorKind::InvariantViolation);
}

TEST_CASE("sampled expressions agree with their closed form phi") {
    const GridSpec g = GridSpec::cube(2, -10, 10, 41);
    const Expression e = Expression::polyhedral_quadratic({{1.0, 0.5}, {-1.0, 0.2}, {0.0, -1.0}}, {0.1, -0.2, 0.3},
                                                          0.25, {0.2, -0.1});
    const auto f = sample(e, g);
    for (std::size_t i = 0; i < g.size(); i += 37) {
        const Point x = g.node_point(i);
        CHECK(f[i] == doctest::Approx(std::exp(-e.phi(x))).epsilon(1e-15));
    }
}

TEST_CASE("grid files round-trip bit-exactly") {
    const double inf = std::numeric_limits<double>::infinity();
    const auto f = sample(Expression::gaussian({0.1, 0.2}, {0.7, 1.3}), GridSpec::cube(2, -7, 7, 65));
    std::stringstream ss;
    write_grid_function(ss, f);
    const auto back = std::get<LogConcaveFnGrid>(read_grid_function(ss));
    CHECK(back.spec() == f.spec());
    CHECK(std::equal(back.values().begin(), back.values().end(), f.values().begin()));

    const auto phi = ConvexFnGrid::from_doubles(GridSpec::cube(1, -1, 1, 5), std::vector<double>{inf, 0.1, 1e-300, 0.3, inf});
    std::stringstream cs;
    write_grid_function(cs, phi);
    const auto phi2 = std::get<ConvexFnGrid>(read_grid_function(cs));
    CHECK(std::equal(phi.values().begin(), phi.values().end(), phi2.values().begin()));
}

TEST_CASE("grid file parse errors carry line numbers") {
    const auto error_of = [](const std::string& text) {
        std::istringstream is(text);
        try {
            read_grid_function(is);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ParseError);
            return std::string(e.what());
        }
        FAIL("expected a parse error");
        return std::string();
    };
    const std::string head = "# lcf grid v1\ndim 1\naxis 0 -1 1 3\n";
    CHECK(error_of("lcf grid\n").find("line 1") != std::string::npos);
    CHECK(error_of("# lcf grid v1\ndim 4\n").find("line 2") != std::string::npos);
    CHECK(error_of(head + "kind concave\n").find("line 4") != std::string::npos);
    CHECK(error_of(head + "kind logconcave\nvalues\n1\nx\n1\n").find("line 7") != std::string::npos);
    CHECK(error_of(head + "kind logconcave\nvalues\n1\ninf\n1\n").find("line 7") != std::string::npos);
    CHECK(error_of(head + "kind logconcave\nvalues\n1\n1\n").find("expected 3 values") != std::string::npos);
    CHECK(error_of(head + "kind logconcave\nvalues\n1\n1\n1\n1\n").find("line 9") != std::string::npos);
}

TEST_CASE("corpus generation is deterministic per seed") {
    const GridSpec g = GridSpec::cube(1, -16, 16, 513);
    const auto a = generate_corpus(CorpusFamily::Mixed, 6, 7, g);
    const auto b = generate_corpus(CorpusFamily::Mixed, 6, 7, g);
    const auto c = generate_corpus(CorpusFamily::Mixed, 6, 8, g);
    REQUIRE(a.size() == 6);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].expression.describe() == b[i].expression.describe());
        CHECK(std::equal(a[i].function.values().begin(), a[i].function.values().end(),
                         b[i].function.values().begin()));
        differs = differs || a[i].expression.describe() != c[i].expression.describe();
    }
    CHECK(differs);
}

TEST_CASE("corpus members satisfy the log-concave invariants") {
    const auto poly = generate_corpus(CorpusFamily::PolyhedralQuadratic, 5, 7, GridSpec::cube(1, -16, 16, 1025));
    for (const auto& e : poly) {
        CHECK(e.family == "polyhedral-quadratic");
        CHECK(e.function.log_concavity_defect() <= 1e-9);
    }
    const auto mixed = generate_corpus(CorpusFamily::Mixed, 5, 7, GridSpec::cube(2, -16, 16, 129));
    for (const auto& e : mixed) {
        CHECK(e.function.boundary_ratio() <= 1e-6);
        CHECK(e.function.log_concavity_defect() <= 1e-9);
    }
}

TEST_CASE("rng draws follow the documented construction") {
    Rng r(42);
    std::mt19937_64 ref(42);
    CHECK(r.raw() == ref());
    const std::uint64_t next = ref();
    CHECK(r.uniform(2.0, 4.0) == 2.0 + 2.0 * static_cast<double>(next >> 11) * 0x1.0p-53);
    CHECK(r.below(10) == ref() % 10);
}
