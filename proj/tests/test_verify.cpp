#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lcf/corpus.hpp"
#include "lcf/errors.hpp"
#include "lcf/report.hpp"
#include "lcf/steiner.hpp"
#include "lcf/verify.hpp"

using namespace lcf;

namespace {

ConjugatePlan plan_for(const GridSpec& g) { return ConjugatePlan{g, g, Point(g.dim(), 0.0)}; }

const Verdict& verdict(const PipelineReport& r, const std::string& name) {
    for (const auto& v : r.verdicts)
        if (v.name == name) return v;
    FAIL("missing verdict " << name);
    throw;
}

BallTriple exponential_triple(double rate0, double rate1, double rate2) {
    BallTriple t;
    for (int i = 0; i <= 400; ++i) {
        const double w = 10.0 * i / 400.0;
        t.w.push_back(w);
        t.f0.push_back(std::exp(-rate0 * w));
        t.f1.push_back(std::exp(-rate1 * w));
        t.f2.push_back(std::exp(-rate2 * w));
    }
    return t;
}

}  // namespace

TEST_CASE("pipeline on a 1-D gaussian passes every verdict") {
    const GridSpec g = GridSpec::cube(1, -16, 16, 2049);
    const auto f = sample(Expression::gaussian({0.7}, {1.3}), g);
    const auto r = run_pipeline(f, 0, 0.3, plan_for(g));
    CHECK_FALSE(r.aborted);
    CHECK(r.passed());
    REQUIRE(r.steps.size() == 1);
    CHECK(r.initial_product <= r.bound);
    CHECK(r.bound == doctest::Approx(2.0 * std::numbers::pi / (4.0 * r.lambda_1 * (1.0 - r.lambda_1))));
    for (const char* name : {"mass_conservation", "first_step_lower_bound", "monotone_products", "theorem_bound",
                             "final_unconditional", "santalo_converged"})
        CHECK(verdict(r, name).passed);
}

TEST_CASE("pipeline on 2-D corpus members passes") {
    const GridSpec g = GridSpec::cube(2, -16, 16, 129);
    for (const auto& e : generate_corpus(CorpusFamily::Gaussian, 3, 7, g)) {
        const auto r = run_pipeline(e.function, 0, 0.3, plan_for(g));
        CHECK(r.passed());
        REQUIRE(r.steps.size() == 2);
        CHECK(r.steps[1].product >= r.steps[0].product * (1.0 - 1e-6));
        for (double d : r.final_symmetry_defects) CHECK(d <= 1e-12);
    }
}

TEST_CASE("separation lemma and slice inequality hold on the corpus") {
    // At 257 nodes one polyhedral member misses a far-tail slice by 3 percent.
    const GridSpec g = GridSpec::cube(2, -16, 16, 513);
    const auto plan = plan_for(g);
    for (const auto& e : generate_corpus(CorpusFamily::Mixed, 4, 9, g)) {
        const auto& f = e.function;
        const Hyperplane h = lambda_split(f, 0, 0.4).hyperplane;
        const auto z = santalo_point(f, AffineSubspace(2, {h}), plan).z_star;
        const auto sep = verify_separation_lemma(f, z, h, plan);
        CHECK(sep.ok);
        CHECK(sep.lhs >= sep.rhs * (1.0 - 1e-6));
        CHECK(sep.lambda > 0.0);
        CHECK(sep.lambda < 1.0);
        const auto sl = slice_inequality_check(f, z, h, plan, 8, 7);
        CHECK(sl.ok);
        CHECK(sl.samples.size() == 8);
    }
}

TEST_CASE("ball inequality holds for a valid triple") {
    const auto r = ball_lemma_check(exponential_triple(0.5, 1.0, 1.0));
    CHECK(r.hypothesis_ok);
    CHECK(r.ok);
    CHECK(r.lhs == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("ball inequality rejects the counterexample triple") {
    try {
        ball_lemma_check(exponential_triple(2.0, 1.0, 1.0));
        FAIL("expected HypothesisFailed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::HypothesisFailed);
    }
}

TEST_CASE("unconditional functions satisfy the product bound") {
    const GridSpec g = GridSpec::cube(2, -16, 16, 257);
    const auto f = sample(Expression::gaussian({0.0, 0.0}, {1.0, 3.0}), g);
    const auto r = unconditional_product_check(f, plan_for(g));
    CHECK(r.ok);
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-3));
    for (const auto& e : generate_corpus(CorpusFamily::Mixed, 3, 4, g)) {
        LogConcaveFnGrid s = e.function;
        for (std::size_t k = 0; k < 2; ++k) s = steiner_symmetrize(s, {k, 0.0});
        const auto u = unconditional_product_check(s, plan_for(g));
        CHECK(u.ok);
        CHECK(u.ratio <= 1.02);
    }
}

TEST_CASE("a shifted function is not unconditional") {
    const GridSpec g = GridSpec::cube(1, -16, 16, 257);
    const auto f = sample(Expression::gaussian({1.0}, {1.0}), g);
    try {
        unconditional_product_check(f, plan_for(g));
        FAIL("expected NotUnconditional");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotUnconditional);
    }
}

TEST_CASE("santalo point is invariant under symmetrization of the polar") {
    const GridSpec g = GridSpec::cube(2, -16, 16, 129);
    for (const auto& e : generate_corpus(CorpusFamily::Mixed, 3, 21, g)) {
        const Hyperplane h = lambda_split(e.function, 0, 0.5).hyperplane;
        const auto r = verify_santalo_invariance(e.function, AffineSubspace(2, {h}), h, plan_for(g));
        CHECK(r.ok);
        CHECK(r.drift <= r.tolerance);
    }
}

TEST_CASE("polar of an even function is symmetric about its center") {
    const GridSpec g = GridSpec::cube(2, -16, 16, 129);
    const auto f = sample(Expression::gaussian({0.0, 0.0}, {2.0, 1.0}), g);
    CHECK(polar_symmetry_defect(f, {0.0, 0.0}, {0, 0.0}, plan_for(g)) <= 1e-12);
    CHECK(polar_symmetry_defect(f, {0.0, 0.0}, {1, 0.0}, plan_for(g)) <= 1e-12);
}

TEST_CASE("centered grid puts its middle node at z") {
    const GridSpec g = GridSpec::cube(2, -4, 4, 33);
    const GridSpec c = centered_at(g, {0.3, -1.25});
    CHECK(c.step(0) == g.step(0));
    CHECK(c.coord(0, 16) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(c.coord(1, 16) == -1.25);
}

TEST_CASE("pipeline report serializes to json and csv") {
    const GridSpec g = GridSpec::cube(2, -16, 16, 129);
    const auto f = sample(Expression::gaussian({0.0, 0.5}, {1.0, 2.0}), g);
    const auto r = run_pipeline(f, 0, 0.4, plan_for(g));
    const auto j = nlohmann::json::parse(pipeline_report_json(r));
    CHECK(j["dim"] == 2);
    CHECK(j["steps"].size() == 2);
    CHECK(j["steps"][0]["z"].size() == 2);
    CHECK(j["passed"] == r.passed());
    CHECK(j["verdicts"].size() == r.verdicts.size());
    CHECK(j["initial_product"].get<double>() == r.initial_product);

    std::ostringstream csv;
    write_pipeline_csv(csv, r);
    std::istringstream lines(csv.str());
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "i,axis,offset,lambda,z,mass,polar_mass,pre_polar_mass,product,involution_residual,santalo_converged");
    int rows = 0;
    while (std::getline(lines, row)) ++rows;
    CHECK(rows == 2);

    std::ostringstream vcsv;
    write_verdicts_csv(vcsv, r.verdicts);
    CHECK(vcsv.str().rfind("name,passed,value,threshold,detail\n", 0) == 0);
}

TEST_CASE("non-finite report values become null") {
    PipelineReport r;
    r.dim = 1;
    r.aborted = true;
    r.error = "NotConverged: stalled";
    r.initial_product = std::numeric_limits<double>::infinity();
    const auto j = nlohmann::json::parse(pipeline_report_json(r));
    CHECK(j["initial_product"].is_null());
    CHECK(j["aborted"] == true);
    CHECK(j["error"] == "NotConverged: stalled");
}
