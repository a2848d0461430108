#include "cli_verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include "json.hpp"
#include "lcf/corpus.hpp"
#include "lcf/errors.hpp"
#include "lcf/io.hpp"
#include "lcf/legendre.hpp"
#include "lcf/report.hpp"
#include "lcf/santalo.hpp"
#include "lcf/steiner.hpp"
#include "lcf/verify.hpp"

namespace lcf::cli {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json point_json(const Point& z) {
    json out = json::array();
    for (double v : z) out.push_back(number(v));
    return out;
}

std::string point_text(const Point& z) {
    std::string out;
    for (std::size_t k = 0; k < z.size(); ++k) out += (k ? ";" : "") + format_double(z[k]);
    return out;
}

json verdict_json(const Verdict& v) {
    return {{"name", v.name},
            {"passed", v.passed},
            {"value", number(v.value)},
            {"threshold", number(v.threshold)},
            {"detail", v.detail}};
}

bool numeric_kind(ErrorKind k) {
    return k == ErrorKind::MassOutOfRange || k == ErrorKind::AllInfinite || k == ErrorKind::CenterTooCloseToEdge ||
           k == ErrorKind::NotConverged;
}

// Outcome of one suite on one corpus entry.
struct EntryResult {
    std::size_t index = 0;
    std::string family;
    std::string expression;
    std::vector<Verdict> verdicts;
    std::vector<std::string> csv_rows;  // without the leading index,family
    json details = json::object();
    bool numeric_abort = false;

    bool passed() const {
        return !numeric_abort && std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
    }
};

struct Suite {
    std::string name;
    std::string csv_header;  // columns after index,family
    std::function<void(const CorpusEntry&, EntryResult&)> run;
};

struct Context {
    const VerifyParams& params;
    GridSpec grid;
    ConjugatePlan plan;
};

// The fixed point z1 and first hyperplane of the symmetrization procedure.
std::pair<Hyperplane, Point> first_split(const Context& ctx, const LogConcaveFnGrid& f) {
    const Hyperplane h = lambda_split(f, 0, ctx.params.lambda).hyperplane;
    const AffineSubspace g(f.spec().dim(), {h});
    const SantaloResult s = santalo_point(f, g, ctx.plan);
    return {h, s.z_star};
}

void run_theorem1(const Context& ctx, const CorpusEntry& e, EntryResult& r) {
    const auto& f = e.function;
    const std::size_t n = f.spec().dim();
    const SantaloResult s = santalo_point(f, AffineSubspace::whole_space(n), ctx.plan);
    const double mass = integrate(f);
    const double product = mass * s.value;
    const double bound = std::pow(2.0 * std::numbers::pi, static_cast<double>(n));
    const double ratio = product / bound;
    r.verdicts.push_back({"product_bound", ratio <= 1.0 + ctx.params.eps_tot, ratio, 1.0 + ctx.params.eps_tot,
                          "product / (2pi)^n at the Santalo point"});
    r.verdicts.push_back({"santalo_converged", s.converged, s.grad_norm, s.tol_grad,
                          std::to_string(s.iterations) + " iterations"});
    r.csv_rows.push_back(format_double(mass) + ',' + format_double(s.value) + ',' + format_double(product) + ',' +
                         format_double(ratio) + ',' + point_text(s.z_star) + ',' + std::to_string(s.iterations) +
                         ',' + (s.converged ? "true" : "false"));
    r.details = {{"mass", number(mass)},   {"polar_mass", number(s.value)}, {"product", number(product)},
                 {"ratio", number(ratio)}, {"z", point_json(s.z_star)},     {"iterations", s.iterations}};
}

void run_theorem2(const Context& ctx, const CorpusEntry& e, EntryResult& r) {
    PipelineOptions opts;
    opts.eps_tot = ctx.params.eps_tot;
    opts.eps_ineq = ctx.params.eps_ineq;
    const PipelineReport rep = run_pipeline(e.function, 0, ctx.params.lambda, ctx.plan, opts);
    r.verdicts = rep.verdicts;
    std::stringstream csv;
    write_pipeline_csv(csv, rep);
    std::string line;
    std::getline(csv, line);  // header
    while (std::getline(csv, line)) r.csv_rows.push_back(line);
    r.details = json::parse(pipeline_report_json(rep));
}

void record_ball(const BallTriple& t, const VerifyParams& p, EntryResult& r) {
    try {
        // Sampled slice masses are accurate to about one cell, so the pointwise
        // hypothesis gets a relative tolerance of one sample spacing.
        const BallLemmaReport b = ball_lemma_check(t, p.eps_ineq, t.w[1] - t.w[0]);
        r.verdicts.push_back({"ball_inequality", b.ok, b.lhs, b.rhs * (1.0 + p.eps_ineq),
                              "1/int F0 <= (1/int F1 + 1/int F2)/2"});
        r.csv_rows.push_back("true," + format_double(b.worst_hypothesis_ratio) + ',' + format_double(b.lhs) + ',' +
                             format_double(b.rhs) + ',' + (b.ok ? "true" : "false"));
        r.details = {{"hypothesis_ok", true},
                     {"worst_hypothesis_ratio", number(b.worst_hypothesis_ratio)},
                     {"lhs", number(b.lhs)},
                     {"rhs", number(b.rhs)}};
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::HypothesisFailed) throw;
        r.verdicts.push_back({"ball_hypothesis", false, 0.0, 0.0, err.what()});
        r.csv_rows.push_back("false,,,,false");
        r.details = {{"hypothesis_ok", false}, {"error", err.what()}};
    }
}

void run_lemma21(const Context& ctx, const CorpusEntry& e, EntryResult& r) {
    const auto [h, z] = first_split(ctx, e.function);
    record_ball(separation_triple(e.function, z, h, ctx.plan), ctx.params, r);
}

void run_lemma45(const Context& ctx, const CorpusEntry& e, EntryResult& r) {
    const auto [h, z] = first_split(ctx, e.function);
    const SeparationReport s = verify_separation_lemma(e.function, z, h, ctx.plan, ctx.params.eps_ineq);
    const SliceReport sl = slice_inequality_check(e.function, z, h, ctx.plan, 16, ctx.params.corpus.seed,
                                                  ctx.params.eps_ineq);
    r.verdicts.push_back({"separation", s.ok, s.lhs, s.rhs * (1.0 - ctx.params.eps_ineq),
                          "int (S_H f)^z >= 4 lambda (1 - lambda) int f^z"});
    r.verdicts.push_back({"slice_inequality", sl.ok, sl.worst_ratio, 1.0 + ctx.params.eps_ineq,
                          std::to_string(sl.samples.size()) + " (s,t) samples"});
    r.csv_rows.push_back(format_double(h.offset) + ',' + point_text(z) + ',' + format_double(s.lambda) + ',' +
                         format_double(s.lhs) + ',' + format_double(s.rhs) + ',' + format_double(sl.worst_ratio) +
                         ',' + (s.ok && sl.ok ? "true" : "false"));
    r.details = {{"offset", number(h.offset)}, {"z", point_json(z)},          {"lambda", number(s.lambda)},
                 {"lhs", number(s.lhs)},       {"rhs", number(s.rhs)},        {"slice_worst_ratio", number(sl.worst_ratio)},
                 {"slice_samples", sl.samples.size()}};
}

// Symmetrizing about the middle node of every axis makes any corpus member
// unconditional.
LogConcaveFnGrid unconditional_version(const LogConcaveFnGrid& f) {
    LogConcaveFnGrid g = f;
    for (std::size_t k = 0; k < f.spec().dim(); ++k)
        g = steiner_symmetrize(g, {k, f.spec().coord(k, f.spec().count(k) / 2)});
    return g;
}

void run_lemma46(const Context& ctx, const CorpusEntry& e, EntryResult& r) {
    const UnconditionalReport u =
        unconditional_product_check(unconditional_version(e.function), ctx.plan, std::nullopt, 1e-12, ctx.params.eps_tot);
    r.verdicts.push_back({"unconditional_bound", u.ok, u.ratio, 1.0 + ctx.params.eps_tot, "product / (2pi)^n"});
    r.csv_rows.push_back(format_double(u.mass) + ',' + format_double(u.polar_mass) + ',' + format_double(u.product) +
                         ',' + format_double(u.ratio) + ',' + (u.ok ? "true" : "false"));
    r.details = {{"mass", number(u.mass)},
                 {"polar_mass", number(u.polar_mass)},
                 {"product", number(u.product)},
                 {"ratio", number(u.ratio)}};
}

BallTriple counterexample_triple() {
    // F0 decays twice as fast as the harmonic-mean hypothesis allows.
    BallTriple t;
    const std::size_t n = 401;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 10.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        t.w.push_back(w);
        t.f0.push_back(std::exp(-2.0 * w));
        t.f1.push_back(std::exp(-w));
        t.f2.push_back(std::exp(-w));
    }
    return t;
}

template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) body(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace

std::size_t default_nodes(std::size_t dim) { return dim == 1 ? 2049 : dim == 2 ? 257 : 33; }

int run_verify(const VerifyParams& p) {
    static const std::vector<std::string> kSuites = {"theorem1", "theorem2", "lemma21", "lemma45", "lemma46", "prekopa"};
    std::vector<std::string> selected;
    if (p.suite == "all")
        selected = kSuites;
    else if (std::find(kSuites.begin(), kSuites.end(), p.suite) != kSuites.end())
        selected = {p.suite};
    else
        raise(ErrorKind::InvalidArgument, "unknown suite '" + p.suite + "'");
    require(p.fixture.empty() || p.fixture == "counterexample", ErrorKind::InvalidArgument,
            "unknown fixture '" + p.fixture + "'");
    require(p.lambda > 0.0 && p.lambda < 1.0, ErrorKind::InvalidArgument, "lambda must lie in (0,1)");

    const auto& c = p.corpus;
    const std::size_t nodes = c.nodes ? c.nodes : default_nodes(c.dim);
    Context ctx{p, GridSpec::cube(c.dim, c.lo, c.hi, nodes), {}};
    GridSpec ygrid = ctx.grid;
    if (p.y_lo < p.y_hi) ygrid = GridSpec::cube(c.dim, p.y_lo, p.y_hi, p.y_nodes ? p.y_nodes : nodes);
    ctx.plan = ConjugatePlan{ctx.grid, ygrid, Point(c.dim, 0.0)};

    std::vector<CorpusEntry> corpus;
    const bool fixture = !p.fixture.empty();
    if (!(fixture && selected == std::vector<std::string>{"lemma21"}))
        corpus = generate_corpus(parse_family(c.family), c.count, c.seed, ctx.grid);

    std::vector<Suite> suites;
    for (const auto& name : selected) {
        if (name == "theorem1")
            suites.push_back({name, "mass,polar_mass,product,ratio,z,iterations,converged",
                              [&](const CorpusEntry& e, EntryResult& r) { run_theorem1(ctx, e, r); }});
        else if (name == "theorem2")
            suites.push_back({name,
                              "i,axis,offset,lambda,z,mass,polar_mass,pre_polar_mass,product,involution_residual,"
                              "santalo_converged",
                              [&](const CorpusEntry& e, EntryResult& r) { run_theorem2(ctx, e, r); }});
        else if (name == "lemma21")
            suites.push_back({name, "hypothesis_ok,worst_hypothesis_ratio,lhs,rhs,ok",
                              [&](const CorpusEntry& e, EntryResult& r) { run_lemma21(ctx, e, r); }});
        else if (name == "lemma45")
            suites.push_back({name, "offset,z,lambda,lhs,rhs,slice_worst_ratio,ok",
                              [&](const CorpusEntry& e, EntryResult& r) { run_lemma45(ctx, e, r); }});
        else if (name == "lemma46")
            suites.push_back({name, "mass,polar_mass,product,ratio,ok",
                              [&](const CorpusEntry& e, EntryResult& r) { run_lemma46(ctx, e, r); }});
        else
            suites.push_back({name, "partner,lambda,lhs,rhs,ok", [&](const CorpusEntry& e, EntryResult& r) {
                                  const auto& g = corpus[(e.index + 1) % corpus.size()];
                                  const PrekopaReport pk = prekopa_check(e.function, g.function, p.lambda, p.eps_ineq);
                                  r.verdicts.push_back({"prekopa", pk.ok, pk.lhs, pk.rhs * (1.0 - p.eps_ineq),
                                                        "int (lambda f) * ((1-lambda) g) >= (int f)^lambda (int g)^(1-lambda)"});
                                  r.csv_rows.push_back(std::to_string(g.index) + ',' + format_double(pk.lambda) + ',' +
                                                       format_double(pk.lhs) + ',' + format_double(pk.rhs) + ',' +
                                                       (pk.ok ? "true" : "false"));
                                  r.details = {{"partner", g.index}, {"lhs", number(pk.lhs)}, {"rhs", number(pk.rhs)}};
                              }});
    }

    std::filesystem::create_directories(p.out_dir);
    bool any_failed = false, any_numeric = false;
    for (const auto& suite : suites) {
        std::vector<EntryResult> results;
        if (suite.name == "lemma21" && fixture) {
            EntryResult r;
            r.family = "fixture";
            r.expression = "counterexample: F0 = exp(-2w), F1 = F2 = exp(-w)";
            record_ball(counterexample_triple(), p, r);
            results.push_back(std::move(r));
        } else {
            results.resize(corpus.size());
            parallel_for(corpus.size(), p.jobs, [&](std::size_t i) {
                const auto& e = corpus[i];
                EntryResult& r = results[i];
                r.index = e.index;
                r.family = e.family;
                r.expression = e.expression.describe();
                try {
                    suite.run(e, r);
                } catch (const Error& err) {
                    r.numeric_abort = numeric_kind(err.kind());
                    r.verdicts.push_back({"completed", false, 0.0, 0.0, err.what()});
                    r.details["error"] = err.what();
                }
            });
        }

        // Assembly is ordered by entry index regardless of scheduling.
        std::ofstream csv(std::filesystem::path(p.out_dir) / (suite.name + ".csv"));
        csv << "index,family," << suite.csv_header << '\n';
        json doc = {{"suite", suite.name},   {"seed", c.seed},       {"family", c.family},
                    {"dim", c.dim},          {"nodes", nodes},       {"lo", c.lo},
                    {"hi", c.hi},            {"lambda", p.lambda},   {"fixture", p.fixture},
                    {"eps_tot", p.eps_tot},  {"eps_ineq", p.eps_ineq}};
        json entries = json::array();
        std::size_t passed = 0;
        const EntryResult* first_failure = nullptr;
        for (const auto& r : results) {
            for (const auto& row : r.csv_rows) csv << r.index << ',' << r.family << ',' << row << '\n';
            json verdicts = json::array();
            for (const auto& v : r.verdicts) verdicts.push_back(verdict_json(v));
            entries.push_back({{"index", r.index},
                               {"family", r.family},
                               {"expression", r.expression},
                               {"passed", r.passed()},
                               {"verdicts", std::move(verdicts)},
                               {"details", r.details}});
            if (r.passed())
                ++passed;
            else if (!first_failure)
                first_failure = &r;
            any_numeric = any_numeric || r.numeric_abort;
        }
        doc["entries"] = std::move(entries);
        doc["passed"] = passed == results.size();
        std::ofstream(std::filesystem::path(p.out_dir) / (suite.name + ".json")) << doc.dump(2) << '\n';

        std::cout << "suite " << suite.name << ": " << passed << '/' << results.size() << " entries passed\n";
        if (first_failure) {
            any_failed = true;
            for (const auto& v : first_failure->verdicts) {
                if (v.passed) continue;
                std::cout << "  first failure: entry " << first_failure->index << " (" << first_failure->family
                          << ") verdict " << v.name << " value " << format_double(v.value) << " threshold "
                          << format_double(v.threshold) << (v.detail.empty() ? "" : " : " + v.detail) << '\n';
                break;
            }
        }
    }
    if (any_numeric) return 3;
    return any_failed ? 1 : 0;
}

}  // namespace lcf::cli
