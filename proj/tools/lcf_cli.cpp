#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_verify.hpp"
#include "lcf/corpus.hpp"
#include "lcf/errors.hpp"
#include "lcf/io.hpp"
#include "lcf/legendre.hpp"
#include "lcf/steiner.hpp"

namespace {

using namespace lcf;

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::HypothesisFailed:
        case ErrorKind::NotUnconditional: return 1;
        case ErrorKind::MassOutOfRange:
        case ErrorKind::AllInfinite:
        case ErrorKind::CenterTooCloseToEdge:
        case ErrorKind::NotConverged: return 3;
        default: return 2;
    }
}

struct TransformParams {
    std::string input, output, op, with;
    std::size_t axis = 0;
    double offset = 0.0;
    std::vector<double> z;
    double lambda = 0.5;
    double y_lo = 0.0, y_hi = 0.0;
    std::size_t y_nodes = 0;
};

// Relaxed checks for transform inputs and outputs: shape and mass only.
constexpr LogConcaveChecks kLoose{1e-9, 1e-6, false, false};

LogConcaveFnGrid as_log_concave(const GridFunction& fn, const std::string& what) {
    if (const auto* f = std::get_if<LogConcaveFnGrid>(&fn)) return *f;
    raise(ErrorKind::InvalidArgument, what + " must be a logconcave file");
}

ConjugatePlan transform_plan(const TransformParams& p, const GridSpec& x, const Point& z) {
    GridSpec y = x;
    if (p.y_lo < p.y_hi) {
        std::vector<AxisSpec> axes(x.dim(), AxisSpec{p.y_lo, p.y_hi, p.y_nodes ? p.y_nodes : x.count(0)});
        y = GridSpec(axes);
    }
    return {x, y, z};
}

double mass_of(const GridFunction& fn) {
    if (const auto* f = std::get_if<LogConcaveFnGrid>(&fn)) return integrate(*f);
    const auto& phi = std::get<ConvexFnGrid>(fn);
    return integrate(LogConcaveFnGrid::from_convex(phi, kLoose));
}

int cmd_transform(const TransformParams& p) {
    const GridFunction in = load_grid_function(p.input, kLoose);
    const GridSpec& spec = std::visit([](const auto& g) -> const GridSpec& { return g.spec(); }, in);
    Point z = p.z.empty() ? Point(spec.dim(), 0.0) : Point(p.z.begin(), p.z.end());
    require(z.size() == spec.dim(), ErrorKind::InvalidArgument, "--z needs one coordinate per axis");
    require(p.axis < spec.dim(), ErrorKind::InvalidArgument, "--axis out of range");

    GridFunction out = in;
    if (p.op == "conjugate") {
        const ConvexFnGrid phi = std::holds_alternative<ConvexFnGrid>(in)
                                     ? std::get<ConvexFnGrid>(in)
                                     : std::get<LogConcaveFnGrid>(in).to_convex();
        out = legendre_nd(phi, z, transform_plan(p, spec, z));
    } else if (p.op == "polar") {
        out = polar(as_log_concave(in, "polar input"), z, transform_plan(p, spec, z), nullptr, kLoose);
    } else if (p.op == "steiner") {
        const Hyperplane h{p.axis, p.offset};
        if (const auto* f = std::get_if<LogConcaveFnGrid>(&in))
            out = steiner_symmetrize(*f, h);
        else
            out = steiner_symmetrize_convex(std::get<ConvexFnGrid>(in), h);
    } else if (p.op == "asplund") {
        require(!p.with.empty(), ErrorKind::InvalidArgument, "asplund needs --with <file>");
        const auto g = as_log_concave(load_grid_function(p.with, kLoose), "--with");
        out = asplund_product(as_log_concave(in, "asplund input"), g);
    } else {
        require(p.lambda > 0.0 && p.lambda <= 1.0, ErrorKind::InvalidArgument, "--lambda must lie in (0,1]");
        out = homothety(p.lambda, as_log_concave(in, "homothety input"));
    }
    save_grid_function(p.output, out);
    std::cout << "transform " << p.op << ": mass before " << format_double(mass_of(in)) << ", after "
              << format_double(mass_of(out)) << " -> " << p.output << '\n';
    return 0;
}

int cmd_corpus(const cli::CorpusParams& c, const std::string& out_dir) {
    const std::size_t nodes = c.nodes ? c.nodes : cli::default_nodes(c.dim);
    const GridSpec grid = GridSpec::cube(c.dim, c.lo, c.hi, nodes);
    const auto entries = generate_corpus(parse_family(c.family), c.count, c.seed, grid);
    std::filesystem::create_directories(out_dir);
    std::ofstream manifest(std::filesystem::path(out_dir) / "manifest.csv");
    manifest << "index,file,family,attempts,expression\n";
    for (const auto& e : entries) {
        char name[32];
        std::snprintf(name, sizeof name, "entry_%04zu.grid", e.index);
        save_grid_function((std::filesystem::path(out_dir) / name).string(), e.function);
        manifest << e.index << ',' << name << ',' << e.family << ',' << e.attempts << ",\""
                 << e.expression.describe() << "\"\n";
    }
    std::cout << "corpus " << c.family << ": wrote " << entries.size() << " files to " << out_dir << '\n';
    return 0;
}

void add_corpus_options(CLI::App* cmd, cli::CorpusParams& c) {
    cmd->add_option("--family", c.family, "gaussian | exponential-box | polyhedral-quadratic | mixed")
        ->check(CLI::IsMember({"gaussian", "exponential-box", "polyhedral-quadratic", "mixed"}))
        ->capture_default_str();
    cmd->add_option("--count", c.count, "Number of corpus functions")->capture_default_str();
    cmd->add_option("--seed", c.seed, "64-bit seed of the mt19937_64 generator")->capture_default_str();
    cmd->add_option("--dim", c.dim, "Dimension 1..3")->check(CLI::Range(1, 3))->capture_default_str();
    cmd->add_option("--lo", c.lo, "Lower grid bound on every axis")->capture_default_str();
    cmd->add_option("--hi", c.hi, "Upper grid bound on every axis")->capture_default_str();
    cmd->add_option("--nodes", c.nodes, "Nodes per axis (default 2049, 257, 33 for dim 1, 2, 3)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Log-concave function calculus: transforms, symmetrization and inequality checks"};
    app.require_subcommand(1);

    TransformParams tp;
    auto* transform = app.add_subcommand("transform", "Apply one operation to a grid-function file");
    transform->add_option("input", tp.input, "Input grid-function file")->required();
    transform->add_option("-o,--output", tp.output, "Output file")->required();
    transform->add_option("--op", tp.op, "conjugate | polar | steiner | asplund | homothety")
        ->required()
        ->check(CLI::IsMember({"conjugate", "polar", "steiner", "asplund", "homothety"}));
    transform->add_option("--axis", tp.axis, "Axis of the symmetrization hyperplane")->capture_default_str();
    transform->add_option("--offset", tp.offset, "Offset of the hyperplane (must be a grid node)")
        ->capture_default_str();
    transform->add_option("--z", tp.z, "Base point, comma separated")->delimiter(',');
    transform->add_option("--lambda", tp.lambda, "Homothety factor in (0,1]")->capture_default_str();
    transform->add_option("--with", tp.with, "Second input for asplund");
    transform->add_option("--y-lo", tp.y_lo, "Dual grid lower bound (default: input grid)");
    transform->add_option("--y-hi", tp.y_hi, "Dual grid upper bound");
    transform->add_option("--y-nodes", tp.y_nodes, "Dual grid nodes per axis");

    cli::VerifyParams vp;
    auto* verify = app.add_subcommand("verify", "Run inequality suites on a seeded corpus");
    verify->add_option("--suite", vp.suite, "theorem1 | theorem2 | lemma21 | lemma45 | lemma46 | prekopa | all")
        ->check(CLI::IsMember({"theorem1", "theorem2", "lemma21", "lemma45", "lemma46", "prekopa", "all"}))
        ->capture_default_str();
    add_corpus_options(verify, vp.corpus);
    verify->add_option("--lambda", vp.lambda, "Split fraction of the first hyperplane")->capture_default_str();
    verify->add_option("--fixture", vp.fixture, "Replace the lemma21 corpus by a fixture")
        ->check(CLI::IsMember({"counterexample"}));
    verify->add_option("--out-dir", vp.out_dir, "Directory for <suite>.csv and <suite>.json")->capture_default_str();
    verify->add_option("--jobs", vp.jobs, "Corpus entries processed in parallel")->capture_default_str();
    verify->add_option("--eps-tot", vp.eps_tot, "Tolerance on products against (2pi)^n")->capture_default_str();
    verify->add_option("--eps-ineq", vp.eps_ineq, "Relative tolerance of inequality checks")->capture_default_str();
    verify->add_option("--y-lo", vp.y_lo, "Dual grid lower bound (default: corpus grid)");
    verify->add_option("--y-hi", vp.y_hi, "Dual grid upper bound");
    verify->add_option("--y-nodes", vp.y_nodes, "Dual grid nodes per axis");

    cli::CorpusParams cp;
    std::string corpus_dir = "corpus";
    auto* corpus = app.add_subcommand("corpus", "Write a seeded corpus of grid-function files");
    add_corpus_options(corpus, cp);
    corpus->add_option("--out-dir", corpus_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*transform) return cmd_transform(tp);
        if (*verify) return cli::run_verify(vp);
        return cmd_corpus(cp, corpus_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
