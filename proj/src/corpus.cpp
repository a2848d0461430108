#include "lcf/corpus.hpp"

#include <cmath>
#include <numbers>

#include "lcf/errors.hpp"

namespace lcf {

CorpusFamily parse_family(std::string_view name) {
    if (name == "gaussian") return CorpusFamily::Gaussian;
    if (name == "exponential-box") return CorpusFamily::ExponentialBox;
    if (name == "polyhedral-quadratic") return CorpusFamily::PolyhedralQuadratic;
    if (name == "mixed") return CorpusFamily::Mixed;
    raise(ErrorKind::InvalidArgument, "unknown corpus family '" + std::string(name) + "'");
}

std::string_view to_string(CorpusFamily family) {
    switch (family) {
        case CorpusFamily::Gaussian: return "gaussian";
        case CorpusFamily::ExponentialBox: return "exponential-box";
        case CorpusFamily::PolyhedralQuadratic: return "polyhedral-quadratic";
        case CorpusFamily::Mixed: return "mixed";
    }
    return "unknown";
}

namespace {

Expression random_gaussian(std::size_t dim, Rng& rng) {
    Point mean(dim);
    std::vector<double> var(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        mean[k] = rng.uniform(-1.0, 1.0);
        var[k] = rng.uniform(0.5, 2.0);
    }
    return Expression::gaussian(std::move(mean), std::move(var));
}

Expression random_exponential_box(std::size_t dim, Rng& rng) {
    std::vector<double> rate(dim);
    Point lo(dim), hi(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const double sign = rng.below(2) ? 1.0 : -1.0;
        rate[k] = sign * rng.uniform(0.5, 2.0);
        const double c = rng.uniform(-1.0, 1.0);
        lo[k] = c - rng.uniform(1.0, 3.0);
        hi[k] = c + rng.uniform(1.0, 3.0);
    }
    return Expression::exponential_box(std::move(rate), std::move(lo), std::move(hi));
}

Expression random_polyhedral(std::size_t dim, Rng& rng) {
    const std::size_t pieces = 2 + rng.below(3);
    std::vector<Point> slopes;
    std::vector<double> intercepts;
    // Directions spread evenly (with jitter) so the max of the pieces grows in
    // every direction.
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < pieces; ++j) {
        const double r = rng.uniform(0.5, 2.0);
        Point a(dim);
        if (dim == 1) {
            a[0] = (j % 2 ? -r : r);
        } else {
            const double angle =
                phase + 2.0 * std::numbers::pi * (static_cast<double>(j) + rng.uniform(-0.2, 0.2)) /
                            static_cast<double>(pieces);
            for (std::size_t k = 0; k < dim; ++k) a[k] = 0.0;
            a[0] = r * std::cos(angle);
            a[1] = r * std::sin(angle);
            if (dim == 3) a[2] = rng.uniform(-r, r);
        }
        slopes.push_back(std::move(a));
        intercepts.push_back(rng.uniform(-1.0, 1.0));
    }
    Point center(dim);
    for (auto& c : center) c = rng.uniform(-1.0, 1.0);
    const double eps = rng.uniform(0.05, 0.5);
    return Expression::polyhedral_quadratic(std::move(slopes), std::move(intercepts), eps, std::move(center));
}

}  // namespace

Expression random_expression(CorpusFamily family, std::size_t dim, Rng& rng) {
    switch (family) {
        case CorpusFamily::Gaussian: return random_gaussian(dim, rng);
        case CorpusFamily::ExponentialBox: return random_exponential_box(dim, rng);
        case CorpusFamily::PolyhedralQuadratic: return random_polyhedral(dim, rng);
        case CorpusFamily::Mixed: break;
    }
    const std::uint64_t pick = rng.below(dim >= 2 ? 4 : 3);
    if (pick < 3) return random_expression(static_cast<CorpusFamily>(pick), dim, rng);
    // Product of independent 1-D members, one per axis.
    Expression out;
    for (std::size_t k = 0; k < dim; ++k) {
        const auto fam = static_cast<CorpusFamily>(rng.below(3));
        out = out + random_expression(fam, 1, rng).on_axes({k});
    }
    return out;
}

std::vector<CorpusEntry> generate_corpus(CorpusFamily family, std::size_t count, std::uint64_t seed,
                                         const GridSpec& grid, int max_attempts) {
    Rng rng(seed);
    std::vector<CorpusEntry> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string last_error;
        bool done = false;
        for (int attempt = 1; attempt <= max_attempts && !done; ++attempt) {
            Expression e = random_expression(family, grid.dim(), rng);
            try {
                LogConcaveFnGrid f = sample(e, grid);
                std::string fam = "product";
                if (e.terms().size() == 1) {
                    static constexpr const char* kNames[] = {"gaussian", "exponential-box", "box",
                                                             "polyhedral-quadratic"};
                    fam = kNames[e.terms().front().primitive.index()];
                }
                out.push_back({i, fam, std::move(e), std::move(f), attempt});
                done = true;
            } catch (const Error& err) {
                last_error = err.what();
            }
        }
        require(done, ErrorKind::InvariantViolation,
                "corpus entry " + std::to_string(i) + " failed " + std::to_string(max_attempts) +
                    " attempts; last error: " + last_error);
    }
    return out;
}

}  // namespace lcf
