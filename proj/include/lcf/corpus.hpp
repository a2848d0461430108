#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lcf/fn_grid.hpp"
#include "lcf/grid.hpp"

namespace lcf {

enum class CorpusFamily { Gaussian, ExponentialBox, PolyhedralQuadratic, Mixed };

CorpusFamily parse_family(std::string_view name);
std::string_view to_string(CorpusFamily family);

/// All corpus randomness: std::mt19937_64 seeded with one 64-bit value;
/// uniform reals use the top 53 bits of each draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }
    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

struct CorpusEntry {
    std::size_t index = 0;
    std::string family;  // concrete family of this entry
    Expression expression;
    LogConcaveFnGrid function;
    int attempts = 1;
};

/// Random closed-form expression of the family in dimension `dim`.
///  gaussian: mean in [-1,1], variance in [0.5,2] per axis.
///  exponential-box: e^{-<r,x>} on a box around a point of [-1,1]^n, rates
///    |r_k| in [0.5,2], faces 1 to 3 away from that point.
///  polyhedral-quadratic: max_j(<a_j,x> + b_j) + ε|x - c|^2 with 2..4 slopes
///    of length [0.5,2] spread around the circle, b_j in [-1,1],
///    ε in [0.05,0.5], c in [-1,1]^n.
///  mixed: one of the above, or (dim >= 2) a product of 1-D members.
Expression random_expression(CorpusFamily family, std::size_t dim, Rng& rng);

/// `count` entries sampled on `grid` that pass all LogConcaveFnGrid checks;
/// a draw failing them is redrawn, up to `max_attempts` per entry.
std::vector<CorpusEntry> generate_corpus(CorpusFamily family, std::size_t count, std::uint64_t seed,
                                         const GridSpec& grid, int max_attempts = 50);

}  // namespace lcf
