#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace lcf {

/// Exact accumulator for IEEE doubles (a fixed-point "superaccumulator").
///
/// The running sum is held without any rounding, so the rounded result is a
/// function of the multiset of addends only: summation order, thread count and
/// permutations of the input cannot change it. `value()` rounds to nearest,
/// ties to even, for results in the normal range.
class ExactSum {
public:
    ExactSum() { limbs_.fill(0); }
    explicit ExactSum(std::span<const double> xs) : ExactSum() {
        for (double x : xs) add(x);
    }

    void add(double x);
    void subtract(double x) { add(-x); }
    ExactSum& operator+=(const ExactSum& other);
    ExactSum& operator-=(const ExactSum& other);

    /// -1, 0 or +1 according to the sign of the exact sum.
    int sign() const;
    double value() const;

private:
    static constexpr int kLimbs = 70;
    static constexpr int kBias = 1088;  // bit 0 of limb 0 has weight 2^-kBias

    void normalize();

    std::array<std::int64_t, kLimbs> limbs_;
    std::uint32_t pending_ = 0;
};

inline double exact_sum(std::span<const double> xs) { return ExactSum(xs).value(); }

}  // namespace lcf
