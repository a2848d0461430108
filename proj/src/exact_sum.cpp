#include "lcf/exact_sum.hpp"

#include <cmath>
#include <limits>

#include "lcf/errors.hpp"

namespace lcf {

namespace {
using u128 = unsigned __int128;
constexpr std::int64_t kMask = 0xffffffffLL;
}  // namespace

void ExactSum::add(double x) {
    if (x == 0.0) return;
    require(std::isfinite(x), ErrorKind::InvalidArgument, "ExactSum: non-finite addend");
    int e = 0;
    const double frac = std::frexp(std::fabs(x), &e);
    auto m = static_cast<std::uint64_t>(std::ldexp(frac, 53));
    e -= 53;
    if (e < -1074) {  // subnormal: the dropped low bits are zero
        m >>= (-1074 - e);
        e = -1074;
    }
    const int pos = e + kBias;
    const int q = pos / 32;
    const int r = pos % 32;
    const u128 t = static_cast<u128>(m) << r;
    const std::int64_t s = x < 0 ? -1 : 1;
    limbs_[q] += s * static_cast<std::int64_t>(t & kMask);
    limbs_[q + 1] += s * static_cast<std::int64_t>((t >> 32) & kMask);
    limbs_[q + 2] += s * static_cast<std::int64_t>(t >> 64);
    if (++pending_ >= (1u << 29)) normalize();
}

ExactSum& ExactSum::operator+=(const ExactSum& other) {
    ExactSum o = other;
    o.normalize();
    normalize();
    for (int i = 0; i < kLimbs; ++i) limbs_[i] += o.limbs_[i];
    normalize();
    return *this;
}

ExactSum& ExactSum::operator-=(const ExactSum& other) {
    ExactSum o = other;
    o.normalize();
    normalize();
    for (int i = 0; i < kLimbs; ++i) limbs_[i] -= o.limbs_[i];
    normalize();
    return *this;
}

// After normalization limbs 0..kLimbs-2 lie in [0, 2^32) and the top limb
// carries the (possibly negative) remainder.
void ExactSum::normalize() {
    std::int64_t carry = 0;
    for (int i = 0; i < kLimbs - 1; ++i) {
        const std::int64_t v = limbs_[i] + carry;
        limbs_[i] = v & kMask;
        carry = v >> 32;  // arithmetic shift: floor division
    }
    limbs_[kLimbs - 1] += carry;
    pending_ = 0;
}

int ExactSum::sign() const {
    ExactSum c = *this;
    c.normalize();
    if (c.limbs_[kLimbs - 1] < 0) return -1;
    for (int i = kLimbs - 1; i >= 0; --i)
        if (c.limbs_[i] != 0) return 1;
    return 0;
}

double ExactSum::value() const {
    ExactSum c = *this;
    c.normalize();
    bool negative = false;
    if (c.limbs_[kLimbs - 1] < 0) {
        negative = true;
        for (auto& l : c.limbs_) l = -l;
        c.normalize();
    }
    int top = kLimbs - 1;
    while (top >= 0 && c.limbs_[top] == 0) --top;
    if (top < 0) return 0.0;

    auto limb = [&](int i) -> u128 { return i >= 0 ? static_cast<u128>(c.limbs_[i]) : 0; };
    u128 window = (limb(top) << 64) | (limb(top - 1) << 32) | limb(top - 2);
    bool sticky = false;
    for (int i = top - 3; i >= 0; --i)
        if (c.limbs_[i] != 0) { sticky = true; break; }

    int bits = 0;
    for (u128 w = window; w != 0; w >>= 1) ++bits;
    int low_exp = 32 * (top - 2) - kBias;
    std::uint64_t mant = 0;
    if (bits <= 53) {
        mant = static_cast<std::uint64_t>(window);
    } else {
        const int shift = bits - 53;
        mant = static_cast<std::uint64_t>(window >> shift);
        const u128 rem = window & ((static_cast<u128>(1) << shift) - 1);
        const u128 half = static_cast<u128>(1) << (shift - 1);
        if (rem > half || (rem == half && (sticky || (mant & 1)))) ++mant;
        low_exp += shift;
    }
    const double out = std::ldexp(static_cast<double>(mant), low_exp);
    return negative ? -out : out;
}

}  // namespace lcf
