#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace walshms {

/// Exact rational of the form numerator / 2^log2_denominator, restricted to [0, 1].
/// Always kept in canonical form: the numerator is odd, or zero with a zero exponent.
/// All comparisons are integer comparisons; no floating point is involved until
/// to_double() is called at the gate-model boundary.
struct DyadicRational {
    std::uint64_t numerator = 0;
    unsigned log2_denominator = 0;

    constexpr DyadicRational() = default;

    constexpr DyadicRational(std::uint64_t num, unsigned log2_den)
        : numerator(num), log2_denominator(log2_den) {
        if (log2_den >= 63)
            throw std::invalid_argument("DyadicRational: denominator exponent too large");
        if (num > (std::uint64_t{1} << log2_den))
            throw std::invalid_argument("DyadicRational: value outside [0, 1]");
        canonicalize();
    }

    constexpr void canonicalize() {
        if (numerator == 0) {
            log2_denominator = 0;
            return;
        }
        while ((numerator & 1u) == 0 && log2_denominator > 0) {
            numerator >>= 1;
            --log2_denominator;
        }
    }

    constexpr double to_double() const {
        return static_cast<double>(numerator) /
               static_cast<double>(std::uint64_t{1} << log2_denominator);
    }

    friend constexpr bool operator==(const DyadicRational& a, const DyadicRational& b) {
        return a.numerator == b.numerator && a.log2_denominator == b.log2_denominator;
    }

    friend constexpr std::strong_ordering operator<=>(const DyadicRational& a,
                                                      const DyadicRational& b) {
        // Compare a.num / 2^a.e vs b.num / 2^b.e by shifting to the common denominator.
        const unsigned e = a.log2_denominator > b.log2_denominator ? a.log2_denominator
                                                                   : b.log2_denominator;
        const std::uint64_t lhs = a.numerator << (e - a.log2_denominator);
        const std::uint64_t rhs = b.numerator << (e - b.log2_denominator);
        return lhs <=> rhs;
    }

    std::string str() const {
        return std::to_string(numerator) + "/" +
               std::to_string(std::uint64_t{1} << log2_denominator);
    }
};

}  // namespace walshms
