#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "walshms/dyadic.hpp"

namespace walshms {

/// Walsh indices are capped here; beyond this the dyadic grid bookkeeping
/// (2^{m+1} segments) stops being useful.
inline constexpr std::uint32_t kMaxWalshIndex = (1u << 20) - 1;

/// Piecewise-constant +-1 schedule on [0,1): the dyadic-ordered Walsh function
/// W(index_k, x). The value just right of x = 0 is +1 and the sign alternates
/// across each switch point (half-open segments, right-limit convention).
struct WalshSequence {
    std::uint32_t index_k = 0;
    std::vector<DyadicRational> switch_points;  // sorted, strictly inside (0,1)
    int initial_sign = +1;

    std::size_t segment_count() const { return switch_points.size() + 1; }

    int sign_of_segment(std::size_t i) const { return (i & 1) ? -initial_sign : initial_sign; }

    /// Sign at a real position in [0,1), consistent with walsh_value.
    int value_at(double x) const;
};

/// Rademacher function R(n,x) = sign[sin(2^n pi x)], with the value at exact
/// dyadic zeros taken from the subinterval beginning at x (right limit).
int rademacher(unsigned n, double x);

/// W(k,x) as the product of R(i+1,x) over the set bits i of k. W(0,.) == +1.
int walsh_value(std::uint32_t k, double x);

/// Exact sign of W(k, .) on the grid segment starting at grid_index / 2^log2_grid.
/// Pure integer arithmetic; log2_grid must be >= bit_width(k).
int walsh_grid_sign(std::uint32_t k, std::uint64_t grid_index, unsigned log2_grid);

/// Switch points of W(k, .) computed exactly on the dyadic grid of spacing
/// 2^-(m+1), m = highest bit of k.
WalshSequence build_sequence(std::uint32_t k);

/// Exact integral of W(j,x) W(k,x) over [0,1], returned as a signed dyadic
/// rational (numerator, log2 denominator). Computed from segment overlaps of
/// the two switch-point lists; no floating point.
std::pair<std::int64_t, unsigned> walsh_product_integral(std::uint32_t j, std::uint32_t k);

/// Residual |integral_0^1 W(2^n-1, x) e^{i 2^{n+1} pi x} x^l dx|, evaluated by
/// per-segment closed-form antiderivatives of x^l e^{i w x} (integration by
/// parts), not by sampling quadrature. Vanishes for l <= n.
double verify_identity(unsigned n, unsigned l);

}  // namespace walshms
