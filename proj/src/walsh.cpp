#include "walshms/walsh.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace walshms {

namespace {

void check_unit_interval(double x) {
    if (!(x >= 0.0 && x < 1.0))
        throw std::domain_error("walsh: position must lie in [0,1)");
}

void check_index(std::uint32_t k) {
    if (k > kMaxWalshIndex)
        throw std::invalid_argument("walsh: index exceeds 2^20 - 1");
}

// Bits of k reversed within a field of the given width.
std::uint32_t reverse_bits(std::uint32_t k, unsigned width) {
    std::uint32_t r = 0;
    for (unsigned i = 0; i < width; ++i)
        if (k >> i & 1u) r |= 1u << (width - 1 - i);
    return r;
}

}  // namespace

int rademacher(unsigned n, double x) {
    if (n == 0 || n > 62) throw std::domain_error("rademacher: order must be in [1, 62]");
    check_unit_interval(x);
    // sign[sin(2^n pi x)] = (-1)^floor(2^n x); scaling by a power of two is
    // exact in binary floating point, so the right-limit convention at grid
    // zeros falls out of floor() directly.
    const auto cell = static_cast<std::uint64_t>(std::floor(std::ldexp(x, static_cast<int>(n))));
    return (cell & 1u) ? -1 : +1;
}

int walsh_value(std::uint32_t k, double x) {
    check_index(k);
    check_unit_interval(x);
    unsigned parity = 0;
    for (unsigned i = 0; k >> i; ++i) {
        if (k >> i & 1u) {
            const auto cell =
                static_cast<std::uint64_t>(std::floor(std::ldexp(x, static_cast<int>(i) + 1)));
            parity ^= static_cast<unsigned>(cell & 1u);
        }
    }
    return parity ? -1 : +1;
}

int walsh_grid_sign(std::uint32_t k, std::uint64_t grid_index, unsigned log2_grid) {
    check_index(k);
    if (k == 0) return +1;
    const unsigned width = static_cast<unsigned>(std::bit_width(k));
    if (log2_grid < width)
        throw std::invalid_argument("walsh_grid_sign: grid too coarse for index");
    // Sum over set bits i of floor(2^{i+1} j / 2^{log2_grid}); only its parity
    // matters, which is the XOR of the bits of j selected by the reversed index.
    const std::uint64_t mask = static_cast<std::uint64_t>(reverse_bits(k, width))
                               << (log2_grid - width);
    return (std::popcount(grid_index & mask) & 1) ? -1 : +1;
}

int WalshSequence::value_at(double x) const {
    check_unit_interval(x);
    std::size_t flips = 0;
    for (const auto& s : switch_points) {
        if (s.to_double() <= x)
            ++flips;
        else
            break;
    }
    return (flips & 1) ? -initial_sign : initial_sign;
}

WalshSequence build_sequence(std::uint32_t k) {
    check_index(k);
    WalshSequence seq;
    seq.index_k = k;
    if (k == 0) return seq;

    const unsigned grid = static_cast<unsigned>(std::bit_width(k)) + 1;  // spacing 2^-(m+1)
    const std::uint64_t cells = std::uint64_t{1} << grid;
    int sign = +1;  // all Rademacher factors are +1 on the first cell
    for (std::uint64_t j = 1; j < cells; ++j) {
        const int s = walsh_grid_sign(k, j, grid);
        if (s != sign) {
            seq.switch_points.emplace_back(j, grid);
            sign = s;
        }
    }
    return seq;
}

std::pair<std::int64_t, unsigned> walsh_product_integral(std::uint32_t j, std::uint32_t k) {
    const WalshSequence a = build_sequence(j);
    const WalshSequence b = build_sequence(k);

    // Walk the merged switch-point lists, accumulating sign(a)*sign(b) times
    // the exact segment length on the common dyadic denominator.
    unsigned log2_den = 0;
    for (const auto& s : a.switch_points) log2_den = std::max(log2_den, s.log2_denominator);
    for (const auto& s : b.switch_points) log2_den = std::max(log2_den, s.log2_denominator);

    const auto scaled = [log2_den](const DyadicRational& r) {
        return r.numerator << (log2_den - r.log2_denominator);
    };

    std::int64_t total = 0;
    std::uint64_t pos = 0;
    const std::uint64_t end = std::uint64_t{1} << log2_den;
    std::size_t ia = 0, ib = 0;
    int sa = +1, sb = +1;
    while (pos < end) {
        std::uint64_t next = end;
        if (ia < a.switch_points.size()) next = std::min(next, scaled(a.switch_points[ia]));
        if (ib < b.switch_points.size()) next = std::min(next, scaled(b.switch_points[ib]));
        total += static_cast<std::int64_t>(sa * sb) * static_cast<std::int64_t>(next - pos);
        pos = next;
        while (ia < a.switch_points.size() && scaled(a.switch_points[ia]) == pos) { sa = -sa; ++ia; }
        while (ib < b.switch_points.size() && scaled(b.switch_points[ib]) == pos) { sb = -sb; ++ib; }
    }

    // reduce to canonical form
    while (total != 0 && (total % 2) == 0 && log2_den > 0) {
        total /= 2;
        --log2_den;
    }
    if (total == 0) log2_den = 0;
    return {total, log2_den};
}

double verify_identity(unsigned n, unsigned l) {
    if (n < 1 || n > 10) throw std::domain_error("verify_identity: order must be in [1, 10]");
    if (l > 20) throw std::domain_error("verify_identity: polynomial degree too large");

    using cplx = std::complex<double>;
    const double omega = std::ldexp(1.0, static_cast<int>(n) + 1) * M_PI;
    const cplx iw(0.0, omega);

    // Antiderivative of x^l e^{i w x}: e^{i w x} * sum_{r=0..l} c_r x^{l-r},
    // c_0 = 1/(iw), c_r = -c_{r-1} (l-r+1)/(iw).
    std::vector<cplx> coef(l + 1);
    coef[0] = 1.0 / iw;
    for (unsigned r = 1; r <= l; ++r)
        coef[r] = -coef[r - 1] * static_cast<double>(l - r + 1) / iw;

    const auto antiderivative = [&](double x) {
        cplx poly = coef[0];
        for (unsigned r = 1; r <= l; ++r) poly = poly * x + coef[r];
        return std::exp(cplx(0.0, omega * x)) * poly;
    };

    const WalshSequence seq = build_sequence((1u << n) - 1u);
    cplx total = 0.0;
    double a = 0.0;
    for (std::size_t s = 0; s < seq.segment_count(); ++s) {
        const double b =
            s < seq.switch_points.size() ? seq.switch_points[s].to_double() : 1.0;
        total += static_cast<double>(seq.sign_of_segment(s)) *
                 (antiderivative(b) - antiderivative(a));
        a = b;
    }
    return std::abs(total);
}

}  // namespace walshms
