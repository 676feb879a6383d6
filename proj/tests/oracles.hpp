#pragma once

// Independent closed-form calculators used as test oracles.
//
// Everything here is derived from the documented arithmetic contracts alone
// and deliberately includes no simulator header: when a test compares the
// simulator against these functions it is comparing two separately written
// derivations, not the implementation against itself.

#include <cstdint>
#include <vector>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

// Reno window trajectory for a lossless, in-order bulk transfer.
//
// On a lossless path with immediate acks and an MSS-aligned sender, the wire
// carries one segment per MSS of payload (final tail may be short) and the
// receiver acks each segment exactly once, in order.  The window after the
// k-th ack is therefore a pure function of (total_bytes, mss, initial window,
// ssthresh): slow start adds min(acked, mss) per ack below ssthresh,
// congestion avoidance adds mss*mss/cwnd (integer division) at or above it.
inline std::vector<std::uint64_t> reno_trajectory(std::uint64_t total_bytes,
                                                  std::uint64_t mss,
                                                  std::uint64_t initial_cwnd,
                                                  std::uint64_t ssthresh) {
    std::vector<std::uint64_t> after_each_ack;
    std::uint64_t cwnd = initial_cwnd;
    std::uint64_t remaining = total_bytes;
    while (remaining > 0) {
        const std::uint64_t acked = std::min(mss, remaining);
        remaining -= acked;
        if (cwnd < ssthresh)
            cwnd += std::min(acked, mss);
        else
            cwnd += mss * mss / cwnd;
        after_each_ack.push_back(cwnd);
    }
    return after_each_ack;
}

// Jacobson/Karels estimator, integer nanoseconds.
// First sample: srtt = s, rttvar = s/2.  Later samples update rttvar from the
// OLD srtt before srtt moves: rttvar <- (3*rttvar + |s - srtt|)/4,
// srtt <- (7*srtt + s)/8.
struct Ewma {
    std::uint64_t srtt = 0;
    std::uint64_t rttvar = 0;
    bool initialized = false;
};

inline Ewma ewma_step(Ewma e, std::uint64_t sample) {
    if (!e.initialized) return {sample, sample / 2, true};
    const std::uint64_t dev =
        sample > e.srtt ? sample - e.srtt : e.srtt - sample;
    e.rttvar = (3 * e.rttvar + dev) / 4;
    e.srtt = (7 * e.srtt + sample) / 8;
    return e;
}

inline std::uint64_t rto_of(const Ewma& e, std::uint64_t min_rto,
                            std::uint64_t max_rto, std::uint64_t initial_rto) {
    if (!e.initialized) return initial_rto;
    return std::clamp(e.srtt + 4 * e.rttvar, min_rto, max_rto);
}

// Wire-time arithmetic.  1500 B at 1 Gbit/s = 12000 ns exactly.
inline std::uint64_t serialization_ns(std::uint64_t bytes, std::uint64_t bps) {
    return bytes * 8ull * 1'000'000'000ull / bps;
}

// Ensemble share division, derived by literally dealing whole-MSS granules
// one at a time to members in ascending rank order; each share floors at one
// MSS.  (The implementation computes this with quotient/remainder instead.)
inline std::vector<std::uint64_t> deal_shares(std::uint64_t ecb_cwnd,
                                              unsigned ref_cnt,
                                              std::uint64_t mss) {
    if (ref_cnt == 0) throw std::invalid_argument("deal_shares: ref_cnt 0");
    std::vector<std::uint64_t> granules(ref_cnt, 0);
    const std::uint64_t total = ecb_cwnd / mss;
    for (std::uint64_t g = 0; g < total; ++g) granules[g % ref_cnt] += 1;
    std::vector<std::uint64_t> shares(ref_cnt);
    for (unsigned r = 0; r < ref_cnt; ++r)
        shares[r] = std::max<std::uint64_t>(mss, granules[r] * mss);
    return shares;
}

// Congestion-avoidance growth of the shared window, by direct summation of
// the per-ack increments.  per_member divides the aggregate by ref_cnt before
// forming mss^2/denominator; aggregate-as-one-flow does not.
inline std::uint64_t ensemble_ca_growth(std::uint64_t cwnd0, unsigned ref_cnt,
                                        bool per_member, std::uint64_t mss,
                                        unsigned n_acks) {
    std::uint64_t cwnd = cwnd0;
    for (unsigned k = 0; k < n_acks; ++k) {
        const std::uint64_t denom = per_member ? cwnd / ref_cnt : cwnd;
        cwnd += mss * mss / denom;
    }
    return cwnd;
}

// Population statistics (the tables' convention: SD over n, not n-1).
struct Stats {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

inline Stats pop_stats(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("pop_stats: empty");
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size())), v.size()};
}

// Pearson chi-square statistic for independence of two uniform streams,
// binned on a cells x cells grid.  With cells=10 the statistic has 99
// degrees of freedom; the 99.9th percentile is ~148.2.
inline double chi_square_grid(const std::vector<double>& xs,
                              const std::vector<double>& ys, unsigned cells) {
    if (xs.size() != ys.size() || xs.empty())
        throw std::invalid_argument("chi_square_grid: bad input");
    std::vector<std::uint64_t> counts(cells * cells, 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto bx = static_cast<unsigned>(xs[i] * cells);
        auto by = static_cast<unsigned>(ys[i] * cells);
        if (bx >= cells) bx = cells - 1;
        if (by >= cells) by = cells - 1;
        counts[bx * cells + by] += 1;
    }
    const double expected =
        static_cast<double>(xs.size()) / static_cast<double>(cells * cells);
    double chi2 = 0.0;
    for (std::uint64_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    return chi2;
}

}  // namespace oracle
