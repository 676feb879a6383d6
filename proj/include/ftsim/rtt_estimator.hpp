#pragma once

#include <algorithm>
#include <cstdint>

#include "sim_time.hpp"

namespace ftsim {

struct RtoLimits {
    SimTime min_rto = 200 * kMillisecond;
    SimTime max_rto = 60 * kSecond;
    SimTime initial_rto = 1 * kSecond;
};

// Smoothed RTT / mean-deviation estimator in integer nanoseconds.
// First sample initializes srtt = s, rttvar = s/2.  Later samples update the
// deviation from the OLD srtt before srtt moves:
//   rttvar <- (3*rttvar + |s - srtt|) / 4
//   srtt   <- (7*srtt + s) / 8
// rto = clamp(srtt + 4*rttvar, min_rto, max_rto), or initial_rto before the
// first sample.
class RttEstimator {
  public:
    explicit RttEstimator(const RtoLimits& limits) : limits_(limits) {}

    void update(SimTime sample) {
        if (!initialized_) {
            srtt_ = sample;
            rttvar_ = sample / 2;
            initialized_ = true;
            return;
        }
        const SimTime dev =
            sample > srtt_ ? sample - srtt_ : srtt_ - sample;
        rttvar_ = (3 * rttvar_ + dev) / 4;
        srtt_ = (7 * srtt_ + sample) / 8;
    }

    // Overwrite with externally computed values (last-writer-wins sharing).
    void set(SimTime srtt, SimTime rttvar) {
        srtt_ = srtt;
        rttvar_ = rttvar;
        initialized_ = true;
    }

    SimTime rto() const {
        if (!initialized_) return limits_.initial_rto;
        return std::clamp(srtt_ + 4 * rttvar_, limits_.min_rto,
                          limits_.max_rto);
    }

    bool initialized() const { return initialized_; }
    SimTime srtt() const { return srtt_; }
    SimTime rttvar() const { return rttvar_; }
    const RtoLimits& limits() const { return limits_; }

  private:
    RtoLimits limits_;
    SimTime srtt_ = 0;
    SimTime rttvar_ = 0;
    bool initialized_ = false;
};

}  // namespace ftsim
