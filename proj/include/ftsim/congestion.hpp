#pragma once

#include <algorithm>
#include <cstdint>

#include "rtt_estimator.hpp"
#include "sim_time.hpp"

namespace ftsim {

// Seam between the TCP state machine and the window policy.  The connection
// reports events; the controller answers how many bytes may be unacked.
// All byte quantities are absolute window sizes, never deltas.
class CongestionController {
  public:
    virtual ~CongestionController() = default;

    virtual std::uint64_t window() const = 0;
    virtual std::uint64_t slow_start_threshold() const = 0;

    // newly_acked > 0 bytes of new data were cumulatively acked.
    virtual void on_new_data_ack(std::uint64_t newly_acked) = 0;
    // Entry into fast recovery (once per episode); flight_bytes is advisory.
    virtual void on_loss_event(SimTime now, std::uint64_t flight_bytes) = 0;
    // Retransmission timer fired.
    virtual void on_timeout_event(SimTime now) = 0;
    // Recovery point cumulatively acked.
    virtual void on_recovery_exit() = 0;

    virtual void on_rtt_sample(SimTime sample) = 0;
    virtual SimTime rto_base() const = 0;
    virtual SimTime smoothed_rtt() const = 0;
};

// Classic per-connection Reno policy: slow start to the threshold, then
// one-segment-per-window additive increase via the cwnd += mss*mss/cwnd
// approximation; multiplicative decrease halves cwnd with a 2*mss floor.
class RenoController final : public CongestionController {
  public:
    RenoController(std::uint64_t mss, std::uint64_t initial_cwnd,
                   std::uint64_t initial_ssthresh, const RtoLimits& limits)
        : mss_(mss),
          cwnd_(initial_cwnd),
          ssthresh_(initial_ssthresh),
          estimator_(limits) {}

    std::uint64_t window() const override { return cwnd_; }
    std::uint64_t slow_start_threshold() const override { return ssthresh_; }

    void on_new_data_ack(std::uint64_t newly_acked) override {
        if (cwnd_ < ssthresh_) {
            cwnd_ += std::min(newly_acked, mss_);
        } else {
            cwnd_ += mss_ * mss_ / cwnd_;
        }
    }

    void on_loss_event(SimTime, std::uint64_t) override {
        ssthresh_ = std::max(cwnd_ / 2, 2 * mss_);
        cwnd_ = ssthresh_;
    }

    void on_timeout_event(SimTime) override {
        ssthresh_ = std::max(cwnd_ / 2, 2 * mss_);
        cwnd_ = mss_;
    }

    void on_recovery_exit() override { cwnd_ = ssthresh_; }

    void on_rtt_sample(SimTime sample) override { estimator_.update(sample); }
    SimTime rto_base() const override { return estimator_.rto(); }
    SimTime smoothed_rtt() const override { return estimator_.srtt(); }

    const RttEstimator& estimator() const { return estimator_; }

  private:
    std::uint64_t mss_;
    std::uint64_t cwnd_;
    std::uint64_t ssthresh_;
    RttEstimator estimator_;
};

}  // namespace ftsim
