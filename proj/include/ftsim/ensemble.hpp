#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "congestion.hpp"
#include "rtt_estimator.hpp"
#include "sim_time.hpp"

namespace ftsim {

// How the shared window grows per ack once past the threshold.
//   per_member:         += mss^2 / (cwnd / ref_cnt)  (aggregate behaves like
//                        ref_cnt independent additive-increase flows)
//   aggregate_one_flow: += mss^2 / cwnd              (whole bundle grows like
//                        a single flow; degenerates to Reno at ref_cnt == 1)
enum class GrowthMode { per_member, aggregate_one_flow };

// Ordered (sender-host, receiver-host) pair; each direction of a host pair
// gets its own shared control block.
using HostPairKey = std::pair<int, int>;

struct EcbInit {
    std::uint64_t cwnd = 0;
    std::uint64_t ssthresh = 0;
    std::uint64_t mss = 0;
    GrowthMode mode = GrowthMode::per_member;
    RtoLimits limits{};
    // Estimator state carried over from the creating connection, if any.
    bool estimator_initialized = false;
    SimTime srtt = 0;
    SimTime rttvar = 0;
};

struct WindowShare {
    std::uint64_t cwnd = 0;
    std::uint64_t ssthresh = 0;
    SimTime srtt = 0;
    SimTime rttvar = 0;
};

// Shared congestion state for every connection a sender has toward one peer.
// Connections hold reliability state only; window, threshold, and the RTT
// estimate live here and are dealt out on demand.
class Ecb {
  public:
    Ecb(HostPairKey key, std::uint32_t first_conn, const EcbInit& init)
        : key_(key),
          mss_(init.mss),
          mode_(init.mode),
          cwnd_(init.cwnd),
          ssthresh_(init.ssthresh),
          estimator_(init.limits) {
        if (mss_ == 0) throw std::logic_error("ecb: mss must be positive");
        if (init.estimator_initialized)
            estimator_.set(init.srtt, init.rttvar);
        members_.push_back(first_conn);
        clamp_floors_();
    }

    Ecb(const Ecb&) = delete;
    Ecb& operator=(const Ecb&) = delete;

    // Registry-driven membership.  Joining never changes shared values except
    // to re-establish the per-member floors at the new count.
    void add_member(std::uint32_t conn_id) {
        ++accesses_;
        auto it = std::lower_bound(members_.begin(), members_.end(), conn_id);
        if (it != members_.end() && *it == conn_id)
            throw std::logic_error("ecb: double join");
        members_.insert(it, conn_id);
        clamp_floors_();
    }

    // Returns true when the last member left and the block must be destroyed.
    bool remove_member(std::uint32_t conn_id) {
        ++accesses_;
        auto it = std::lower_bound(members_.begin(), members_.end(), conn_id);
        if (it == members_.end() || *it != conn_id)
            throw std::logic_error("ecb: leave by non-member");
        members_.erase(it);
        if (members_.empty()) return true;
        clamp_floors_();
        return false;
    }

    // Deal the window out in whole-mss granules, extras to the lowest
    // conn_ids; every member keeps at least one segment so it can ack-clock.
    // With a single member the stored values pass through verbatim.
    WindowShare allocate_share(std::uint32_t conn_id) const {
        ++accesses_;
        const std::size_t rank = rank_of_(conn_id);
        const auto ref = static_cast<std::uint64_t>(members_.size());
        if (ref == 1)
            return {cwnd_, ssthresh_, estimator_.srtt(), estimator_.rttvar()};
        const std::uint64_t granules = cwnd_ / mss_;
        std::uint64_t share = (granules / ref + (rank < granules % ref ? 1 : 0)) * mss_;
        share = std::max(share, mss_);
        return {share, ssthresh_ / ref, estimator_.srtt(),
                estimator_.rttvar()};
    }

    void on_member_ack(std::uint32_t conn_id, std::uint64_t newly_acked) {
        ++accesses_;
        if (newly_acked == 0)
            throw std::logic_error("ecb: ack must cover new data");
        rank_of_(conn_id);
        if (cwnd_ < ssthresh_) {
            cwnd_ += std::min(newly_acked, mss_);
            return;
        }
        const auto ref = static_cast<std::uint64_t>(members_.size());
        const std::uint64_t denom =
            mode_ == GrowthMode::per_member ? cwnd_ / ref : cwnd_;
        cwnd_ += mss_ * mss_ / denom;
    }

    // A member's loss is that member's window update: the bundle gives up
    // half the loser's share, not half of everything.  One multiplicative
    // decrease per congestion event: while the block is shared, any
    // reduction arriving within one srtt of the previous applied reduction
    // is treated as the same event, whichever member reports it.  A lone
    // member never coalesces and halves outright, so it stays exactly Reno.
    void on_member_loss(SimTime now, std::uint32_t conn_id,
                        [[maybe_unused]] std::uint64_t member_flight) {
        ++accesses_;
        rank_of_(conn_id);
        if (coalesced_(now)) return;
        const auto ref = static_cast<std::uint64_t>(members_.size());
        ssthresh_ =
            std::max(cwnd_ * (2 * ref - 1) / (2 * ref), 2 * ref * mss_);
        cwnd_ = ssthresh_;
        stamp_reduction_(now);
    }

    // Timer expiry restarts the bundle at one segment per member.  The
    // threshold drop coalesces like a loss; the restart itself always
    // applies.  The timing-out member's own timer backs off locally.
    void on_member_timeout(SimTime now, std::uint32_t conn_id) {
        ++accesses_;
        rank_of_(conn_id);
        const auto ref = static_cast<std::uint64_t>(members_.size());
        if (!coalesced_(now)) {
            ssthresh_ = std::max(cwnd_ / 2, 2 * ref * mss_);
            stamp_reduction_(now);
        }
        cwnd_ = ref * mss_;
        clamp_floors_();
    }

    // Most recent reported estimate wins outright.
    void report_rtt(SimTime srtt, SimTime rttvar) {
        ++accesses_;
        estimator_.set(srtt, rttvar);
    }

    // A member folds a fresh sample into the shared estimate; equivalent to
    // computing srtt/rttvar from the current shared values and reporting.
    void member_rtt_sample(SimTime sample) {
        ++accesses_;
        estimator_.update(sample);
    }

    SimTime rto() const {
        ++accesses_;
        return estimator_.rto();
    }
    SimTime srtt() const {
        ++accesses_;
        return estimator_.srtt();
    }
    SimTime rttvar() const {
        ++accesses_;
        return estimator_.rttvar();
    }

    std::uint64_t cwnd() const {
        ++accesses_;
        return cwnd_;
    }
    std::uint64_t ssthresh() const {
        ++accesses_;
        return ssthresh_;
    }
    std::uint32_t ref_cnt() const {
        ++accesses_;
        return static_cast<std::uint32_t>(members_.size());
    }
    bool is_member(std::uint32_t conn_id) const {
        ++accesses_;
        return std::binary_search(members_.begin(), members_.end(), conn_id);
    }
    GrowthMode growth_mode() const { return mode_; }
    HostPairKey key() const { return key_; }
    std::uint64_t access_count() const { return accesses_; }

  private:
    std::size_t rank_of_(std::uint32_t conn_id) const {
        auto it = std::lower_bound(members_.begin(), members_.end(), conn_id);
        if (it == members_.end() || *it != conn_id)
            throw std::logic_error("ecb: not a member");
        return static_cast<std::size_t>(it - members_.begin());
    }

    bool coalesced_(SimTime now) const {
        return last_reduction_.has_value() && members_.size() > 1 &&
               now - *last_reduction_ <= estimator_.srtt();
    }

    void stamp_reduction_(SimTime now) { last_reduction_ = now; }

    void clamp_floors_() {
        const auto ref = static_cast<std::uint64_t>(members_.size());
        cwnd_ = std::max(cwnd_, ref * mss_);
        ssthresh_ = std::max(ssthresh_, 2 * ref * mss_);
    }

    HostPairKey key_;
    std::uint64_t mss_;
    GrowthMode mode_;
    std::uint64_t cwnd_;
    std::uint64_t ssthresh_;
    RttEstimator estimator_;
    std::vector<std::uint32_t> members_;
    std::optional<SimTime> last_reduction_;
    mutable std::uint64_t accesses_ = 0;
};

// One shared block per (sender, receiver) host pair.  Blocks are created by
// the first join and destroyed by the last leave; no state is cached across
// that boundary, so a rejoin starts from the joining connection's values.
class EnsembleRegistry {
  public:
    Ecb& join(HostPairKey key, std::uint32_t conn_id, const EcbInit& init) {
        auto it = blocks_.find(key);
        if (it == blocks_.end()) {
            it = blocks_.emplace(key, std::make_unique<Ecb>(key, conn_id, init))
                     .first;
        } else {
            it->second->add_member(conn_id);
        }
        return *it->second;
    }

    void leave(HostPairKey key, std::uint32_t conn_id) {
        auto it = blocks_.find(key);
        if (it == blocks_.end())
            throw std::logic_error("ensemble registry: leave without block");
        if (it->second->remove_member(conn_id)) {
            retired_accesses_ += it->second->access_count();
            blocks_.erase(it);
        }
    }

    Ecb* find(HostPairKey key) {
        auto it = blocks_.find(key);
        return it == blocks_.end() ? nullptr : it->second.get();
    }

    std::size_t block_count() const { return blocks_.size(); }

    // Total Ecb touches across live and destroyed blocks; a run in standard
    // mode must finish with zero.
    std::uint64_t total_accesses() const {
        std::uint64_t total = retired_accesses_;
        for (const auto& [key, ecb] : blocks_) total += ecb->access_count();
        return total;
    }

  private:
    std::map<HostPairKey, std::unique_ptr<Ecb>> blocks_;
    std::uint64_t retired_accesses_ = 0;
};

// Adapter placing a member connection's congestion decisions onto the shared
// block.  Recovery exit is a no-op: the shared window was already set at the
// reduction and other members may have moved it since.
class EnsembleMemberController final : public CongestionController {
  public:
    EnsembleMemberController(Ecb& ecb, std::uint32_t conn_id)
        : ecb_(&ecb), conn_id_(conn_id) {}

    std::uint64_t window() const override {
        return ecb_->allocate_share(conn_id_).cwnd;
    }
    std::uint64_t slow_start_threshold() const override {
        return ecb_->allocate_share(conn_id_).ssthresh;
    }
    void on_new_data_ack(std::uint64_t newly_acked) override {
        ecb_->on_member_ack(conn_id_, newly_acked);
    }
    void on_loss_event(SimTime now, std::uint64_t flight) override {
        ecb_->on_member_loss(now, conn_id_, flight);
    }
    void on_timeout_event(SimTime now) override {
        ecb_->on_member_timeout(now, conn_id_);
    }
    void on_recovery_exit() override {}
    void on_rtt_sample(SimTime sample) override {
        ecb_->member_rtt_sample(sample);
    }
    SimTime rto_base() const override { return ecb_->rto(); }
    SimTime smoothed_rtt() const override { return ecb_->srtt(); }

    Ecb& ecb() { return *ecb_; }

  private:
    Ecb* ecb_;
    std::uint32_t conn_id_;
};

}  // namespace ftsim
