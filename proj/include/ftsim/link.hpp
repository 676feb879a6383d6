#pragma once

#include <cassert>
#include <cstdint>
#include <deque>
#include <functional>
#include <stdexcept>
#include <utility>

#include "event_queue.hpp"
#include "packet.hpp"
#include "rng.hpp"
#include "sim_time.hpp"

namespace ftsim {

struct LinkConfig {
    std::uint64_t bandwidth_bps = 1'000'000'000;
    SimTime one_way_delay = 0;
    std::uint32_t queue_capacity_pkts = 100;
    double loss_prob = 0.0;
};

enum class DropReason : std::uint8_t { none, random_loss, queue_full };

struct TransmitOutcome {
    bool accepted = false;
    SimTime deliver_at = 0;
    DropReason reason = DropReason::none;
};

// Half-duplex unidirectional link: serialization at bandwidth_bps, fixed
// propagation delay, drop-tail waiting queue, Bernoulli loss applied before
// queueing.  queue_capacity_pkts bounds packets waiting behind the one being
// serialized.  Arrivals are monotone in send order, so a link never reorders.
class Link {
  public:
    Link(EventQueue& queue, const LinkConfig& cfg, RngStream* loss_rng)
        : queue_(queue), cfg_(cfg), loss_rng_(loss_rng) {
        if (cfg_.bandwidth_bps == 0)
            throw std::runtime_error("Link: zero bandwidth");
        if (cfg_.loss_prob < 0.0 || cfg_.loss_prob > 1.0)
            throw std::runtime_error("Link: loss_prob outside [0,1]");
        if (cfg_.loss_prob > 0.0 && loss_rng_ == nullptr)
            throw std::runtime_error("Link: lossy link needs an rng stream");
    }

    void set_sink(std::function<void(const Packet&)> sink) {
        sink_ = std::move(sink);
    }

    SimTime serialization_time(std::uint32_t bytes) const {
        return static_cast<SimTime>(bytes) * 8ull * 1'000'000'000ull /
               cfg_.bandwidth_bps;
    }

    TransmitOutcome transmit(Packet pkt) {
        assert(pkt.size_bytes <= kFrameBytes);
        ++offered_;
        if (cfg_.loss_prob > 0.0 &&
            loss_rng_->next_uniform() < cfg_.loss_prob) {
            ++dropped_random_;
            return {false, 0, DropReason::random_loss};
        }
        const SimTime now = queue_.now();
        while (!start_times_.empty() && start_times_.front() <= now)
            start_times_.pop_front();
        if (start_times_.size() >= cfg_.queue_capacity_pkts) {
            ++dropped_queue_;
            return {false, 0, DropReason::queue_full};
        }
        const SimTime start = std::max(now, busy_until_);
        busy_until_ = start + serialization_time(pkt.size_bytes);
        const SimTime arrival = busy_until_ + cfg_.one_way_delay;
        start_times_.push_back(start);
        pkt.enqueue_time = now;
        queue_.schedule(arrival, [this, p = std::move(pkt)] {
            ++delivered_;
            sink_(p);
        });
        return {true, arrival, DropReason::none};
    }

    const LinkConfig& config() const { return cfg_; }
    std::uint64_t offered() const { return offered_; }
    std::uint64_t delivered() const { return delivered_; }
    std::uint64_t dropped_random() const { return dropped_random_; }
    std::uint64_t dropped_queue() const { return dropped_queue_; }

  private:
    EventQueue& queue_;
    LinkConfig cfg_;
    RngStream* loss_rng_;
    std::function<void(const Packet&)> sink_;
    SimTime busy_until_ = 0;
    std::deque<SimTime> start_times_;  // serialization starts of accepted pkts
    std::uint64_t offered_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t dropped_random_ = 0;
    std::uint64_t dropped_queue_ = 0;
};

// Serialization + propagation over the four hops of the three-node path for
// one data packet of the given wire size forward and a 40-byte ack back.
inline SimTime path_rtt(const LinkConfig& fwd_first, const LinkConfig& fwd_second,
                        const LinkConfig& rev_first, const LinkConfig& rev_second,
                        std::uint32_t data_wire_bytes) {
    auto leg = [](const LinkConfig& c, std::uint32_t bytes) {
        return static_cast<SimTime>(bytes) * 8ull * 1'000'000'000ull /
                   c.bandwidth_bps +
               c.one_way_delay;
    };
    return leg(fwd_first, data_wire_bytes) + leg(fwd_second, data_wire_bytes) +
           leg(rev_first, kHeaderBytes) + leg(rev_second, kHeaderBytes);
}

}  // namespace ftsim
