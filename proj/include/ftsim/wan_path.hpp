#pragma once

#include <functional>
#include <utility>

#include "event_queue.hpp"
#include "link.hpp"
#include "packet.hpp"
#include "rng.hpp"

namespace ftsim {

struct PathConfig {
    std::uint64_t bandwidth_bps = 1'000'000'000;
    // Delay added at the router; with delay_is_one_way it is applied once per
    // direction (RTT = 2*delay + serialization), otherwise it is treated as a
    // round-trip figure and halved per direction.
    SimTime router_delay = 0;
    bool delay_is_one_way = true;
    double loss_prob = 0.027;
    std::uint32_t queue_capacity_pkts = 100;
};

// Three-node path: initiator <-> router <-> target, two full-duplex links
// modeled as four unidirectional ones.  Loss and the configured delay live on
// the router egress links (router->target and router->initiator), where the
// emulator box sits; the ingress links are clean.
class WanPath {
  public:
    using Delivery = std::function<void(const Packet&)>;

    WanPath(EventQueue& queue, const PathConfig& cfg, RngStream& fwd_loss,
            RngStream& rev_loss)
        : ingress_fwd_(queue, clean_link_(cfg), nullptr),
          egress_fwd_(queue, emulated_link_(cfg), &fwd_loss),
          ingress_rev_(queue, clean_link_(cfg), nullptr),
          egress_rev_(queue, emulated_link_(cfg), &rev_loss) {
        ingress_fwd_.set_sink(
            [this](const Packet& p) { egress_fwd_.transmit(p); });
        egress_fwd_.set_sink(
            [this](const Packet& p) { deliver_to_target_(p); });
        ingress_rev_.set_sink(
            [this](const Packet& p) { egress_rev_.transmit(p); });
        egress_rev_.set_sink(
            [this](const Packet& p) { deliver_to_initiator_(p); });
    }

    void set_delivery(HostId host, Delivery d) {
        if (host == HostId::target)
            deliver_to_target_ = std::move(d);
        else
            deliver_to_initiator_ = std::move(d);
    }

    void send(const Packet& pkt) {
        if (pkt.src == HostId::initiator)
            ingress_fwd_.transmit(pkt);
        else
            ingress_rev_.transmit(pkt);
    }

    // Idle-path round trip for one data segment of the given payload length
    // and its pure ack.
    SimTime idle_rtt(std::uint32_t payload_len) const {
        return path_rtt(ingress_fwd_.config(), egress_fwd_.config(),
                        ingress_rev_.config(), egress_rev_.config(),
                        payload_len + kHeaderBytes);
    }

    // Packets offered to / dropped by the loss process, pooled over both
    // emulated links.
    std::uint64_t loss_offered() const {
        return egress_fwd_.offered() + egress_rev_.offered();
    }
    std::uint64_t loss_dropped() const {
        return egress_fwd_.dropped_random() + egress_rev_.dropped_random();
    }
    std::uint64_t queue_dropped() const {
        return egress_fwd_.dropped_queue() + egress_rev_.dropped_queue() +
               ingress_fwd_.dropped_queue() + ingress_rev_.dropped_queue();
    }

    Link& egress_forward() { return egress_fwd_; }
    Link& egress_reverse() { return egress_rev_; }

  private:
    static LinkConfig clean_link_(const PathConfig& cfg) {
        return {cfg.bandwidth_bps, 0, cfg.queue_capacity_pkts, 0.0};
    }
    static LinkConfig emulated_link_(const PathConfig& cfg) {
        const SimTime delay =
            cfg.delay_is_one_way ? cfg.router_delay : cfg.router_delay / 2;
        return {cfg.bandwidth_bps, delay, cfg.queue_capacity_pkts,
                cfg.loss_prob};
    }

    Link ingress_fwd_;  // initiator -> router
    Link egress_fwd_;   // router -> target (emulated)
    Link ingress_rev_;  // target -> router
    Link egress_rev_;   // router -> initiator (emulated)
    Delivery deliver_to_target_ = [](const Packet&) {};
    Delivery deliver_to_initiator_ = [](const Packet&) {};
};

}  // namespace ftsim
