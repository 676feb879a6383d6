#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "congestion.hpp"
#include "ensemble.hpp"
#include "event_queue.hpp"
#include "iscsi.hpp"
#include "rng.hpp"
#include "tcp.hpp"
#include "wan_path.hpp"

namespace ftsim {

enum class CcMode : std::uint8_t { standard, fair };

struct FabricConfig {
    std::uint32_t n_conns = 4;
    CcMode cc_mode = CcMode::standard;
    GrowthMode growth = GrowthMode::per_member;
    PathConfig path;
    TcpConfig tcp;
    std::uint64_t initial_cwnd = 2 * kMss;
    DiskConfig disk;
    std::uint32_t max_outstanding = 32;
    std::uint64_t seed = 1;
};

// Full stack for one initiator/target pair: n TCP connections over a shared
// WAN path, a command session striping over them, and a disk-backed target.
// Fair mode pools each direction's congestion state in one shared block per
// host pair; standard mode gives every connection its own controller.
class Fabric {
  public:
    explicit Fabric(const FabricConfig& cfg)
        : cfg_(cfg),
          fwd_rng_(cfg.seed, kStreamLossForward),
          rev_rng_(cfg.seed, kStreamLossReverse),
          path_(queue_, cfg.path, fwd_rng_, rev_rng_),
          session_(queue_, cfg.max_outstanding),
          target_(queue_, cfg.disk) {
        if (cfg.n_conns == 0)
            throw std::invalid_argument("fabric: n_conns must be positive");
        for (std::uint32_t i = 0; i < cfg.n_conns; ++i) {
            init_eps_.push_back(make_endpoint_(i, HostId::initiator));
            tgt_eps_.push_back(make_endpoint_(i, HostId::target));
            to_target_.push_back(std::make_unique<PduChannel>());
            to_initiator_.push_back(std::make_unique<PduChannel>());
        }
        path_.set_delivery(HostId::target, [this](const Packet& p) {
            tgt_eps_[p.conn_id]->on_packet(p.seg);
        });
        path_.set_delivery(HostId::initiator, [this](const Packet& p) {
            init_eps_[p.conn_id]->on_packet(p.seg);
        });
        std::vector<PduChannel*> down, up;
        std::vector<std::uint32_t> ids;
        for (std::uint32_t i = 0; i < cfg.n_conns; ++i) {
            to_target_[i]->bind_sender(init_eps_[i].get());
            to_target_[i]->bind_receiver(
                tgt_eps_[i].get(),
                [this, i](const PduDesc& d) { target_.on_pdu(i, d); });
            to_initiator_[i]->bind_sender(tgt_eps_[i].get());
            to_initiator_[i]->bind_receiver(
                init_eps_[i].get(),
                [this, i](const PduDesc& d) { session_.on_pdu(i, d); });
            down.push_back(to_target_[i].get());
            up.push_back(to_initiator_[i].get());
            ids.push_back(i);
        }
        session_.attach(std::move(down), std::move(ids));
        target_.attach(std::move(up));
    }

    EventQueue& queue() { return queue_; }
    WanPath& path() { return path_; }
    Session& session() { return session_; }
    EnsembleRegistry& registry() { return registry_; }
    const FabricConfig& config() const { return cfg_; }

    TcpConnection& initiator_conn(std::size_t i) { return *init_eps_[i]; }
    TcpConnection& target_conn(std::size_t i) { return *tgt_eps_[i]; }
    PduChannel& channel_to_target(std::size_t i) { return *to_target_[i]; }
    PduChannel& channel_to_initiator(std::size_t i) { return *to_initiator_[i]; }
    std::size_t conn_count() const { return init_eps_.size(); }

    // Window attributable to connection i on the initiator-to-target
    // direction: its own controller in standard mode, its dealt share of the
    // pooled block in fair mode.
    std::uint64_t window_of(std::uint32_t i) {
        if (cfg_.cc_mode == CcMode::fair) {
            const Ecb* ecb = registry_.find(forward_key());
            return ecb->allocate_share(i).cwnd;
        }
        return init_eps_[i]->controller().window();
    }

    static HostPairKey forward_key() { return {0, 1}; }
    static HostPairKey reverse_key() { return {1, 0}; }

  private:
    std::unique_ptr<TcpConnection> make_endpoint_(std::uint32_t conn_id,
                                                  HostId self) {
        std::unique_ptr<CongestionController> cc;
        if (cfg_.cc_mode == CcMode::fair) {
            EcbInit init;
            init.cwnd = cfg_.initial_cwnd;
            init.ssthresh = cfg_.tcp.rwnd;
            init.mss = cfg_.tcp.mss;
            init.mode = cfg_.growth;
            init.limits = cfg_.tcp.limits;
            const HostPairKey key =
                self == HostId::initiator ? forward_key() : reverse_key();
            Ecb& ecb = registry_.join(key, conn_id, init);
            cc = std::make_unique<EnsembleMemberController>(ecb, conn_id);
        } else {
            cc = std::make_unique<RenoController>(cfg_.tcp.mss,
                                                  cfg_.initial_cwnd,
                                                  cfg_.tcp.rwnd,
                                                  cfg_.tcp.limits);
        }
        return std::make_unique<TcpConnection>(
            queue_, conn_id, self, cfg_.tcp, std::move(cc),
            [this](Packet&& p) { path_.send(p); });
    }

    FabricConfig cfg_;
    EventQueue queue_;
    RngStream fwd_rng_;
    RngStream rev_rng_;
    WanPath path_;
    EnsembleRegistry registry_;
    std::vector<std::unique_ptr<TcpConnection>> init_eps_;
    std::vector<std::unique_ptr<TcpConnection>> tgt_eps_;
    std::vector<std::unique_ptr<PduChannel>> to_target_;
    std::vector<std::unique_ptr<PduChannel>> to_initiator_;
    Session session_;
    Target target_;
};

}  // namespace ftsim
