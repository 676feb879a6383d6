#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "congestion.hpp"
#include "event_queue.hpp"
#include "packet.hpp"
#include "rtt_estimator.hpp"
#include "sim_time.hpp"

namespace ftsim {

struct TcpConfig {
    std::uint64_t mss = kMss;
    std::uint64_t rwnd = 512 * 1024;
    std::uint64_t send_buffer_cap = 512 * 1024;
    RtoLimits limits{};
};

struct TcpCounters {
    std::uint64_t segments_sent = 0;  // data segments, retransmissions included
    std::uint64_t bytes_sent = 0;
    std::uint64_t segments_retransmitted = 0;
    std::uint64_t bytes_retransmitted = 0;
    std::uint64_t fast_recovery_entries = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t dupacks = 0;
    std::uint64_t pure_acks_sent = 0;
    std::uint64_t rtt_samples = 0;
    // Advances where every newly acked segment was a retransmission, so no
    // sample could be taken.
    std::uint64_t karn_suppressed = 0;
    std::uint64_t bytes_delivered = 0;
};

struct SendTraceEntry {
    SimTime at = 0;
    std::uint64_t seq = 0;
    std::uint32_t len = 0;
    bool retransmit = false;
    friend bool operator==(const SendTraceEntry&,
                           const SendTraceEntry&) = default;
};

// One endpoint of a duplex byte-stream connection: a sender half feeding the
// wire from an app backlog under a pluggable congestion policy, and a
// receiver half reassembling the peer's stream, acking every data segment
// immediately (no delayed acks, no Nagle).  Sequence numbers are plain byte
// offsets from zero, one space per direction.
class TcpConnection {
  public:
    using SendFn = std::function<void(Packet&&)>;
    using DeliverFn = std::function<void(std::uint64_t bytes)>;
    using WritableFn = std::function<void()>;

    TcpConnection(EventQueue& queue, std::uint32_t conn_id, HostId self,
                  const TcpConfig& config,
                  std::unique_ptr<CongestionController> controller,
                  SendFn send)
        : queue_(queue),
          conn_id_(conn_id),
          self_(self),
          config_(config),
          cc_(std::move(controller)),
          send_(std::move(send)) {
        assert(cc_ != nullptr);
    }

    TcpConnection(const TcpConnection&) = delete;
    TcpConnection& operator=(const TcpConnection&) = delete;

    void set_deliver(DeliverFn fn) { deliver_ = std::move(fn); }
    void set_writable(WritableFn fn) { writable_ = std::move(fn); }

    // Queue up to `bytes` of stream data, bounded by buffer space.  Returns
    // the count accepted; 0 means the caller must wait for the writable
    // signal.
    std::uint64_t app_send(std::uint64_t bytes) {
        const std::uint64_t used = (snd_nxt_ - snd_una_) + backlog_;
        assert(used <= config_.send_buffer_cap);
        const std::uint64_t accepted =
            std::min(bytes, config_.send_buffer_cap - used);
        backlog_ += accepted;
        pump_();
        return accepted;
    }

    void on_packet(const Segment& seg) {
        process_ack_(seg);
        if (seg.len > 0) handle_data_(seg);
        pump_();
    }

    // Unacked bytes not known to sit at the receiver.
    std::uint64_t flight_bytes() const {
        return (snd_nxt_ - snd_una_) - sacked_bytes_;
    }

    // Window still open for new data: the congestion allowance (inflated by
    // three segments during fast recovery) capped by the peer window, minus
    // what is already out.
    std::uint64_t allowed_window() const {
        const std::uint64_t win = std::min(effective_window(), config_.rwnd);
        const std::uint64_t f = flight_bytes();
        return win > f ? win - f : 0;
    }

    std::uint64_t effective_window() const {
        return cc_->window() + (in_recovery_ ? 3 * config_.mss : 0);
    }

    std::uint64_t send_buffer_free() const {
        return config_.send_buffer_cap - (snd_nxt_ - snd_una_) - backlog_;
    }

    std::uint64_t snd_una() const { return snd_una_; }
    std::uint64_t snd_nxt() const { return snd_nxt_; }
    std::uint64_t rcv_nxt() const { return rcv_nxt_; }
    std::uint64_t backlog_bytes() const { return backlog_; }
    bool in_recovery() const { return in_recovery_; }
    std::uint32_t conn_id() const { return conn_id_; }
    HostId self() const { return self_; }
    const TcpCounters& counters() const { return counters_; }
    const CongestionController& controller() const { return *cc_; }
    CongestionController& controller() { return *cc_; }
    SimTime effective_rto() const {
        SimTime r = cc_->rto_base();
        for (std::uint32_t i = 0; i < backoff_; ++i) {
            if (r >= config_.limits.max_rto / 2) return config_.limits.max_rto;
            r *= 2;
        }
        return std::min(r, config_.limits.max_rto);
    }

    // Optional instrumentation sinks.
    std::vector<SendTraceEntry>* send_trace = nullptr;
    std::vector<std::uint64_t>* cwnd_ack_trace = nullptr;

  private:
    struct SegRecord {
        std::uint64_t start;
        std::uint64_t end;
        SimTime sent_at;
        bool retransmitted;
        bool sacked;
        bool retx_this_recovery;
        // snd_nxt when this record was last retransmitted.  Only SACKs for
        // data sent after that instant say anything about the repair; three
        // segments' worth of them means the repair itself was lost.
        std::uint64_t retx_fence = 0;
    };

    void process_ack_(const Segment& seg) {
        if (seg.ack > max_sent_)
            throw std::runtime_error(
                "tcp: ack beyond data ever sent on conn " +
                std::to_string(conn_id_));
        apply_sack_(seg);
        if (seg.ack > snd_una_) {
            // After a timeout rewound snd_nxt, an ack for data still in
            // flight from before the rewind can pass it; the covered bytes
            // sit at the front of the backlog and must not be resent.
            if (seg.ack > snd_nxt_) {
                const std::uint64_t shift = seg.ack - snd_nxt_;
                assert(backlog_ >= shift);
                backlog_ -= shift;
                snd_nxt_ = seg.ack;
            }
            advance_(seg.ack);
        } else if (seg.len == 0 && snd_nxt_ > snd_una_) {
            ++counters_.dupacks;
            if (!in_recovery_ && ++dupack_count_ == 3) enter_recovery_();
        }
    }

    void apply_sack_(const Segment& seg) {
        for (std::uint32_t i = 0; i < seg.n_sack; ++i) {
            const SackBlock& b = seg.sack[i];
            for (auto& rec : records_) {
                if (rec.sacked) continue;
                if (b.start <= rec.start && rec.end <= b.end) {
                    rec.sacked = true;
                    sacked_bytes_ += rec.end - rec.start;
                }
            }
        }
    }

    void advance_(std::uint64_t ack) {
        const std::uint64_t newly = ack - snd_una_;
        snd_una_ = ack;
        bool sample_found = false;
        bool saw_retransmit = false;
        SimTime newest_sent = 0;
        while (!records_.empty() && records_.front().end <= ack) {
            const SegRecord& rec = records_.front();
            if (rec.sacked) sacked_bytes_ -= rec.end - rec.start;
            if (rec.retransmitted) {
                saw_retransmit = true;
            } else if (rec.sent_at >= newest_sent) {
                newest_sent = rec.sent_at;
                sample_found = true;
            }
            records_.pop_front();
        }
        // An ack can land inside a record when a timeout re-chunked the
        // stream; trim the covered prefix and keep the flags.
        if (!records_.empty() && records_.front().start < ack) {
            SegRecord& rec = records_.front();
            if (rec.sacked) sacked_bytes_ -= ack - rec.start;
            rec.start = ack;
        }
        if (sample_found) {
            ++counters_.rtt_samples;
            cc_->on_rtt_sample(queue_.now() - newest_sent);
        } else if (saw_retransmit) {
            ++counters_.karn_suppressed;
        }
        dupack_count_ = 0;
        backoff_ = 0;
        if (in_recovery_) {
            if (ack >= recovery_point_) {
                in_recovery_ = false;
                cc_->on_recovery_exit();
                for (auto& rec : records_) rec.retx_this_recovery = false;
            }
            // Growth stays paused until the recovery point clears.
        } else {
            cc_->on_new_data_ack(newly);
            if (cwnd_ack_trace) cwnd_ack_trace->push_back(cc_->window());
        }
        restart_timer_();
        if (writable_) writable_();
    }

    void enter_recovery_() {
        ++counters_.fast_recovery_entries;
        in_recovery_ = true;
        recovery_point_ = snd_nxt_;
        cc_->on_loss_event(queue_.now(), flight_bytes());
        assert(!records_.empty());
        assert(records_.front().start == snd_una_);
        assert(!records_.front().sacked);
        // The segment the dupacks point at goes out immediately, exempt from
        // the window check.
        retransmit_record_(records_.front());
    }

    void on_timeout_() {
        if (snd_nxt_ == snd_una_) return;  // stale timer
        ++counters_.timeouts;
        cc_->on_timeout_event(queue_.now());
        if (backoff_ < 32) ++backoff_;
        in_recovery_ = false;
        dupack_count_ = 0;
        high_retx_water_ = std::max(high_retx_water_, snd_nxt_);
        backlog_ += snd_nxt_ - snd_una_;
        snd_nxt_ = snd_una_;
        records_.clear();
        sacked_bytes_ = 0;
        pump_();
    }

    // One pass of output work: during recovery retransmit the lowest
    // un-SACKed holes below the recovery point (once each per episode),
    // then new data, all within a single window budget per pass.  A record
    // only counts as a hole once three segments' worth of later data has
    // been SACKed above it; anything younger is presumed still in flight.
    void pump_() {
        std::uint64_t budget = allowed_window();
        if (in_recovery_) {
            const std::size_t n = records_.size();
            std::vector<std::uint64_t> sacked_from(n + 1, 0);
            for (std::size_t i = n; i-- > 0;) {
                const SegRecord& rec = records_[i];
                sacked_from[i] = sacked_from[i + 1] +
                                 (rec.sacked ? rec.end - rec.start : 0);
            }
            const auto sacked_above = [&](std::uint64_t seq) {
                const auto it = std::lower_bound(
                    records_.begin(), records_.end(), seq,
                    [](const SegRecord& r, std::uint64_t s) {
                        return r.start < s;
                    });
                return sacked_from[static_cast<std::size_t>(
                    it - records_.begin())];
            };
            for (std::size_t i = 0; i < n; ++i) {
                SegRecord& rec = records_[i];
                if (rec.start >= recovery_point_) break;
                if (rec.sacked) continue;
                const std::uint64_t evidence = rec.retx_this_recovery
                                                   ? sacked_above(rec.retx_fence)
                                                   : sacked_from[i + 1];
                if (evidence < 3 * config_.mss) continue;
                const std::uint64_t len = rec.end - rec.start;
                if (len > budget) break;
                retransmit_record_(rec);
                budget -= len;
            }
        }
        while (backlog_ > 0) {
            const std::uint64_t u = std::min(config_.mss, backlog_);
            if (u > budget || u > allowed_window()) break;
            send_new_segment_(u);
            budget -= u;
        }
        if (snd_nxt_ > snd_una_) {
            if (!timer_armed_) arm_timer_();
        } else {
            cancel_timer_();
        }
    }

    void send_new_segment_(std::uint64_t len) {
        const bool resend = snd_nxt_ < high_retx_water_;
        records_.push_back({snd_nxt_, snd_nxt_ + len, queue_.now(), resend,
                            false, false});
        if (resend) {
            ++counters_.segments_retransmitted;
            counters_.bytes_retransmitted += len;
        }
        transmit_(snd_nxt_, static_cast<std::uint32_t>(len), resend);
        snd_nxt_ += len;
        max_sent_ = std::max(max_sent_, snd_nxt_);
        backlog_ -= len;
    }

    void retransmit_record_(SegRecord& rec) {
        rec.retransmitted = true;
        rec.retx_this_recovery = true;
        rec.retx_fence = snd_nxt_;
        ++counters_.segments_retransmitted;
        counters_.bytes_retransmitted += rec.end - rec.start;
        transmit_(rec.start, static_cast<std::uint32_t>(rec.end - rec.start),
                  true);
    }

    void transmit_(std::uint64_t seq, std::uint32_t len, bool retransmit) {
        ++counters_.segments_sent;
        counters_.bytes_sent += len;
        Segment seg;
        seg.seq = seq;
        seg.len = len;
        seg.ack = rcv_nxt_;
        fill_sack_(seg);
        if (send_trace)
            send_trace->push_back({queue_.now(), seq, len, retransmit});
        dispatch_(seg);
    }

    void send_pure_ack_() {
        ++counters_.pure_acks_sent;
        Segment seg;
        seg.seq = snd_nxt_;
        seg.len = 0;
        seg.ack = rcv_nxt_;
        fill_sack_(seg);
        dispatch_(seg);
    }

    void dispatch_(const Segment& seg) {
        Packet pkt;
        pkt.src = self_;
        pkt.dst = peer_of(self_);
        pkt.conn_id = conn_id_;
        pkt.size_bytes = wire_size(seg);
        pkt.seg = seg;
        pkt.enqueue_time = queue_.now();
        send_(std::move(pkt));
    }

    // --- receiver half ---

    void handle_data_(const Segment& seg) {
        const std::uint64_t start = seg.seq;
        const std::uint64_t end = seg.seq + seg.len;
        if (end > rcv_nxt_) {
            const std::uint64_t clipped = std::max(start, rcv_nxt_);
            insert_ooo_(clipped, end);
            recent_ooo_seq_ = clipped;
            have_recent_ooo_ = true;
            auto it = ooo_.begin();
            if (it != ooo_.end() && it->first <= rcv_nxt_) {
                const std::uint64_t newly = it->second - rcv_nxt_;
                rcv_nxt_ = it->second;
                ooo_.erase(it);
                counters_.bytes_delivered += newly;
                if (deliver_) deliver_(newly);
            }
            if (recent_ooo_seq_ < rcv_nxt_) have_recent_ooo_ = false;
        }
        send_pure_ack_();
    }

    void insert_ooo_(std::uint64_t start, std::uint64_t end) {
        auto it = ooo_.upper_bound(start);
        if (it != ooo_.begin()) {
            auto prev = std::prev(it);
            if (prev->second >= start) {
                start = prev->first;
                end = std::max(end, prev->second);
                it = ooo_.erase(prev);
            }
        }
        while (it != ooo_.end() && it->first <= end) {
            end = std::max(end, it->second);
            it = ooo_.erase(it);
        }
        ooo_.emplace(start, end);
    }

    // Most recently touched range first, the rest in ascending order.
    void fill_sack_(Segment& seg) const {
        seg.n_sack = 0;
        if (ooo_.empty()) return;
        std::uint64_t first_start = 0;
        bool have_first = false;
        if (have_recent_ooo_) {
            auto it = ooo_.upper_bound(recent_ooo_seq_);
            if (it != ooo_.begin()) {
                --it;
                if (recent_ooo_seq_ < it->second) {
                    seg.sack[seg.n_sack++] = {it->first, it->second};
                    first_start = it->first;
                    have_first = true;
                }
            }
        }
        for (const auto& [start, end] : ooo_) {
            if (seg.n_sack >= seg.sack.size()) break;
            if (have_first && start == first_start) continue;
            seg.sack[seg.n_sack++] = {start, end};
        }
    }

    // --- timer ---

    void arm_timer_() {
        timer_handle_ =
            queue_.schedule(queue_.now() + effective_rto(), [this] {
                timer_armed_ = false;
                on_timeout_();
            });
        timer_armed_ = true;
    }

    void cancel_timer_() {
        if (timer_armed_) {
            queue_.cancel(timer_handle_);
            timer_armed_ = false;
        }
    }

    void restart_timer_() {
        cancel_timer_();
        if (snd_nxt_ > snd_una_) arm_timer_();
    }

    EventQueue& queue_;
    std::uint32_t conn_id_;
    HostId self_;
    TcpConfig config_;
    std::unique_ptr<CongestionController> cc_;
    SendFn send_;
    DeliverFn deliver_;
    WritableFn writable_;

    // Sender.
    std::uint64_t snd_una_ = 0;
    std::uint64_t snd_nxt_ = 0;
    std::uint64_t backlog_ = 0;
    std::uint64_t sacked_bytes_ = 0;
    std::deque<SegRecord> records_;
    std::uint32_t dupack_count_ = 0;
    bool in_recovery_ = false;
    std::uint64_t recovery_point_ = 0;
    std::uint64_t high_retx_water_ = 0;
    std::uint64_t max_sent_ = 0;
    std::uint32_t backoff_ = 0;
    bool timer_armed_ = false;
    EventQueue::Handle timer_handle_ = 0;

    // Receiver.
    std::uint64_t rcv_nxt_ = 0;
    std::map<std::uint64_t, std::uint64_t> ooo_;
    std::uint64_t recent_ooo_seq_ = 0;
    bool have_recent_ooo_ = false;

    TcpCounters counters_;
};

}  // namespace ftsim
