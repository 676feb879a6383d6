#pragma once

#include <cassert>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "event_queue.hpp"
#include "sim_time.hpp"
#include "tcp.hpp"

namespace ftsim {

inline constexpr std::uint64_t kPduHeaderBytes = 48;
inline constexpr std::uint64_t kClusterBytes = 131072;
inline constexpr std::uint64_t kDiskBlockBytes = 512;

enum class ScsiDir : std::uint8_t { write, read };

enum class PduKind : std::uint8_t { write_cmd, read_cmd, data_in, status };

// Session-layer message riding the TCP byte stream.  Write commands carry
// their payload immediately after the header; reads return one data-in
// burst followed by a status.
struct PduDesc {
    PduKind kind = PduKind::write_cmd;
    std::uint64_t command_id = 0;
    std::uint64_t payload_len = 0;  // data length named by the PDU
    std::uint64_t lba = 0;          // disk address in 512-byte blocks
};

inline std::uint64_t pdu_wire_len(const PduDesc& d) {
    switch (d.kind) {
        case PduKind::write_cmd:
        case PduKind::data_in:
            return kPduHeaderBytes + d.payload_len;
        case PduKind::read_cmd:
        case PduKind::status:
            return kPduHeaderBytes;
    }
    return kPduHeaderBytes;
}

struct ScsiCommand {
    std::uint64_t command_id = 0;
    ScsiDir dir = ScsiDir::write;
    std::uint64_t lba = 0;
    std::uint64_t length_bytes = 0;
    SimTime issue_time = 0;
    SimTime complete_time = 0;
};

struct TurnaroundRecord {
    std::uint64_t command_id = 0;
    ScsiDir dir = ScsiDir::write;
    SimTime issue_ns = 0;
    SimTime complete_ns = 0;
    std::uint32_t conn_id = 0;
    std::uint64_t lba = 0;
    std::uint64_t length_bytes = 0;
};

// One direction of one connection at the session layer: descriptors declare
// frame boundaries, the TCP stream carries the bytes, and the receiving side
// pops a descriptor once the in-order stream passes its end offset.  The
// sender half also owns backpressure: bytes the transport cannot buffer yet
// wait here and drain on the writable signal.
class PduChannel {
  public:
    using PduFn = std::function<void(const PduDesc&)>;

    void bind_sender(TcpConnection* conn) {
        sender_ = conn;
        conn->set_writable([this] { pump_(); });
    }

    void bind_receiver(TcpConnection* conn, PduFn on_pdu) {
        on_pdu_ = std::move(on_pdu);
        conn->set_deliver([this](std::uint64_t n) { on_bytes_(n); });
    }

    void send(const PduDesc& desc) {
        assert(sender_ != nullptr);
        const std::uint64_t wire = pdu_wire_len(desc);
        offset_ += wire;
        frames_.push_back({desc, offset_});
        unsent_.push_back(wire);
        pump_();
    }

    std::uint64_t bytes_framed() const { return offset_; }
    std::uint64_t bytes_delivered() const { return delivered_; }

  private:
    struct Frame {
        PduDesc desc;
        std::uint64_t end;  // stream offset one past this PDU
    };

    void pump_() {
        while (!unsent_.empty()) {
            const std::uint64_t accepted = sender_->app_send(unsent_.front());
            unsent_.front() -= accepted;
            if (unsent_.front() > 0) break;
            unsent_.pop_front();
        }
    }

    void on_bytes_(std::uint64_t n) {
        delivered_ += n;
        while (!frames_.empty() && frames_.front().end <= delivered_) {
            const Frame frame = frames_.front();
            frames_.pop_front();
            on_pdu_(frame.desc);
        }
    }

    TcpConnection* sender_ = nullptr;
    PduFn on_pdu_;
    std::deque<Frame> frames_;
    std::deque<std::uint64_t> unsent_;
    std::uint64_t offset_ = 0;
    std::uint64_t delivered_ = 0;
};

struct DiskConfig {
    SimTime per_command_overhead = 500 * kMicrosecond;
    std::uint64_t transfer_rate_bps = 400'000'000;
    SimTime seek_penalty = 4 * kMillisecond;
};

// Single FIFO server: overhead plus media transfer, plus a seek penalty when
// the address is not contiguous with the previous command's end.
class DiskModel {
  public:
    explicit DiskModel(const DiskConfig& cfg) : cfg_(cfg) {}

    SimTime service_until(SimTime now, std::uint64_t lba,
                          std::uint64_t length_bytes) {
        assert(length_bytes > 0);
        SimTime duration = cfg_.per_command_overhead +
                           length_bytes * 8 * kSecond / cfg_.transfer_rate_bps;
        if (lba != next_lba_) duration += cfg_.seek_penalty;
        const SimTime start = now > busy_until_ ? now : busy_until_;
        busy_until_ = start + duration;
        next_lba_ = lba + (length_bytes + kDiskBlockBytes - 1) / kDiskBlockBytes;
        return busy_until_;
    }

    SimTime busy_until() const { return busy_until_; }

  private:
    DiskConfig cfg_;
    SimTime busy_until_ = 0;
    std::uint64_t next_lba_ = 0;
};

// Initiator-side command multiplexer: at most max_outstanding commands are
// in flight; admitted commands bind round-robin to a connection and keep it
// for every PDU (command allegiance).  The issue clock starts at binding.
class Session {
  public:
    using CompletionFn = std::function<void(std::uint64_t command_id)>;

    Session(EventQueue& queue, std::uint32_t max_outstanding)
        : queue_(queue), max_outstanding_(max_outstanding) {}

    void attach(std::vector<PduChannel*> to_target,
                std::vector<std::uint32_t> conn_ids) {
        assert(to_target.size() == conn_ids.size());
        if (to_target.empty())
            throw std::invalid_argument("session: needs at least one connection");
        to_target_ = std::move(to_target);
        conn_ids_ = std::move(conn_ids);
    }

    std::uint64_t submit(ScsiDir dir, std::uint64_t lba,
                         std::uint64_t length_bytes, CompletionFn on_complete) {
        if (length_bytes == 0)
            throw std::logic_error("session: zero-length command");
        ScsiCommand cmd;
        cmd.command_id = next_command_id_++;
        cmd.dir = dir;
        cmd.lba = lba;
        cmd.length_bytes = length_bytes;
        if (in_flight_.size() < max_outstanding_) {
            issue_(cmd, std::move(on_complete));
        } else {
            pending_.push_back({cmd, std::move(on_complete)});
        }
        assert(in_flight_.size() <= max_outstanding_);
        return cmd.command_id;
    }

    // Status and data-in arrivals from the target side.
    void on_pdu(std::size_t conn_index, const PduDesc& desc) {
        if (desc.kind == PduKind::data_in) return;  // payload accounted at status
        assert(desc.kind == PduKind::status);
        auto it = in_flight_.find(desc.command_id);
        if (it == in_flight_.end())
            throw std::logic_error("session: completion for unknown command");
        InFlight entry = std::move(it->second);
        assert(entry.conn_index == conn_index);  // command allegiance
        in_flight_.erase(it);
        entry.cmd.complete_time = queue_.now();
        records_.push_back({entry.cmd.command_id, entry.cmd.dir,
                            entry.cmd.issue_time, entry.cmd.complete_time,
                            conn_ids_[conn_index], entry.cmd.lba,
                            entry.cmd.length_bytes});
        if (entry.cmd.dir == ScsiDir::write)
            bytes_written_ += entry.cmd.length_bytes;
        else
            bytes_read_ += entry.cmd.length_bytes;
        if (!pending_.empty()) {
            Pending next = std::move(pending_.front());
            pending_.pop_front();
            issue_(next.cmd, std::move(next.on_complete));
        }
        assert(in_flight_.size() <= max_outstanding_);
        if (entry.on_complete) entry.on_complete(entry.cmd.command_id);
    }

    std::size_t in_flight_count() const { return in_flight_.size(); }
    std::size_t pending_count() const { return pending_.size(); }
    std::uint64_t bytes_written() const { return bytes_written_; }
    std::uint64_t bytes_read() const { return bytes_read_; }
    const std::vector<TurnaroundRecord>& records() const { return records_; }

  private:
    struct InFlight {
        std::size_t conn_index;
        ScsiCommand cmd;
        CompletionFn on_complete;
    };
    struct Pending {
        ScsiCommand cmd;
        CompletionFn on_complete;
    };

    void issue_(ScsiCommand cmd, CompletionFn on_complete) {
        const std::size_t idx = next_conn_index_;
        next_conn_index_ = (next_conn_index_ + 1) % to_target_.size();
        cmd.issue_time = queue_.now();
        PduDesc desc;
        desc.kind =
            cmd.dir == ScsiDir::write ? PduKind::write_cmd : PduKind::read_cmd;
        desc.command_id = cmd.command_id;
        desc.payload_len = cmd.length_bytes;
        desc.lba = cmd.lba;
        in_flight_.emplace(cmd.command_id,
                           InFlight{idx, cmd, std::move(on_complete)});
        to_target_[idx]->send(desc);
    }

    EventQueue& queue_;
    std::uint32_t max_outstanding_;
    std::vector<PduChannel*> to_target_;
    std::vector<std::uint32_t> conn_ids_;
    std::uint64_t next_command_id_ = 1;
    std::size_t next_conn_index_ = 0;
    std::map<std::uint64_t, InFlight> in_flight_;
    std::deque<Pending> pending_;
    std::vector<TurnaroundRecord> records_;
    std::uint64_t bytes_written_ = 0;
    std::uint64_t bytes_read_ = 0;
};

// Target: commands queue on one disk; responses return on the arrival
// connection.  Writes are serviced once their payload is fully streamed in,
// reads once the command header arrives; both respond after disk service
// (data-in plus status for reads, status alone for writes).
class Target {
  public:
    Target(EventQueue& queue, const DiskConfig& disk)
        : queue_(queue), disk_(disk) {}

    void attach(std::vector<PduChannel*> to_initiator) {
        to_initiator_ = std::move(to_initiator);
    }

    void on_pdu(std::size_t conn_index, const PduDesc& desc) {
        assert(desc.kind == PduKind::write_cmd ||
               desc.kind == PduKind::read_cmd);
        const SimTime done =
            disk_.service_until(queue_.now(), desc.lba, desc.payload_len);
        queue_.schedule(done, [this, conn_index, desc] {
            respond_(conn_index, desc);
        });
    }

  private:
    void respond_(std::size_t conn_index, const PduDesc& cmd) {
        if (cmd.kind == PduKind::read_cmd) {
            PduDesc data;
            data.kind = PduKind::data_in;
            data.command_id = cmd.command_id;
            data.payload_len = cmd.payload_len;
            data.lba = cmd.lba;
            to_initiator_[conn_index]->send(data);
        }
        PduDesc status;
        status.kind = PduKind::status;
        status.command_id = cmd.command_id;
        status.lba = cmd.lba;
        to_initiator_[conn_index]->send(status);
    }

    EventQueue& queue_;
    DiskModel disk_;
    std::vector<PduChannel*> to_initiator_;
};

}  // namespace ftsim
