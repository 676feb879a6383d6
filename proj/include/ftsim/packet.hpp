#pragma once

#include <array>
#include <cstdint>

#include "sim_time.hpp"

namespace ftsim {

// 1500-byte frames minus 40 bytes of TCP/IP header.
inline constexpr std::uint32_t kFrameBytes = 1500;
inline constexpr std::uint32_t kHeaderBytes = 40;
inline constexpr std::uint32_t kMss = kFrameBytes - kHeaderBytes;

enum class HostId : std::uint8_t { initiator = 0, target = 1 };

inline constexpr HostId peer_of(HostId h) {
    return h == HostId::initiator ? HostId::target : HostId::initiator;
}

struct SackBlock {
    std::uint64_t start = 0;
    std::uint64_t end = 0;  // exclusive
    friend bool operator==(const SackBlock&, const SackBlock&) = default;
};

// Transport segment. len == 0 is a pure ack. Every segment on an established
// connection carries a valid cumulative ack and the current SACK blocks
// (disjoint, each wholly above ack).
struct Segment {
    std::uint64_t seq = 0;
    std::uint32_t len = 0;
    std::uint64_t ack = 0;
    std::array<SackBlock, 4> sack{};
    std::uint32_t n_sack = 0;
};

struct Packet {
    HostId src = HostId::initiator;
    HostId dst = HostId::target;
    std::uint32_t conn_id = 0;
    std::uint32_t size_bytes = 0;  // on-wire size: payload + kHeaderBytes
    Segment seg{};
    SimTime enqueue_time = 0;
};

inline std::uint32_t wire_size(const Segment& seg) {
    return seg.len + kHeaderBytes;
}

}  // namespace ftsim
