#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "sim_time.hpp"

namespace ftsim {

// Single-threaded discrete-event loop.
//
// Events fire in (fire_at, insertion sequence) order: ties break FIFO, so a
// run is fully determined by the schedule calls, never by heap internals.
// cancel() is O(1) via a live-id set; cancelled entries are dropped when they
// surface at the top of the heap.
class EventQueue {
  public:
    using Handle = std::uint64_t;  // 0 is never issued
    using Callback = std::function<void()>;

    SimTime now() const { return now_; }

    Handle schedule(SimTime fire_at, Callback fn) {
        if (fire_at < now_)
            throw std::logic_error("EventQueue: schedule into the past");
        const Handle id = ++next_id_;
        heap_.push(Entry{fire_at, id, std::move(fn)});
        live_.insert(id);
        ++scheduled_;
        return id;
    }

    Handle schedule_in(SimTime delay, Callback fn) {
        return schedule(now_ + delay, std::move(fn));
    }

    // True if the event was still pending.
    bool cancel(Handle h) {
        if (live_.erase(h) == 0) return false;
        ++cancelled_;
        return true;
    }

    // Processes every event with fire_at <= end; the clock finishes at end.
    // Events scheduled by handlers inside the window are processed too.
    std::size_t run_until(SimTime end) {
        std::size_t n = 0;
        while (!heap_.empty() && heap_.top().at <= end) {
            Entry e = pop_();
            if (live_.erase(e.id) == 0) continue;  // cancelled
            now_ = e.at;
            ++processed_;
            ++n;
            e.fn();
        }
        now_ = end;
        return n;
    }

    // Drains the queue completely; returns events processed.
    std::size_t run() {
        std::size_t n = 0;
        while (!heap_.empty()) {
            Entry e = pop_();
            if (live_.erase(e.id) == 0) continue;
            now_ = e.at;
            ++processed_;
            ++n;
            e.fn();
        }
        return n;
    }

    std::size_t pending() const { return live_.size(); }
    std::uint64_t scheduled_count() const { return scheduled_; }
    std::uint64_t processed_count() const { return processed_; }
    std::uint64_t cancelled_count() const { return cancelled_; }

    // scheduled == processed + cancelled + pending must hold at any quiescent
    // point; exposed so harnesses can assert no event is ever lost.
    bool conserves_events() const {
        return scheduled_ == processed_ + cancelled_ + live_.size();
    }

  private:
    struct Entry {
        SimTime at;
        std::uint64_t id;  // insertion sequence doubles as the id
        Callback fn;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.id > b.id;
        }
    };

    Entry pop_() {
        Entry e = std::move(const_cast<Entry&>(heap_.top()));
        heap_.pop();
        return e;
    }

    SimTime now_ = 0;
    std::uint64_t next_id_ = 0;
    std::uint64_t scheduled_ = 0;
    std::uint64_t processed_ = 0;
    std::uint64_t cancelled_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::unordered_set<std::uint64_t> live_;
};

}  // namespace ftsim
