#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "telehaptic/types.hpp"

namespace telehaptic {

// At equal timestamps: packet arrivals run first, then link departures, then
// generation ticks; ties within a class run in scheduling order.
enum class EventClass : uint8_t { Arrival = 0, Departure = 1, Tick = 2 };

class EventQueue {
 public:
  using Action = std::function<void()>;

  void schedule(TimeNs at, EventClass cls, Action action) {
    heap_.push(Entry{at, cls, next_seq_++, std::move(action)});
  }

  TimeNs now() const { return now_; }
  bool empty() const { return heap_.empty(); }

  void run() {
    while (!heap_.empty()) {
      // Entries are popped by const reference from the heap; move the action
      // out before executing so it may schedule further events.
      Entry e = std::move(const_cast<Entry&>(heap_.top()));
      heap_.pop();
      now_ = e.at;
      e.action();
    }
  }

 private:
  struct Entry {
    TimeNs at;
    EventClass cls;
    uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      if (a.cls != b.cls) return a.cls > b.cls;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  uint64_t next_seq_ = 0;
  TimeNs now_ = 0;
};

}  // namespace telehaptic
