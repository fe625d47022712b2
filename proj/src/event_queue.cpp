#include "manet/event_queue.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

namespace manet {

namespace {

// std heap is a max-heap; "greater" puts the earliest event on top.
struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

}  // namespace

void EventQueue::schedule(Event ev) {
    if (!(ev.time >= now_)) {
        std::fprintf(stderr, "manetsim: event kind %d scheduled at t=%.9f before now=%.9f\n",
                     static_cast<int>(ev.kind), ev.time, now_);
        std::abort();
    }
    ev.seq = next_seq_++;
    heap_.push_back(std::move(ev));
    std::push_heap(heap_.begin(), heap_.end(), Later{});
}

Event EventQueue::pop() {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    now_ = ev.time;
    return ev;
}

}  // namespace manet
