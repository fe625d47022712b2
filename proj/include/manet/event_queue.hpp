#pragma once

// Deterministic discrete-event queue. Events run in (time, seq) order where
// seq is assigned at scheduling time, so equal-time events keep insertion order.

#include <cstdint>
#include <vector>

#include "manet/netmodel.hpp"

namespace manet {

enum class EventKind : std::uint8_t {
    PacketDelivery,
    IntervalTick,
    MobilityUpdate,
    DiscoveryTimeout,
    DataTick,
    AdversaryTick,
    SimulationEnd,
};

struct Event {
    SimTime time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::SimulationEnd;
    NodeId node = kNoNode;   // receiver / owner
    NodeId peer = kNoNode;   // transmitter for deliveries, destination for timeouts
    std::uint64_t aux = 0;   // tick index, flow id, rreq id
    Packet packet{};
};

class EventQueue {
public:
    SimTime now() const noexcept { return now_; }
    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }

    // Scheduling before now() is a programming error and aborts.
    void schedule(Event ev);
    Event pop();

    // Pending events in unspecified order.
    const std::vector<Event>& pending() const noexcept { return heap_; }

private:
    std::vector<Event> heap_;
    std::uint64_t next_seq_ = 0;
    SimTime now_ = 0.0;
};

}  // namespace manet
