#pragma once

// Random waypoint mobility on a rectangular arena.
//
// Each node alternates between a straight move toward a uniformly drawn
// waypoint at a speed drawn uniformly from [v_min, v_max] and a pause of
// pause_s seconds. The current leg of every node is kept in SoA arrays so the
// channel can evaluate all positions at once with the geometry kernels.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "manet/kernels.hpp"
#include "manet/netmodel.hpp"
#include "manet/rng.hpp"

namespace manet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct MobilityParams {
    double width_m = 1000.0;   // arena
    double height_m = 1000.0;
    double v_min = 10.0;
    double v_max = 10.0;
    double pause_s = 2.0;

    bool static_topology() const noexcept { return v_max <= 0.0; }
};

inline constexpr double kForever = std::numeric_limits<double>::infinity();

class RandomWaypoint {
public:
    // Nodes start at `initial` and begin their first move at t = 0.
    RandomWaypoint(const MobilityParams& params, std::span<const Vec2> initial,
                   std::uint64_t seed);

    std::size_t size() const noexcept { return x0_.size(); }

    // Applies every arrival / pause-end of `node` that happens at or before t,
    // drawing new waypoints from the node's own stream. Returns the time of
    // the node's next transition (kForever if it never moves again).
    SimTime advance(NodeId node, SimTime t);

    // Position of `node` at t; t must not precede earlier queries for the node.
    Vec2 position_at(NodeId node, SimTime t);

    SimTime next_transition(NodeId node) const noexcept { return t1_[node]; }
    bool paused(NodeId node) const noexcept { return paused_[node] != 0; }
    Vec2 waypoint(NodeId node) const noexcept { return waypoint_[node]; }
    double speed(NodeId node) const noexcept { return speed_[node]; }

    kernels::LegArrays legs() const noexcept {
        return {x0_, y0_, vx_, vy_, t0_, t1_};
    }

private:
    void start_move(NodeId node, Vec2 from, SimTime t);
    void start_pause(NodeId node, Vec2 at, SimTime t);
    void freeze(NodeId node, Vec2 at, SimTime t);

    MobilityParams params_;
    std::vector<Rng> rngs_;
    std::vector<double> x0_, y0_, vx_, vy_, t0_, t1_;
    std::vector<Vec2> waypoint_;
    std::vector<double> speed_;
    std::vector<std::uint8_t> paused_;
};

// Uniform placement of `count` nodes in the arena.
std::vector<Vec2> random_placement(std::uint32_t count, double width_m, double height_m,
                                   std::uint64_t seed);

}  // namespace manet
