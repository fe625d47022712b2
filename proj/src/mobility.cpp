#include "manet/mobility.hpp"

#include <cmath>

namespace manet {

RandomWaypoint::RandomWaypoint(const MobilityParams& params, std::span<const Vec2> initial,
                               std::uint64_t seed)
    : params_(params) {
    const auto n = initial.size();
    rngs_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        rngs_.emplace_back(seed, Stream::Mobility, static_cast<std::uint32_t>(i));
    }
    x0_.resize(n);
    y0_.resize(n);
    vx_.resize(n);
    vy_.resize(n);
    t0_.resize(n);
    t1_.resize(n);
    waypoint_.resize(n);
    speed_.resize(n);
    paused_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<NodeId>(i);
        if (params_.static_topology()) {
            freeze(id, initial[i], 0.0);
        } else {
            start_move(id, initial[i], 0.0);
        }
    }
}

void RandomWaypoint::freeze(NodeId node, Vec2 at, SimTime t) {
    x0_[node] = at.x;
    y0_[node] = at.y;
    vx_[node] = 0.0;
    vy_[node] = 0.0;
    t0_[node] = t;
    t1_[node] = kForever;
    waypoint_[node] = at;
    speed_[node] = 0.0;
    paused_[node] = 0;
}

void RandomWaypoint::start_move(NodeId node, Vec2 from, SimTime t) {
    auto& rng = rngs_[node];
    const Vec2 target{rng.uniform(0.0, params_.width_m), rng.uniform(0.0, params_.height_m)};
    const double speed = rng.uniform(params_.v_min, params_.v_max);
    if (!(speed > 0.0)) {
        freeze(node, from, t);
        return;
    }
    const double dx = target.x - from.x;
    const double dy = target.y - from.y;
    const double dist = std::hypot(dx, dy);
    x0_[node] = from.x;
    y0_[node] = from.y;
    t0_[node] = t;
    if (dist > 0.0) {
        vx_[node] = dx / dist * speed;
        vy_[node] = dy / dist * speed;
        t1_[node] = t + dist / speed;
    } else {
        vx_[node] = 0.0;
        vy_[node] = 0.0;
        t1_[node] = t;
    }
    waypoint_[node] = target;
    speed_[node] = speed;
    paused_[node] = 0;
}

void RandomWaypoint::start_pause(NodeId node, Vec2 at, SimTime t) {
    x0_[node] = at.x;
    y0_[node] = at.y;
    vx_[node] = 0.0;
    vy_[node] = 0.0;
    t0_[node] = t;
    t1_[node] = t + params_.pause_s;
    waypoint_[node] = at;
    paused_[node] = 1;
}

SimTime RandomWaypoint::advance(NodeId node, SimTime t) {
    while (t1_[node] != kForever && t >= t1_[node]) {
        const SimTime at = t1_[node];
        if (paused_[node] != 0) {
            start_move(node, waypoint_[node], at);
        } else {
            start_pause(node, waypoint_[node], at);
        }
    }
    return t1_[node];
}

Vec2 RandomWaypoint::position_at(NodeId node, SimTime t) {
    advance(node, t);
    const double te = std::min(std::max(t, t0_[node]), t1_[node]);
    const double dt = te - t0_[node];
    return {x0_[node] + vx_[node] * dt, y0_[node] + vy_[node] * dt};
}

std::vector<Vec2> random_placement(std::uint32_t count, double width_m, double height_m,
                                   std::uint64_t seed) {
    Rng rng(seed, Stream::Placement);
    std::vector<Vec2> out(count);
    for (auto& p : out) {
        p.x = rng.uniform(0.0, width_m);
        p.y = rng.uniform(0.0, height_m);
    }
    return out;
}

}  // namespace manet
