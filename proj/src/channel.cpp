#include "manet/channel.hpp"

#include <algorithm>

namespace manet {

bool TransmitBucket::admit(SimTime now) {
    if (now > last_) {
        tokens_ = std::min(depth_, tokens_ + (now - last_) * rate_);
        last_ = now;
    }
    if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return true;
    }
    return false;
}

Channel::Channel(const ChannelParams& params, std::size_t node_count)
    : params_(params),
      range_sq_(params.range_m * params.range_m),
      buckets_(node_count,
               TransmitBucket(params.capacity_pps,
                              static_cast<double>(std::max<std::uint32_t>(params.queue_limit, 1)))),
      xs_(node_count),
      ys_(node_count),
      scratch_(node_count) {}

void Channel::refresh(SimTime now, const RandomWaypoint& mobility) {
    if (now == cached_at_) {
        return;
    }
    kernels::active().positions_at(mobility.legs(), now, xs_, ys_);
    cached_at_ = now;
}

std::span<const NodeId> Channel::receivers(NodeId sender, SimTime now,
                                           const RandomWaypoint& mobility) {
    refresh(now, mobility);
    const auto n = kernels::active().select_in_range(xs_, ys_, xs_[sender], ys_[sender],
                                                     range_sq_, scratch_);
    // The sender is always at distance 0; drop it.
    auto end = std::remove(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(n),
                           sender);
    return {scratch_.data(), static_cast<std::size_t>(end - scratch_.begin())};
}

bool Channel::in_range(NodeId a, NodeId b, SimTime now, const RandomWaypoint& mobility) {
    refresh(now, mobility);
    const double dx = xs_[a] - xs_[b];
    const double dy = ys_[a] - ys_[b];
    return dx * dx + dy * dy <= range_sq_;
}

Vec2 Channel::position(NodeId node, SimTime now, const RandomWaypoint& mobility) {
    refresh(now, mobility);
    return {xs_[node], ys_[node]};
}

}  // namespace manet
