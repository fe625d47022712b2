#pragma once

// Per-node RREQ admission policies.
//
// Every node keeps a NeighborLedger that tracks, per one-hop neighbor, how
// many route requests that neighbor delivered in the current and the two
// previous intervals. The policy turns each arriving RREQ into a Verdict
// before any routing logic sees it:
//
//   none   plain AODV, every request is accepted
//   naive  fixed per-neighbor accept limit (ral) and blacklist limit (rbl)
//   acrr   the node's rate limit R is split over its active neighbors
//          (avg = k*R/N); a neighbor that exceeds avg is ignored for the rest
//          of the interval, one that exceeds the burst ceiling peak = alpha*R
//          is blacklisted with an exponentially growing timeout.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "manet/netmodel.hpp"

namespace manet {

enum class Policy : std::uint8_t { None, Naive, Acrr };

std::string_view to_string(Policy p) noexcept;
std::optional<Policy> parse_policy(std::string_view name) noexcept;

struct PolicyParams {
    std::uint32_t R = 10;        // RREQ_RATELIMIT per interval
    double k = 1.0;              // overlap factor on the per-neighbor share
    double alpha = 0.8;          // burst ceiling as a fraction of R
    double interval_len = 1.0;   // seconds
    double bt_base = 5.0;        // first blacklist timeout, seconds
    double bt_factor = 2.0;      // growth per repeat offense
    double bt_cap = 80.0;        // longest blacklist timeout, seconds
    std::uint32_t ral = 3;       // naive accept limit per interval
    std::uint32_t rbl = 10;      // naive blacklist limit per interval
};

// Empty when the parameters are usable; otherwise one message per problem.
std::vector<std::string> validate(const PolicyParams& params);

enum class Verdict : std::uint8_t {
    Accept,
    DropOverAvg,
    DropBlacklisted,
    BlacklistTriggered,
    DropNaiveOverRal,
};

std::string_view to_string(Verdict v) noexcept;

constexpr bool admits(Verdict v) noexcept { return v == Verdict::Accept; }

struct NeighborRecord {
    std::uint32_t rreq_count = 0;
    std::array<std::uint32_t, 2> prev_counts{};  // [0] = last interval, [1] = the one before
    bool ignoring_until_interval_end = false;
    std::optional<SimTime> blacklisted_until;
    std::uint32_t offense_count = 0;

    bool active() const noexcept { return prev_counts[0] != 0 || prev_counts[1] != 0; }
    bool blacklisted_at(SimTime now) const noexcept {
        return blacklisted_until && now < *blacklisted_until;
    }
};

struct NeighborLedger {
    std::map<NodeId, NeighborRecord> records;
    std::int64_t interval_index = 0;
    SimTime interval_start = 0.0;
    // Active neighbor count, frozen when the interval starts.
    std::uint32_t active_n = 0;

    const NeighborRecord* find(NodeId neighbor) const {
        auto it = records.find(neighbor);
        return it == records.end() ? nullptr : &it->second;
    }
};

std::int64_t interval_of(SimTime now, const PolicyParams& params) noexcept;

double current_avg(const PolicyParams& params, std::uint32_t active_n) noexcept;
double current_peak(const PolicyParams& params) noexcept;
double blacklist_timeout(std::uint32_t offense_count, const PolicyParams& params) noexcept;

// Rolls the ledger forward over every interval boundary up to `now` and
// drops blacklists that have run out.
void advance_interval(NeighborLedger& ledger, const PolicyParams& params, SimTime now);

// Both expect advance_interval(ledger, params, now) to have been applied.
Verdict acrr_on_rreq(NeighborLedger& ledger, const PolicyParams& params, NodeId neighbor,
                     SimTime now);
Verdict naive_on_rreq(NeighborLedger& ledger, const PolicyParams& params, NodeId neighbor,
                      SimTime now);

// Advances the ledger and applies `policy`. This is what the routing engine calls.
Verdict admit_rreq(Policy policy, NeighborLedger& ledger, const PolicyParams& params,
                   NodeId neighbor, SimTime now);

}  // namespace manet
