#include "manet/flood_control.hpp"

#include <algorithm>
#include <cmath>

namespace manet {

std::string_view to_string(Policy p) noexcept {
    switch (p) {
        case Policy::None: return "none";
        case Policy::Naive: return "naive";
        case Policy::Acrr: return "acrr";
    }
    return "?";
}

std::optional<Policy> parse_policy(std::string_view name) noexcept {
    if (name == "none" || name == "aodv" || name == "aodv-none") return Policy::None;
    if (name == "naive") return Policy::Naive;
    if (name == "acrr") return Policy::Acrr;
    return std::nullopt;
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Accept: return "accept";
        case Verdict::DropOverAvg: return "drop_over_avg";
        case Verdict::DropBlacklisted: return "drop_blacklisted";
        case Verdict::BlacklistTriggered: return "blacklist_triggered";
        case Verdict::DropNaiveOverRal: return "drop_naive_over_ral";
    }
    return "?";
}

std::vector<std::string> validate(const PolicyParams& p) {
    std::vector<std::string> errors;
    if (p.R < 1) errors.emplace_back("R must be >= 1");
    if (!(p.k > 0.0)) errors.emplace_back("k must be > 0");
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) errors.emplace_back("alpha must be in (0, 1]");
    if (!(p.interval_len > 0.0)) errors.emplace_back("interval_len must be > 0");
    if (!(p.bt_base > 0.0)) errors.emplace_back("bt_base must be > 0");
    if (!(p.bt_factor >= 1.0)) errors.emplace_back("bt_factor must be >= 1");
    if (!(p.bt_cap >= p.bt_base)) errors.emplace_back("bt_cap must be >= bt_base");
    if (p.ral > p.rbl) errors.emplace_back("ral must be <= rbl");
    return errors;
}

std::int64_t interval_of(SimTime now, const PolicyParams& params) noexcept {
    return static_cast<std::int64_t>(std::floor(now / params.interval_len));
}

double current_avg(const PolicyParams& params, std::uint32_t active_n) noexcept {
    const auto n = std::max<std::uint32_t>(active_n, 1);
    return params.k * static_cast<double>(params.R) / static_cast<double>(n);
}

double current_peak(const PolicyParams& params) noexcept {
    return params.alpha * static_cast<double>(params.R);
}

double blacklist_timeout(std::uint32_t offense_count, const PolicyParams& params) noexcept {
    const auto exponent = static_cast<double>(std::max<std::uint32_t>(offense_count, 1) - 1);
    return std::min(params.bt_base * std::pow(params.bt_factor, exponent), params.bt_cap);
}

void advance_interval(NeighborLedger& ledger, const PolicyParams& params, SimTime now) {
    const auto target = interval_of(now, params);
    if (target > ledger.interval_index) {
        const auto steps = target - ledger.interval_index;
        std::uint32_t active = 0;
        for (auto& [id, rec] : ledger.records) {
            if (steps == 1) {
                rec.prev_counts = {rec.rreq_count, rec.prev_counts[0]};
            } else if (steps == 2) {
                rec.prev_counts = {0, rec.rreq_count};
            } else {
                rec.prev_counts = {0, 0};
            }
            rec.rreq_count = 0;
            rec.ignoring_until_interval_end = false;
            if (rec.active()) ++active;
        }
        ledger.interval_index = target;
        ledger.interval_start = static_cast<double>(target) * params.interval_len;
        ledger.active_n = active;
    }

    for (auto it = ledger.records.begin(); it != ledger.records.end();) {
        auto& rec = it->second;
        if (rec.blacklisted_until && *rec.blacklisted_until <= now) {
            rec.blacklisted_until.reset();
        }
        // Idle records carry no state worth keeping; offenders are kept so
        // their timeout keeps growing.
        const bool idle = rec.rreq_count == 0 && !rec.active() && !rec.blacklisted_until &&
                          rec.offense_count == 0;
        it = idle ? ledger.records.erase(it) : std::next(it);
    }
}

namespace {

Verdict blacklist(NeighborRecord& rec, const PolicyParams& params, SimTime now) {
    rec.offense_count += 1;
    rec.blacklisted_until = now + blacklist_timeout(rec.offense_count, params);
    return Verdict::BlacklistTriggered;
}

}  // namespace

Verdict acrr_on_rreq(NeighborLedger& ledger, const PolicyParams& params, NodeId neighbor,
                     SimTime now) {
    auto& rec = ledger.records[neighbor];
    if (rec.blacklisted_at(now)) {
        return Verdict::DropBlacklisted;
    }
    rec.rreq_count += 1;
    const double count = rec.rreq_count;
    if (count > current_peak(params)) {
        return blacklist(rec, params, now);
    }
    if (rec.ignoring_until_interval_end || count > current_avg(params, ledger.active_n)) {
        rec.ignoring_until_interval_end = true;
        return Verdict::DropOverAvg;
    }
    return Verdict::Accept;
}

Verdict naive_on_rreq(NeighborLedger& ledger, const PolicyParams& params, NodeId neighbor,
                      SimTime now) {
    auto& rec = ledger.records[neighbor];
    if (rec.blacklisted_at(now)) {
        return Verdict::DropBlacklisted;
    }
    rec.rreq_count += 1;
    if (rec.rreq_count > params.rbl) {
        return blacklist(rec, params, now);
    }
    if (rec.rreq_count > params.ral) {
        return Verdict::DropNaiveOverRal;
    }
    return Verdict::Accept;
}

Verdict admit_rreq(Policy policy, NeighborLedger& ledger, const PolicyParams& params,
                   NodeId neighbor, SimTime now) {
    switch (policy) {
        case Policy::None:
            return Verdict::Accept;
        case Policy::Naive:
            advance_interval(ledger, params, now);
            return naive_on_rreq(ledger, params, neighbor, now);
        case Policy::Acrr:
            advance_interval(ledger, params, now);
            return acrr_on_rreq(ledger, params, neighbor, now);
    }
    return Verdict::Accept;
}

}  // namespace manet
