#include "vodsim/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vodsim {

Kbps mbps_to_kbps(double mbps) {
    return static_cast<Kbps>(std::llround(mbps * 1000.0));
}

double kbps_to_mbps(Kbps kbps) {
    return static_cast<double>(kbps) / 1000.0;
}

const char* to_string(DecisionKind kind) {
    switch (kind) {
        case DecisionKind::Full: return "full";
        case DecisionKind::Adjusted: return "adjusted";
        case DecisionKind::Floor: return "floor";
        case DecisionKind::Queued: return "queued";
        case DecisionKind::Rejected: return "rejected";
    }
    return "unknown";
}

ModeDemandTable::ModeDemandTable(std::vector<Kbps> demands_kbps,
                                 const BandwidthConfig& cfg, int pause_mode_index)
    : demands_(std::move(demands_kbps)), w_min_(mbps_to_kbps(cfg.w_min)),
      pause_mode_(pause_mode_index) {
    if (demands_.empty()) {
        throw std::invalid_argument("ModeDemandTable: need at least one mode");
    }
    if (pause_mode_ < 0 || pause_mode_ > mode_count()) {
        throw std::invalid_argument("ModeDemandTable: pause mode index out of range");
    }
    const Kbps w_max = mbps_to_kbps(cfg.w_max);
    const Kbps reserve = mbps_to_kbps(cfg.reserve);
    for (int i = 0; i < mode_count(); ++i) {
        const Kbps d = demands_[static_cast<std::size_t>(i)];
        if (i + 1 == pause_mode_) {
            if (d != reserve) {
                throw std::invalid_argument(
                    "ModeDemandTable: pause demand must equal the reserve");
            }
        } else if (d < w_min_ || d > w_max) {
            throw std::invalid_argument(
                "ModeDemandTable: demand for mode " + std::to_string(i + 1) +
                " outside [w_min, w_max]");
        }
    }
}

ModeDemandTable ModeDemandTable::from_fractions(const BandwidthConfig& cfg,
                                                std::span<const double> fractions,
                                                int pause_mode_index) {
    const Kbps w_min = mbps_to_kbps(cfg.w_min);
    const Kbps w_max = mbps_to_kbps(cfg.w_max);
    std::vector<Kbps> demands;
    demands.reserve(fractions.size());
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (static_cast<int>(i) + 1 == pause_mode_index) {
            demands.push_back(mbps_to_kbps(cfg.reserve));
        } else {
            const Kbps d = mbps_to_kbps(fractions[i] * cfg.w_max);
            demands.push_back(std::clamp(d, w_min, w_max));
        }
    }
    return ModeDemandTable(std::move(demands), cfg, pause_mode_index);
}

ModeDemandTable ModeDemandTable::default_table(const BandwidthConfig& cfg) {
    const double fractions[] = {1.0, 0.75, 0.5, 1.0, 0.0};
    return from_fractions(cfg, fractions, kPause);
}

ModeDemandTable ModeDemandTable::unchecked(std::vector<Kbps> demands_kbps,
                                           const BandwidthConfig& cfg,
                                           int pause_mode_index) {
    ModeDemandTable table;
    table.demands_ = std::move(demands_kbps);
    table.w_min_ = mbps_to_kbps(cfg.w_min);
    table.pause_mode_ = pause_mode_index;
    return table;
}

Kbps ModeDemandTable::demand(InteractiveMode mode) const {
    if (mode.index > mode_count()) {
        throw std::invalid_argument("ModeDemandTable: unknown mode " +
                                    std::to_string(mode.index));
    }
    return demands_[static_cast<std::size_t>(mode.index - 1)];
}

Kbps ModeDemandTable::adjustment(InteractiveMode mode) const {
    return demand(mode) - w_min_;
}

ChannelTable::ChannelTable(const BandwidthConfig& cfg, std::size_t queue_limit)
    : capacity_(mbps_to_kbps(cfg.trunk)), w_min_(mbps_to_kbps(cfg.w_min)),
      w_max_(mbps_to_kbps(cfg.w_max)), reserve_(mbps_to_kbps(cfg.reserve)),
      free_(capacity_), queue_limit_(queue_limit) {}

Kbps ChannelTable::grant_amount(Kbps demand) const {
    // min(demand, free) floored at the mandatory connection minimum. With
    // free >= w_min this never exceeds free.
    return std::max(w_min_, std::min(demand, free_));
}

void ChannelTable::insert_allocation(int viewer_id, Kbps granted) {
    if (granted < reserve_ || granted > w_max_) {
        throw std::logic_error("ChannelTable: allocation outside [reserve, w_max]");
    }
    allocations_.emplace(viewer_id, granted);
    allocated_sum_ += granted;
    free_ -= granted;
    check_conservation();
}

void ChannelTable::check_conservation() const {
    if (allocated_sum_ + free_ != capacity_ || free_ < 0) {
        throw std::logic_error("ChannelTable: conservation violated");
    }
}

AllocationDecision ChannelTable::admit(int viewer_id, InteractiveMode mode,
                                       const ModeDemandTable& table,
                                       std::int64_t tick) {
    if (allocations_.contains(viewer_id) || queued_ids_.contains(viewer_id)) {
        throw std::invalid_argument("ChannelTable: viewer " +
                                    std::to_string(viewer_id) + " already present");
    }
    const Kbps demand = table.demand(mode);
    if (free_ >= w_min_) {
        const Kbps granted = grant_amount(demand);
        insert_allocation(viewer_id, granted);
        const DecisionKind kind = granted == demand ? DecisionKind::Full
                                  : granted == w_min_ ? DecisionKind::Floor
                                                      : DecisionKind::Adjusted;
        return {kind, granted};
    }
    if (queue_.size() < queue_limit_) {
        queue_.push_back(PendingRequest{viewer_id, mode, tick});
        queued_ids_.insert(viewer_id);
        return {DecisionKind::Queued, 0};
    }
    return {DecisionKind::Rejected, 0};
}

ChannelTable::ReleaseResult ChannelTable::release(int viewer_id,
                                                  const ModeDemandTable& table,
                                                  std::int64_t tick) {
    auto it = allocations_.find(viewer_id);
    if (it == allocations_.end()) {
        throw std::invalid_argument("ChannelTable: viewer " +
                                    std::to_string(viewer_id) + " not allocated");
    }
    const Kbps freed = it->second;
    allocations_.erase(it);
    allocated_sum_ -= freed;
    free_ += freed;
    check_conservation();
    return ReleaseResult{freed, drain(table, tick)};
}

ChannelTable::SwitchResult ChannelTable::switch_mode(int viewer_id,
                                                     InteractiveMode new_mode,
                                                     const ModeDemandTable& table,
                                                     std::int64_t tick) {
    auto it = allocations_.find(viewer_id);
    if (it == allocations_.end()) {
        throw std::invalid_argument("ChannelTable: viewer " +
                                    std::to_string(viewer_id) + " not allocated");
    }
    const Kbps demand = table.demand(new_mode);
    const Kbps current = it->second;
    Kbps granted = current;
    std::vector<QueueAdmission> admitted;
    if (demand > current) {
        granted = std::min(demand, current + free_);
        if (granted > w_max_) {
            throw std::logic_error("ChannelTable: allocation outside [reserve, w_max]");
        }
        free_ -= granted - current;
        allocated_sum_ += granted - current;
        it->second = granted;
        check_conservation();
    } else if (demand < current) {
        granted = demand;
        if (granted < reserve_) {
            throw std::logic_error("ChannelTable: allocation outside [reserve, w_max]");
        }
        free_ += current - granted;
        allocated_sum_ -= current - granted;
        it->second = granted;
        check_conservation();
        admitted = drain(table, tick);
    }
    const DecisionKind kind = granted == demand ? DecisionKind::Full
                              : granted == w_min_ ? DecisionKind::Floor
                                                  : DecisionKind::Adjusted;
    return SwitchResult{{kind, granted}, std::move(admitted)};
}

std::vector<QueueAdmission> ChannelTable::drain(const ModeDemandTable& table,
                                                std::int64_t tick) {
    (void)tick;
    std::vector<QueueAdmission> admitted;
    while (!queue_.empty() && free_ >= w_min_) {
        const PendingRequest request = queue_.front();
        queue_.pop_front();
        queued_ids_.erase(request.viewer_id);
        const Kbps granted = grant_amount(table.demand(request.mode));
        insert_allocation(request.viewer_id, granted);
        admitted.push_back(QueueAdmission{request.viewer_id, request.mode, granted});
    }
    return admitted;
}

std::optional<Kbps> ChannelTable::allocation_of(int viewer_id) const {
    auto it = allocations_.find(viewer_id);
    if (it == allocations_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool ChannelTable::is_queued(int viewer_id) const {
    return queued_ids_.contains(viewer_id);
}

void ChannelTable::audit() const {
    Kbps sum = 0;
    for (const auto& [viewer, granted] : allocations_) {
        if (granted < reserve_ || granted > w_max_) {
            throw std::logic_error("ChannelTable: allocation for viewer " +
                                   std::to_string(viewer) +
                                   " outside [reserve, w_max]");
        }
        sum += granted;
    }
    if (sum != allocated_sum_) {
        throw std::logic_error("ChannelTable: allocation sum drifted");
    }
    if (sum + free_ != capacity_ || free_ < 0) {
        throw std::logic_error("ChannelTable: conservation violated");
    }
    if (queued_ids_.size() != queue_.size()) {
        throw std::logic_error("ChannelTable: queue index out of sync");
    }
}

double unified_demand_parameter(int k, const BandwidthConfig& cfg) {
    if (k < 1) {
        throw std::invalid_argument("unified_demand_parameter: k must be >= 1");
    }
    if (cfg.trunk == 0.0) {
        throw std::domain_error("unified_demand_parameter: trunk capacity is zero");
    }
    return static_cast<double>(k) * cfg.w_max / cfg.trunk;
}

}  // namespace vodsim
