#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "vodsim/bandwidth_model.hpp"

namespace vodsim {

/// Bandwidth in integer kilobits per second. All channel accounting uses this
/// unit so the conservation invariant holds exactly.
using Kbps = std::int64_t;

Kbps mbps_to_kbps(double mbps);
double kbps_to_mbps(Kbps kbps);

enum class DecisionKind { Full, Adjusted, Floor, Queued, Rejected };

const char* to_string(DecisionKind kind);

struct AllocationDecision {
    DecisionKind kind;
    Kbps granted = 0;
};

/// Per-mode bandwidth demands. Demands for active modes lie in
/// [w_min, w_max]; the pause mode holds only the keep-alive reserve.
/// The demand adjustment for mode i is demand(i) - w_min.
class ModeDemandTable {
public:
    ModeDemandTable(std::vector<Kbps> demands_kbps, const BandwidthConfig& cfg,
                    int pause_mode_index);

    /// Demands as fractions of w_max, clamped into [w_min, w_max]; the pause
    /// slot is forced to the reserve. This is how sweep runs re-derive the
    /// table when w_max changes.
    static ModeDemandTable from_fractions(const BandwidthConfig& cfg,
                                          std::span<const double> fractions,
                                          int pause_mode_index);

    /// The five-mode default: fast-forward and rewind at w_max, normal play
    /// at 0.75 w_max, slow play at 0.5 w_max, pause at the reserve.
    static ModeDemandTable default_table(const BandwidthConfig& cfg);

    /// Skips demand validation. Test fixture hook for corrupting tables;
    /// never used on the production path.
    static ModeDemandTable unchecked(std::vector<Kbps> demands_kbps,
                                     const BandwidthConfig& cfg, int pause_mode_index);

    Kbps demand(InteractiveMode mode) const;
    Kbps adjustment(InteractiveMode mode) const;  // t(i) = demand(i) - w_min
    int mode_count() const { return static_cast<int>(demands_.size()); }
    int pause_mode() const { return pause_mode_; }

private:
    ModeDemandTable() = default;

    std::vector<Kbps> demands_;
    Kbps w_min_ = 0;
    int pause_mode_ = 0;  // 0 when no pause mode is configured
};

struct PendingRequest {
    int viewer_id;
    InteractiveMode mode;
    std::int64_t arrival_tick;
};

struct QueueAdmission {
    int viewer_id;
    InteractiveMode mode;
    Kbps granted;
};

/// Single-trunk channel state machine: viewer allocations, the free residue,
/// and the FIFO proxy queue for requests that cannot receive w_min. The
/// conservation invariant (sum of allocations + free == capacity) is checked
/// after every mutation. One viewer holds at most one channel; multiple open
/// windows multiplex onto it.
class ChannelTable {
public:
    explicit ChannelTable(const BandwidthConfig& cfg, std::size_t queue_limit = 10000);

    /// Admission: grants min(demand, free) floored at w_min when the trunk
    /// can supply the mandatory w_min; otherwise buffers the request FIFO,
    /// or rejects it when the queue is full.
    AllocationDecision admit(int viewer_id, InteractiveMode mode,
                             const ModeDemandTable& table, std::int64_t tick = 0);

    struct ReleaseResult {
        Kbps freed;
        std::vector<QueueAdmission> admitted;
    };

    /// Returns the viewer's allocation to the free pool, then drains the
    /// queue head-first while w_min is available.
    ReleaseResult release(int viewer_id, const ModeDemandTable& table,
                          std::int64_t tick = 0);

    struct SwitchResult {
        AllocationDecision decision;
        std::vector<QueueAdmission> admitted;
    };

    /// Re-targets an existing allocation to the new mode's demand. Growth
    /// takes at most the free residue; shrink returns the surplus and drains
    /// the queue.
    SwitchResult switch_mode(int viewer_id, InteractiveMode new_mode,
                             const ModeDemandTable& table, std::int64_t tick = 0);

    /// Admits queue heads while the mandatory w_min is free.
    std::vector<QueueAdmission> drain(const ModeDemandTable& table,
                                      std::int64_t tick = 0);

    Kbps capacity() const { return capacity_; }
    Kbps free_bandwidth() const { return free_; }
    Kbps allocated_total() const { return allocated_sum_; }
    std::size_t active_count() const { return allocations_.size(); }
    std::size_t queue_size() const { return queue_.size(); }
    std::size_t queue_limit() const { return queue_limit_; }
    std::optional<Kbps> allocation_of(int viewer_id) const;
    bool is_queued(int viewer_id) const;

    /// Recomputes the allocation sum from scratch and re-verifies the
    /// conservation and bounds invariants. Throws std::logic_error on any
    /// violation.
    void audit() const;

private:
    Kbps grant_amount(Kbps demand) const;
    void insert_allocation(int viewer_id, Kbps granted);
    void check_conservation() const;

    Kbps capacity_;
    Kbps w_min_;
    Kbps w_max_;
    Kbps reserve_;
    Kbps free_;
    Kbps allocated_sum_ = 0;
    std::size_t queue_limit_;
    std::unordered_map<int, Kbps> allocations_;
    std::unordered_set<int> queued_ids_;
    std::deque<PendingRequest> queue_;
};

/// Offered interactive demand relative to trunk capacity, k * w_max / B.
double unified_demand_parameter(int k, const BandwidthConfig& cfg);

}  // namespace vodsim
