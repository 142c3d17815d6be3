#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "gp/schedule.hpp"
#include "gp/spatial_index.hpp"

namespace geoprune {

/// Snapshot of one schedule segment (p^{k-1}, p^k) kept alongside its
/// detour-ellipse entry in T_seg. arr/slk values are those of the last
/// recorder rebuild; they only go stale conservatively as the vehicle
/// drives its planned route.
struct SegmentRecord {
    VehicleId vehicle = 0;
    std::int32_t segment = 0;  // k, 1-based
    NetworkPosition from;      // p^{k-1}
    NetworkPosition to;        // p^k
    double arr_prev = 0.0;     // arr[k-1]
    double arr = 0.0;          // arr[k]
    double slk = 0.0;          // slk[k]
    double ddl = 0.0;          // ddl[k]
    int occupancy = 0;         // passengers on the segment
    int capacity = 0;
    DetourEllipse ellipse{{0, 0}, {0, 0}, 0.0};
};

struct EndRecord {
    VehicleId vehicle = 0;
    NetworkPosition location;  // p^m
    double arr = 0.0;          // arr[m]
    int capacity = 0;
};

struct PruneConfig {
    double transforming_speed = 0.0;  // meters/second, >= vehicle speed
    /// When false, refinement bounds the existing stop by ddl[k] instead of
    /// the tighter arr[k] + slk[k].
    bool tight_refinement = true;
};

struct CandidateSet {
    struct Flags {
        bool insert_insert = false;
        bool insert_append = false;
        bool append_append = false;
    };
    std::vector<VehicleId> vehicles;  // F, sorted ascending
    std::unordered_map<VehicleId, Flags> cases;
};

/// The three spatial indexes of the pruning engine plus segment snapshots.
class PruneState {
public:
    explicit PruneState(PruneConfig config) : config_(config) {}

    const PruneConfig& config() const { return config_; }
    SpatialIndex& seg_index() { return t_seg_; }
    SpatialIndex& end_index() { return t_end_; }
    SpatialIndex& empty_index() { return t_ev_; }
    const SpatialIndex& seg_index() const { return t_seg_; }
    const SpatialIndex& end_index() const { return t_end_; }
    const SpatialIndex& empty_index() const { return t_ev_; }

    /// Registers a vehicle that has no schedule yet.
    void register_empty(const Vehicle& vehicle, const RoadNetwork& net);

    /// Algorithm "prune non-empty": Q1..Q4 with exact geometric
    /// confirmation and time/capacity refinement, combined per the three
    /// add-cases. Never drops a feasible vehicle when the transforming
    /// speed is at least the vehicle speed.
    CandidateSet prune(const TripRequest& request, const RoadNetwork& net,
                       const TravelTimeProvider& travel) const;

    /// Empty vehicles whose location lies in the waiting circle.
    std::vector<VehicleId> prune_empty(const TripRequest& request,
                                       const RoadNetwork& net) const;

    /// Algorithm "update index - match": called after the vehicle's
    /// schedule has been extended and its recorder rebuilt (which must be
    /// valid). Returns the number of index entries inserted or removed.
    std::size_t match_update(const Vehicle& vehicle, const RoadNetwork& net);

    /// Algorithm "update index - move": drops ellipses of the
    /// `stops_reached` leading stops; when the schedule is finished the
    /// vehicle migrates from T_end to T_ev.
    void move_update(const Vehicle& vehicle, std::size_t stops_reached,
                     bool schedule_finished, const RoadNetwork& net);

    const SegmentRecord& segment_record(const IndexKey& key) const {
        return segments_.at(key);
    }
    const EndRecord& end_record(VehicleId vehicle) const { return ends_.at(vehicle); }
    std::size_t live_segment_count(VehicleId vehicle) const;

private:
    PruneConfig config_;
    SpatialIndex t_seg_;
    SpatialIndex t_end_;
    SpatialIndex t_ev_;
    std::unordered_map<IndexKey, SegmentRecord, IndexKeyHash> segments_;
    std::unordered_map<VehicleId, EndRecord> ends_;
    std::unordered_map<VehicleId, std::int32_t> first_live_segment_;
    std::unordered_map<VehicleId, std::int32_t> segment_count_;
};

/// Keep/discard test for a segment that geometrically admits a stop.
/// `eta` is set for pickup insertions (capacity refinement).
bool refine_segment_for_stop(const SegmentRecord& seg, const Point& stop_coord,
                             const NetworkPosition& stop, double stop_deadline,
                             std::optional<int> eta, int capacity,
                             const TravelTimeProvider& travel, bool tight);

/// Keep/discard test for appending a stop after the ending stop.
bool refine_ending_stop(const EndRecord& end, const NetworkPosition& stop,
                        double stop_deadline, const TravelTimeProvider& travel);

/// Constraint geometry of a request.
WaitingCircle waiting_circle(const TripRequest& request, const RoadNetwork& net,
                             double transforming_speed);
DetourEllipse request_detour_ellipse(const TripRequest& request, const RoadNetwork& net,
                                     double transforming_speed);

}  // namespace geoprune
