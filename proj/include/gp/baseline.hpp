#pragma once

#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gp/prune.hpp"
#include "gp/selection.hpp"

namespace geoprune {

/// Uniform grid over vehicle positions (the GreedyGrids baseline).
class GridIndex {
public:
    explicit GridIndex(double cell_length_m = 1000.0) : cell_(cell_length_m) {}

    double cell_length() const { return cell_; }

    void track(VehicleId vehicle, const Point& position);
    void untrack(VehicleId vehicle);

    /// Vehicles in cells intersecting the waiting-circle MBR of the request.
    std::vector<VehicleId> candidates(const TripRequest& request, const RoadNetwork& net,
                                      double transforming_speed) const;

    std::size_t tracked_count() const { return cell_of_.size(); }

private:
    struct CellHash {
        std::size_t operator()(const std::pair<long, long>& c) const {
            return std::hash<long>()(c.first * 2654435761L + c.second);
        }
    };
    std::pair<long, long> cell_coords(const Point& p) const;

    double cell_;
    std::unordered_map<std::pair<long, long>, std::unordered_set<VehicleId>, CellHash> cells_;
    std::unordered_map<VehicleId, std::pair<long, long>> cell_of_;
};

/// Ground truth by exhaustive insertion enumeration: every vehicle with at
/// least one valid (i, j) slot pair for the request.
std::vector<VehicleId> oracle_feasible_set(const TripRequest& request, const Fleet& fleet,
                                           double now, const TravelTimeProvider& travel,
                                           bool nonempty_only = false);

}  // namespace geoprune
