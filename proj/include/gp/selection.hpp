#pragma once

#include <optional>

#include "gp/prune.hpp"

namespace geoprune {

struct Assignment {
    VehicleId vehicle = 0;
    std::size_t source_slot = 0;       // i
    std::size_t destination_slot = 0;  // j
    double increase = 0.0;             // seconds of added schedule time
};

struct MatchDecision {
    RequestId request = 0;
    std::optional<Assignment> assignment;  // nullopt = rejected
};

using Fleet = std::vector<Vehicle>;

/// Minimum-increase valid insertion among the candidate vehicles,
/// enumerating only slot pairs consistent with the admitting cases.
/// Ties: smallest increase, then vehicle id, then (i, j) lexicographic.
std::optional<Assignment> select_best_nonempty(const TripRequest& request,
                                               const CandidateSet& candidates,
                                               const Fleet& fleet, double now,
                                               const TravelTimeProvider& travel);

/// IER: streams empty vehicles by ascending Euclidean distance from the
/// request source, refining by network travel time, until the Euclidean
/// lower bound exceeds the best network time. Only vehicles whose pickup
/// time is within the waiting budget qualify. Ties by vehicle id.
std::optional<Assignment> nearest_empty_vehicle(const TripRequest& request,
                                                const PruneState& state,
                                                const Fleet& fleet,
                                                const RoadNetwork& net,
                                                const TravelTimeProvider& travel);

/// Greedy per-request decision: the smaller increase wins; a tie keeps the
/// non-empty vehicle.
MatchDecision decide(const TripRequest& request,
                     const std::optional<Assignment>& best_nonempty,
                     const std::optional<Assignment>& best_empty);

}  // namespace geoprune
