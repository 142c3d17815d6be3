#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gp/network.hpp"

namespace geoprune {

using RequestId = std::int64_t;
using VehicleId = std::int32_t;

struct TripRequest {
    RequestId id = 0;
    double t = 0.0;        // issue time, seconds
    NetworkPosition s;     // source
    NetworkPosition e;     // destination
    double w = 0.0;        // max waiting, seconds
    double epsilon = 0.0;  // max detour ratio
    int eta = 1;           // passengers

    double lp = 0.0;  // latest pickup = t + w
    double ld = 0.0;  // latest drop-off = t + w + t(s,e) * (1 + epsilon)

    /// Fills lp/ld from the travel-time provider.
    void derive_deadlines(const TravelTimeProvider& travel);
};

enum class StopKind { Pickup, Dropoff };

struct Stop {
    NetworkPosition location;
    StopKind kind = StopKind::Pickup;
    RequestId request = 0;
    int eta = 1;
    double deadline = 0.0;  // lp for pickups, ld for dropoffs
};

/// Ordered stop sequence with the arr/ddl/slk recorder. Index 0 is the
/// implicit current vehicle location p0; stops_[k-1] is stop p^k.
struct TripSchedule {
    std::vector<Stop> stops;
    std::vector<double> arr;        // arr[0] = anchor time, arr[k] for p^k
    std::vector<double> ddl;        // ddl[k], ddl[0] unused (= arr[0])
    std::vector<double> slk;        // slk[k], slk[0] unused
    std::vector<int> occupancy;     // occupancy[k] = passengers on segment (p^{k-1}, p^k)
    int initial_onboard = 0;        // passengers aboard before p^1
    bool valid = true;

    std::size_t stop_count() const { return stops.size(); }
    bool empty() const { return stops.empty(); }

    /// Total driving time of the schedule, seconds (arr[m] - arr[0]).
    double total_time() const { return arr.empty() ? 0.0 : arr.back() - arr.front(); }

    /// arr[k] - arr[k-1] + slk[k], the detour budget of segment k.
    double max_allowed_travel_time(std::size_t k) const;
};

/// Populates arr/ddl/slk/occupancy for the stop sequence, anchored at `now`
/// from position `origin`. Unreachable stops or any negative slack mark the
/// schedule invalid.
TripSchedule recompute_recorder(NetworkPosition origin, std::vector<Stop> stops,
                                int initial_onboard, double now,
                                const TravelTimeProvider& travel);

struct InsertionResult {
    bool valid = false;
    double increase = 0.0;  // added schedule travel time, seconds
};

struct Vehicle {
    VehicleId id = 0;
    NetworkPosition location;
    TripSchedule schedule;
    int capacity = 1;
    double speed = 0.0;  // meters/second
    int onboard = 0;     // passengers currently in the vehicle

    bool is_empty() const { return schedule.empty(); }
};

/// Simulates inserting request.s before slot i and request.e before slot j
/// (slot m+1 appends; i == j puts s immediately before e) and rebuilds the
/// recorder from scratch. Slots are 1-based, 1 <= i <= j <= m+1.
InsertionResult evaluate_insertion(const Vehicle& vehicle, const TripRequest& request,
                                   std::size_t i, std::size_t j, double now,
                                   const TravelTimeProvider& travel);

/// Builds the stop sequence that evaluate_insertion scores.
std::vector<Stop> stops_with_insertion(const TripSchedule& schedule,
                                       const TripRequest& request, std::size_t i,
                                       std::size_t j);

/// Loads `id,t_seconds,s_vertex,e_vertex,w_seconds,epsilon,eta` (header
/// required). With lon/lat columns (s_lon,s_lat,e_lon,e_lat) a projection
/// origin is required and locations snap to the nearest network vertex.
struct CsvOrigin {
    double lon0 = 0.0;
    double lat0 = 0.0;
};
std::vector<TripRequest> load_requests(const std::string& path, const RoadNetwork& net,
                                       const TravelTimeProvider& travel,
                                       std::optional<CsvOrigin> origin = std::nullopt);

}  // namespace geoprune
