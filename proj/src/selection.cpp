#include "gp/selection.hpp"

#include <cassert>
#include <limits>

namespace geoprune {

namespace {

bool better(const Assignment& a, const Assignment& b) {
    if (a.increase != b.increase) return a.increase < b.increase;
    if (a.vehicle != b.vehicle) return a.vehicle < b.vehicle;
    if (a.source_slot != b.source_slot) return a.source_slot < b.source_slot;
    return a.destination_slot < b.destination_slot;
}

}  // namespace

std::optional<Assignment> select_best_nonempty(const TripRequest& request,
                                               const CandidateSet& candidates,
                                               const Fleet& fleet, double now,
                                               const TravelTimeProvider& travel) {
    std::optional<Assignment> best;
    auto consider = [&](const Vehicle& vehicle, std::size_t i, std::size_t j) {
        InsertionResult r = evaluate_insertion(vehicle, request, i, j, now, travel);
        if (!r.valid) return;
        Assignment a{vehicle.id, i, j, r.increase};
        if (!best || better(a, *best)) best = a;
    };
    for (VehicleId v : candidates.vehicles) {
        const Vehicle& vehicle = fleet.at(static_cast<std::size_t>(v));
        assert(vehicle.id == v);
        const std::size_t m = vehicle.schedule.stop_count();
        if (m == 0) continue;
        const CandidateSet::Flags& f = candidates.cases.at(v);
        if (f.insert_insert) {
            for (std::size_t i = 1; i <= m; ++i)
                for (std::size_t j = i; j <= m; ++j) consider(vehicle, i, j);
        }
        if (f.insert_append) {
            for (std::size_t i = 1; i <= m; ++i) consider(vehicle, i, m + 1);
        }
        if (f.append_append) consider(vehicle, m + 1, m + 1);
    }
    return best;
}

std::optional<Assignment> nearest_empty_vehicle(const TripRequest& request,
                                                const PruneState& state,
                                                const Fleet& fleet,
                                                const RoadNetwork& net,
                                                const TravelTimeProvider& travel) {
    Point s_coord = position_coord(net, request.s);
    const double vt = state.config().transforming_speed;
    double best_time = std::numeric_limits<double>::infinity();
    VehicleId best_vehicle = -1;
    auto stream = state.empty_index().nearest_stream(s_coord);
    while (stream.has_next()) {
        IndexEntry entry = stream.next();
        double lower_bound = euclidean(entry.box.lo, s_coord) / vt;
        if (lower_bound > best_time) break;
        VehicleId v = static_cast<VehicleId>(entry.key.vehicle);
        const Vehicle& vehicle = fleet.at(static_cast<std::size_t>(v));
        if (request.eta > vehicle.capacity) continue;
        double net_time;
        try {
            net_time = travel.travel_time(vehicle.location, request.s);
        } catch (const NetworkError&) {
            continue;
        }
        if (net_time < best_time || (net_time == best_time && v < best_vehicle)) {
            best_time = net_time;
            best_vehicle = v;
        }
    }
    if (best_vehicle < 0 || best_time > request.w) return std::nullopt;
    double trip = travel.travel_time(request.s, request.e);
    return Assignment{best_vehicle, 1, 1, best_time + trip};
}

MatchDecision decide(const TripRequest& request,
                     const std::optional<Assignment>& best_nonempty,
                     const std::optional<Assignment>& best_empty) {
    MatchDecision d;
    d.request = request.id;
    if (best_nonempty && best_empty) {
        // Equal increases keep the non-empty vehicle (promotes sharing).
        d.assignment = best_empty->increase < best_nonempty->increase ? best_empty
                                                                      : best_nonempty;
    } else if (best_nonempty) {
        d.assignment = best_nonempty;
    } else if (best_empty) {
        d.assignment = best_empty;
    }
    return d;
}

}  // namespace geoprune
