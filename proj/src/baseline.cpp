#include "gp/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace geoprune {

std::pair<long, long> GridIndex::cell_coords(const Point& p) const {
    return {static_cast<long>(std::floor(p.x / cell_)),
            static_cast<long>(std::floor(p.y / cell_))};
}

void GridIndex::track(VehicleId vehicle, const Point& position) {
    auto cell = cell_coords(position);
    auto it = cell_of_.find(vehicle);
    if (it != cell_of_.end()) {
        if (it->second == cell) return;
        cells_[it->second].erase(vehicle);
        if (cells_[it->second].empty()) cells_.erase(it->second);
    }
    cells_[cell].insert(vehicle);
    cell_of_[vehicle] = cell;
}

void GridIndex::untrack(VehicleId vehicle) {
    auto it = cell_of_.find(vehicle);
    if (it == cell_of_.end()) return;
    cells_[it->second].erase(vehicle);
    if (cells_[it->second].empty()) cells_.erase(it->second);
    cell_of_.erase(it);
}

std::vector<VehicleId> GridIndex::candidates(const TripRequest& request,
                                             const RoadNetwork& net,
                                             double transforming_speed) const {
    Mbr window = waiting_circle(request, net, transforming_speed).mbr();
    auto lo = cell_coords(window.lo);
    auto hi = cell_coords(window.hi);
    std::vector<VehicleId> out;
    for (long cx = lo.first; cx <= hi.first; ++cx) {
        for (long cy = lo.second; cy <= hi.second; ++cy) {
            auto it = cells_.find({cx, cy});
            if (it == cells_.end()) continue;
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VehicleId> oracle_feasible_set(const TripRequest& request, const Fleet& fleet,
                                           double now, const TravelTimeProvider& travel,
                                           bool nonempty_only) {
    std::vector<VehicleId> out;
    for (const Vehicle& vehicle : fleet) {
        if (nonempty_only && vehicle.is_empty()) continue;
        const std::size_t m = vehicle.schedule.stop_count();
        bool feasible = false;
        for (std::size_t i = 1; i <= m + 1 && !feasible; ++i) {
            for (std::size_t j = i; j <= m + 1 && !feasible; ++j) {
                if (evaluate_insertion(vehicle, request, i, j, now, travel).valid) {
                    feasible = true;
                }
            }
        }
        if (feasible) out.push_back(vehicle.id);
    }
    return out;
}

}  // namespace geoprune
