#include "gp/prune.hpp"

#include <algorithm>
#include <set>

namespace geoprune {

// Pruning comparisons get a tiny slack so floating-point ties (insertions
// consuming exactly all slack) stay on the keep side; the exact selection
// step filters them afterwards.
constexpr double kTimeEps = 1e-6;  // seconds

WaitingCircle waiting_circle(const TripRequest& request, const RoadNetwork& net,
                             double transforming_speed) {
    return WaitingCircle(position_coord(net, request.s), request.w * transforming_speed);
}

namespace {

// Time budgets convert to distance with one rounding step, so a zero-slack
// collinear segment can land an ulp below its focal distance; clamping up
// keeps the ellipse well-formed and stays conservative.
DetourEllipse budget_ellipse(Point f1, Point f2, double major) {
    return DetourEllipse(f1, f2, std::max(major, euclidean(f1, f2)));
}

}  // namespace

DetourEllipse request_detour_ellipse(const TripRequest& request, const RoadNetwork& net,
                                     double transforming_speed) {
    // Major axis: maximum allowed travel time of the request, (ld - t) * v.
    return budget_ellipse(position_coord(net, request.s), position_coord(net, request.e),
                          (request.ld - request.t) * transforming_speed);
}

bool refine_segment_for_stop(const SegmentRecord& seg, const Point& stop_coord,
                             const NetworkPosition& stop, double stop_deadline,
                             std::optional<int> eta, int capacity,
                             const TravelTimeProvider& travel, bool tight) {
    (void)stop_coord;
    if (eta && seg.occupancy + *eta > capacity) return false;
    double to_stop, from_stop;
    try {
        to_stop = travel.travel_time(seg.from, stop);
        from_stop = travel.travel_time(stop, seg.to);
    } catch (const NetworkError&) {
        return false;
    }
    double arrival = seg.arr_prev + to_stop;
    if (arrival > stop_deadline + kTimeEps) return false;
    double existing_bound = tight ? seg.arr + seg.slk : seg.ddl;
    return arrival + from_stop <= existing_bound + kTimeEps;
}

bool refine_ending_stop(const EndRecord& end, const NetworkPosition& stop,
                        double stop_deadline, const TravelTimeProvider& travel) {
    try {
        return end.arr + travel.travel_time(end.location, stop) <=
               stop_deadline + kTimeEps;
    } catch (const NetworkError&) {
        return false;
    }
}

void PruneState::register_empty(const Vehicle& vehicle, const RoadNetwork& net) {
    Point p = position_coord(net, vehicle.location);
    t_ev_.insert({{vehicle.id, IndexKey::kNoSegment}, {p, p}, 0});
}

CandidateSet PruneState::prune(const TripRequest& request, const RoadNetwork& net,
                               const TravelTimeProvider& travel) const {
    const double vt = config_.transforming_speed;
    const double geo_eps = vt * kTimeEps;  // meters
    WaitingCircle wc = waiting_circle(request, net, vt);
    DetourEllipse rd = request_detour_ellipse(request, net, vt);
    Point s_coord = position_coord(net, request.s);
    Point e_coord = position_coord(net, request.e);
    auto in_ellipse = [&](const DetourEllipse& e, const Point& p) {
        return euclidean(e.f1(), p) + euclidean(p, e.f2()) <= e.major() + geo_eps;
    };
    auto in_circle = [&](const WaitingCircle& c, const Point& p) {
        return euclidean(c.center(), p) <= c.radius() + geo_eps;
    };
    auto padded = [&](const Mbr& box) {
        return Mbr{{box.lo.x - geo_eps, box.lo.y - geo_eps},
                   {box.hi.x + geo_eps, box.hi.y + geo_eps}};
    };

    std::set<VehicleId> o1, o2, o3, o4;

    // Q1: segments whose detour ellipse covers r.s (insert the pickup).
    for (const IndexEntry& entry : t_seg_.point_query(s_coord)) {
        const SegmentRecord& seg = segments_.at(entry.key);
        if (!in_ellipse(seg.ellipse, s_coord)) continue;
        if (refine_segment_for_stop(seg, s_coord, request.s, request.lp, request.eta,
                                    seg.capacity, travel, config_.tight_refinement)) {
            o1.insert(seg.vehicle);
        }
    }
    // Q2: segments whose detour ellipse covers r.e (insert the drop-off).
    for (const IndexEntry& entry : t_seg_.point_query(e_coord)) {
        const SegmentRecord& seg = segments_.at(entry.key);
        if (!in_ellipse(seg.ellipse, e_coord)) continue;
        if (refine_segment_for_stop(seg, e_coord, request.e, request.ld, std::nullopt,
                                    seg.capacity, travel, config_.tight_refinement)) {
            o2.insert(seg.vehicle);
        }
    }
    // Q3: ending stops inside the waiting circle (append both stops).
    for (const IndexEntry& entry : t_end_.range_query(padded(wc.mbr()))) {
        const EndRecord& end = ends_.at(static_cast<VehicleId>(entry.key.vehicle));
        Point p = position_coord(net, end.location);
        if (!in_circle(wc, p)) continue;
        if (request.eta > end.capacity) continue;
        if (refine_ending_stop(end, request.s, request.lp, travel)) {
            o3.insert(end.vehicle);
        }
    }
    // Q4: ending stops inside the request detour ellipse (append drop-off).
    for (const IndexEntry& entry : t_end_.range_query(padded(rd.mbr()))) {
        const EndRecord& end = ends_.at(static_cast<VehicleId>(entry.key.vehicle));
        Point p = position_coord(net, end.location);
        if (!in_ellipse(rd, p)) continue;
        if (refine_ending_stop(end, request.e, request.ld, travel)) {
            o4.insert(end.vehicle);
        }
    }

    CandidateSet result;
    auto flag = [&](VehicleId v) -> CandidateSet::Flags& { return result.cases[v]; };
    for (VehicleId v : o1) {
        if (o2.count(v)) flag(v).insert_insert = true;   // F1 = O1 n O2
        if (o4.count(v)) flag(v).insert_append = true;   // F2 = O1 n O4
    }
    for (VehicleId v : o3) flag(v).append_append = true;  // F3 = O3
    result.vehicles.reserve(result.cases.size());
    for (const auto& [v, f] : result.cases) result.vehicles.push_back(v);
    std::sort(result.vehicles.begin(), result.vehicles.end());
    return result;
}

std::vector<VehicleId> PruneState::prune_empty(const TripRequest& request,
                                               const RoadNetwork& net) const {
    WaitingCircle wc = waiting_circle(request, net, config_.transforming_speed);
    std::vector<VehicleId> out;
    for (const IndexEntry& entry : t_ev_.range_query(wc.mbr())) {
        if (wc.contains(entry.box.lo)) out.push_back(static_cast<VehicleId>(entry.key.vehicle));
    }
    return out;
}

std::size_t PruneState::live_segment_count(VehicleId vehicle) const {
    auto it = segment_count_.find(vehicle);
    return it == segment_count_.end() ? 0 : static_cast<std::size_t>(it->second);
}

std::size_t PruneState::match_update(const Vehicle& vehicle, const RoadNetwork& net) {
    const TripSchedule& s = vehicle.schedule;
    if (!s.valid || s.empty()) {
        throw std::logic_error("match_update requires a valid non-empty schedule");
    }
    std::size_t touched = 0;
    IndexKey ev_key{vehicle.id, IndexKey::kNoSegment};
    if (t_ev_.contains(ev_key)) {
        t_ev_.remove(ev_key);
        ++touched;
    } else {
        auto first = first_live_segment_.at(vehicle.id);
        auto count = segment_count_.at(vehicle.id);
        for (std::int32_t k = first; k < first + count; ++k) {
            IndexKey key{vehicle.id, k};
            t_seg_.remove(key);
            segments_.erase(key);
            ++touched;
        }
        t_end_.remove(ev_key);
        ends_.erase(vehicle.id);
        ++touched;
    }

    const double vt = config_.transforming_speed;
    NetworkPosition prev = vehicle.location;
    for (std::size_t k = 1; k <= s.stop_count(); ++k) {
        const Stop& stop = s.stops[k - 1];
        SegmentRecord seg{vehicle.id,
                          static_cast<std::int32_t>(k),
                          prev,
                          stop.location,
                          s.arr[k - 1],
                          s.arr[k],
                          s.slk[k],
                          s.ddl[k],
                          s.occupancy[k],
                          vehicle.capacity,
                          budget_ellipse(position_coord(net, prev),
                                         position_coord(net, stop.location),
                                         s.max_allowed_travel_time(k) * vt)};
        IndexKey key{vehicle.id, static_cast<std::int32_t>(k)};
        // Pad the indexed box so a point-query tie on the exact boundary
        // cannot skip the entry before the tolerant confirmation runs.
        Mbr box = seg.ellipse.mbr();
        const double pad = vt * kTimeEps;
        box = {{box.lo.x - pad, box.lo.y - pad}, {box.hi.x + pad, box.hi.y + pad}};
        t_seg_.insert({key, box, 0});
        segments_.emplace(key, std::move(seg));
        ++touched;
        prev = stop.location;
    }
    first_live_segment_[vehicle.id] = 1;
    segment_count_[vehicle.id] = static_cast<std::int32_t>(s.stop_count());

    const Stop& last = s.stops.back();
    EndRecord end{vehicle.id, last.location, s.arr.back(), vehicle.capacity};
    Point p = position_coord(net, last.location);
    t_end_.insert({ev_key, {p, p}, 0});
    ends_[vehicle.id] = end;
    ++touched;
    return touched;
}

void PruneState::move_update(const Vehicle& vehicle, std::size_t stops_reached,
                             bool schedule_finished, const RoadNetwork& net) {
    if (stops_reached == 0 && !schedule_finished) return;
    auto first_it = first_live_segment_.find(vehicle.id);
    if (first_it == first_live_segment_.end()) return;  // was empty already
    std::int32_t first = first_it->second;
    std::int32_t count = segment_count_.at(vehicle.id);
    std::int32_t drop = std::min<std::int32_t>(static_cast<std::int32_t>(stops_reached), count);
    for (std::int32_t k = first; k < first + drop; ++k) {
        IndexKey key{vehicle.id, k};
        t_seg_.remove(key);
        segments_.erase(key);
    }
    first_live_segment_[vehicle.id] = first + drop;
    segment_count_[vehicle.id] = count - drop;
    if (schedule_finished) {
        IndexKey ev_key{vehicle.id, IndexKey::kNoSegment};
        t_end_.remove(ev_key);
        ends_.erase(vehicle.id);
        first_live_segment_.erase(vehicle.id);
        segment_count_.erase(vehicle.id);
        Point p = position_coord(net, vehicle.location);
        t_ev_.insert({ev_key, {p, p}, 0});
    }
}

}  // namespace geoprune
