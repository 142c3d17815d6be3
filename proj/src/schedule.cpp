#include "gp/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace geoprune {

void TripRequest::derive_deadlines(const TravelTimeProvider& travel) {
    lp = t + w;
    ld = t + w + travel.travel_time(s, e) * (1.0 + epsilon);
}

double TripSchedule::max_allowed_travel_time(std::size_t k) const {
    if (k < 1 || k >= arr.size()) throw std::out_of_range("segment index");
    return arr[k] - arr[k - 1] + slk[k];
}

TripSchedule recompute_recorder(NetworkPosition origin, std::vector<Stop> stops,
                                int initial_onboard, double now,
                                const TravelTimeProvider& travel) {
    TripSchedule s;
    s.stops = std::move(stops);
    s.initial_onboard = initial_onboard;
    const std::size_t m = s.stops.size();
    s.arr.assign(m + 1, now);
    s.ddl.assign(m + 1, now);
    s.slk.assign(m + 1, 0.0);
    s.occupancy.assign(m + 1, 0);
    s.valid = true;
    if (m == 0) return s;

    NetworkPosition prev = origin;
    int onboard = initial_onboard;
    for (std::size_t k = 1; k <= m; ++k) {
        const Stop& stop = s.stops[k - 1];
        s.occupancy[k] = onboard;
        double leg;
        try {
            leg = travel.travel_time(prev, stop.location);
        } catch (const NetworkError&) {
            s.valid = false;
            return s;
        }
        s.arr[k] = s.arr[k - 1] + leg;
        s.ddl[k] = stop.deadline;
        onboard += stop.kind == StopKind::Pickup ? stop.eta : -stop.eta;
        prev = stop.location;
    }
    s.slk[m] = s.ddl[m] - s.arr[m];
    for (std::size_t k = m - 1; k >= 1; --k) {
        s.slk[k] = std::min(s.ddl[k] - s.arr[k], s.slk[k + 1]);
    }
    for (std::size_t k = 1; k <= m; ++k) {
        if (s.slk[k] < 0.0) s.valid = false;
    }
    return s;
}

std::vector<Stop> stops_with_insertion(const TripSchedule& schedule,
                                       const TripRequest& request, std::size_t i,
                                       std::size_t j) {
    const std::size_t m = schedule.stop_count();
    if (i < 1 || i > j || j > m + 1) throw std::out_of_range("insertion slots");
    Stop src{request.s, StopKind::Pickup, request.id, request.eta, request.lp};
    Stop dst{request.e, StopKind::Dropoff, request.id, request.eta, request.ld};
    std::vector<Stop> stops;
    stops.reserve(m + 2);
    for (std::size_t k = 1; k <= m + 1; ++k) {
        if (k == i) stops.push_back(src);
        if (k == j) stops.push_back(dst);
        if (k <= m) stops.push_back(schedule.stops[k - 1]);
    }
    return stops;
}

InsertionResult evaluate_insertion(const Vehicle& vehicle, const TripRequest& request,
                                   std::size_t i, std::size_t j, double now,
                                   const TravelTimeProvider& travel) {
    std::vector<Stop> stops = stops_with_insertion(vehicle.schedule, request, i, j);
    TripSchedule rebuilt =
        recompute_recorder(vehicle.location, std::move(stops), vehicle.onboard, now, travel);
    if (!rebuilt.valid) return {};
    for (std::size_t k = 1; k <= rebuilt.stop_count(); ++k) {
        if (rebuilt.occupancy[k] > vehicle.capacity) return {};
    }
    // The pre-insertion schedule, re-anchored at now, for the time delta.
    TripSchedule base = recompute_recorder(vehicle.location, vehicle.schedule.stops,
                                           vehicle.onboard, now, travel);
    if (!base.valid) return {};
    return {true, rebuilt.total_time() - base.total_time()};
}

std::vector<TripRequest> load_requests(const std::string& path, const RoadNetwork& net,
                                       const TravelTimeProvider& travel,
                                       std::optional<CsvOrigin> origin) {
    std::ifstream in(path);
    if (!in) throw NetworkError("cannot open request file: " + path);
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw NetworkError(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (!std::getline(in, line)) fail("missing header row");
    ++lineno;
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    std::unordered_map<std::string, std::size_t> col_idx;
    for (std::size_t k = 0; k < cols.size(); ++k) col_idx[cols[k]] = k;
    auto has = [&](const char* name) { return col_idx.count(name) > 0; };
    bool vertex_form = has("s_vertex") && has("e_vertex");
    bool lonlat_form = has("s_lon") && has("s_lat") && has("e_lon") && has("e_lat");
    if (!vertex_form && !lonlat_form) fail("header must name s_vertex/e_vertex or lon/lat columns");
    if (lonlat_form && !origin) fail("lon/lat requests need a projection origin");
    for (const char* required : {"id", "t_seconds", "w_seconds", "epsilon", "eta"}) {
        if (!has(required)) fail(std::string("missing column ") + required);
    }

    auto nearest_vertex = [&](const Point& p) {
        VertexId best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (VertexId v = 0; v < static_cast<VertexId>(net.vertex_count()); ++v) {
            double d = euclidean(net.coord(v), p);
            if (d < best_d) {
                best_d = d;
                best = v;
            }
        }
        return best;
    };

    std::vector<TripRequest> requests;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != cols.size()) fail("wrong field count");
        auto field = [&](const char* name) -> const std::string& {
            return fields[col_idx.at(name)];
        };
        TripRequest r;
        try {
            r.id = std::stoll(field("id"));
            r.t = std::stod(field("t_seconds"));
            r.w = std::stod(field("w_seconds"));
            r.epsilon = std::stod(field("epsilon"));
            r.eta = std::stoi(field("eta"));
            if (vertex_form) {
                long sv = std::stol(field("s_vertex"));
                long ev = std::stol(field("e_vertex"));
                if (sv < 0 || ev < 0 || sv >= static_cast<long>(net.vertex_count()) ||
                    ev >= static_cast<long>(net.vertex_count()))
                    fail("vertex id out of range");
                r.s = NetworkPosition::at_vertex(static_cast<VertexId>(sv));
                r.e = NetworkPosition::at_vertex(static_cast<VertexId>(ev));
            } else {
                Point s = project_equirectangular(std::stod(field("s_lon")),
                                                  std::stod(field("s_lat")), origin->lon0,
                                                  origin->lat0);
                Point e = project_equirectangular(std::stod(field("e_lon")),
                                                  std::stod(field("e_lat")), origin->lon0,
                                                  origin->lat0);
                r.s = NetworkPosition::at_vertex(nearest_vertex(s));
                r.e = NetworkPosition::at_vertex(nearest_vertex(e));
            }
        } catch (const std::invalid_argument&) {
            fail("malformed numeric field");
        } catch (const std::out_of_range&) {
            fail("numeric field out of range");
        }
        if (r.w < 0.0 || r.epsilon < 0.0 || r.eta < 1) fail("constraint fields out of range");
        r.derive_deadlines(travel);
        requests.push_back(r);
    }
    return requests;
}

}  // namespace geoprune
