#include "gp/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

namespace geoprune {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPathEps = 1e-6;  // meters, float slack for path reconstruction
}  // namespace

VertexId RoadNetwork::add_vertex(double x, double y) {
    coords_.push_back({x, y});
    adj_.emplace_back();
    radj_.emplace_back();
    return static_cast<VertexId>(coords_.size() - 1);
}

EdgeId RoadNetwork::add_edge(VertexId from, VertexId to, double length) {
    if (from < 0 || to < 0 || from >= static_cast<VertexId>(coords_.size()) ||
        to >= static_cast<VertexId>(coords_.size())) {
        throw NetworkError("edge references unknown vertex");
    }
    if (length < euclidean(coords_[from], coords_[to]) - 1e-9) {
        throw NetworkError("edge shorter than the Euclidean distance of its endpoints");
    }
    EdgeId id = static_cast<EdgeId>(edges_.size());
    edges_.push_back({from, to, length});
    adj_[from].push_back({to, length, id});
    radj_[to].push_back({from, length, id});
    return id;
}

std::vector<char> RoadNetwork::largest_scc_mask() const {
    // Kosaraju
    const std::size_t n = coords_.size();
    std::vector<char> visited(n, 0);
    std::vector<VertexId> order;
    order.reserve(n);
    for (VertexId s = 0; s < static_cast<VertexId>(n); ++s) {
        if (visited[s]) continue;
        std::vector<std::pair<VertexId, std::size_t>> stack{{s, 0}};
        visited[s] = 1;
        while (!stack.empty()) {
            auto& [v, idx] = stack.back();
            if (idx < adj_[v].size()) {
                VertexId w = adj_[v][idx++].other;
                if (!visited[w]) {
                    visited[w] = 1;
                    stack.push_back({w, 0});
                }
            } else {
                order.push_back(v);
                stack.pop_back();
            }
        }
    }
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[*it] != -1) continue;
        std::vector<VertexId> stack{*it};
        comp[*it] = ncomp;
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            for (const auto& e : radj_[v]) {
                if (comp[e.other] == -1) {
                    comp[e.other] = ncomp;
                    stack.push_back(e.other);
                }
            }
        }
        ++ncomp;
    }
    std::vector<std::size_t> sizes(ncomp, 0);
    for (std::size_t v = 0; v < n; ++v) sizes[comp[v]]++;
    int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<char> mask(n, 0);
    for (std::size_t v = 0; v < n; ++v) mask[v] = comp[v] == best;
    return mask;
}

bool RoadNetwork::on_largest_scc(VertexId v) const {
    return largest_scc_mask().at(v) != 0;
}

RoadNetwork RoadNetwork::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NetworkError("cannot open network file: " + path);
    RoadNetwork net;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw NetworkError(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        char tag;
        ss >> tag;
        if (tag == 'V') {
            long id;
            double x, y;
            if (!(ss >> id >> x >> y)) fail("malformed vertex record");
            if (id != static_cast<long>(net.vertex_count())) fail("vertex ids must be dense and ordered");
            net.add_vertex(x, y);
        } else if (tag == 'E') {
            long from, to;
            double len;
            if (!(ss >> from >> to >> len)) fail("malformed edge record");
            try {
                net.add_edge(static_cast<VertexId>(from), static_cast<VertexId>(to), len);
            } catch (const NetworkError& e) {
                fail(e.what());
            }
        } else {
            fail("unknown record tag");
        }
    }
    return net;
}

void RoadNetwork::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw NetworkError("cannot write network file: " + path);
    out.precision(10);
    for (std::size_t v = 0; v < coords_.size(); ++v) {
        out << "V " << v << ' ' << coords_[v].x << ' ' << coords_[v].y << '\n';
    }
    for (const auto& e : edges_) {
        out << "E " << e.from << ' ' << e.to << ' ' << e.length << '\n';
    }
}

NetworkPosition NetworkPosition::on_edge(const RoadNetwork& net, EdgeId e, double offset) {
    const Edge& edge = net.edge(e);
    if (offset < -1e-9 || offset > edge.length + 1e-9) {
        throw NetworkError("position offset outside edge");
    }
    offset = std::clamp(offset, 0.0, edge.length);
    if (offset == 0.0) return at_vertex(edge.from);
    if (offset == edge.length) return at_vertex(edge.to);
    return {kInvalidVertex, e, offset};
}

Point position_coord(const RoadNetwork& net, const NetworkPosition& pos) {
    if (pos.is_vertex()) return net.coord(pos.vertex);
    const Edge& e = net.edge(pos.edge);
    double f = pos.offset / e.length;
    const Point& a = net.coord(e.from);
    const Point& b = net.coord(e.to);
    return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
}

TravelTimeProvider::TravelTimeProvider(const RoadNetwork& net, double speed_mps,
                                       std::size_t cache_sources)
    : net_(net), speed_(speed_mps), cache_capacity_(cache_sources) {
    if (speed_mps <= 0.0) throw NetworkError("speed must be positive");
}

const std::vector<double>& TravelTimeProvider::source_distances(VertexId src) const {
    auto it = cache_.find(src);
    if (it != cache_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second.second);
        return it->second.first;
    }
    std::vector<double> dist(net_.vertex_count(), kInf);
    dist[src] = 0.0;
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.push({0.0, src});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        for (const auto& e : net_.out_edges(v)) {
            double nd = d + e.length;
            if (nd < dist[e.other]) {
                dist[e.other] = nd;
                pq.push({nd, e.other});
            }
        }
    }
    if (cache_.size() >= cache_capacity_ && !lru_.empty()) {
        cache_.erase(lru_.back());
        lru_.pop_back();
    }
    lru_.push_front(src);
    auto [pos, inserted] = cache_.emplace(src, std::make_pair(std::move(dist), lru_.begin()));
    (void)inserted;
    return pos->second.first;
}

double TravelTimeProvider::distance(VertexId src, VertexId dst) const {
    return source_distances(src)[dst];
}

double TravelTimeProvider::travel_time(VertexId src, VertexId dst) const {
    double d = distance(src, dst);
    if (d == kInf) throw NetworkError("disconnected");
    return d / speed_;
}

namespace {

struct Anchors {
    VertexId depart;       // vertex from which the general route departs
    double head_meters;    // meters to reach that vertex from src
    VertexId arrive;       // vertex at which the general route arrives
    double tail_meters;    // meters from that vertex to dst
};

Anchors anchors_of(const RoadNetwork& net, const NetworkPosition& src,
                   const NetworkPosition& dst) {
    Anchors a{};
    if (src.is_vertex()) {
        a.depart = src.vertex;
        a.head_meters = 0.0;
    } else {
        const Edge& e = net.edge(src.edge);
        a.depart = e.to;
        a.head_meters = e.length - src.offset;
    }
    if (dst.is_vertex()) {
        a.arrive = dst.vertex;
        a.tail_meters = 0.0;
    } else {
        const Edge& e = net.edge(dst.edge);
        a.arrive = e.from;
        a.tail_meters = dst.offset;
    }
    return a;
}

}  // namespace

double TravelTimeProvider::travel_time(const NetworkPosition& src,
                                       const NetworkPosition& dst) const {
    if (src == dst) return 0.0;
    double best = kInf;
    if (!src.is_vertex() && !dst.is_vertex() && src.edge == dst.edge &&
        src.offset <= dst.offset) {
        best = dst.offset - src.offset;
    }
    Anchors a = anchors_of(net_, src, dst);
    double mid = distance(a.depart, a.arrive);
    if (mid < kInf) best = std::min(best, a.head_meters + mid + a.tail_meters);
    if (best == kInf) throw NetworkError("disconnected");
    return best / speed_;
}

Path TravelTimeProvider::shortest_path(const NetworkPosition& src,
                                       const NetworkPosition& dst) const {
    Path path;
    path.start = src;
    path.end = dst;
    if (src == dst) {
        if (src.is_vertex()) path.vertices = {src.vertex};
        path.length = 0.0;
        return path;
    }
    double direct = kInf;
    if (!src.is_vertex() && !dst.is_vertex() && src.edge == dst.edge &&
        src.offset <= dst.offset) {
        direct = dst.offset - src.offset;
    }
    Anchors a = anchors_of(net_, src, dst);
    const std::vector<double>& dist = source_distances(a.depart);
    double general = dist[a.arrive] == kInf
                         ? kInf
                         : a.head_meters + dist[a.arrive] + a.tail_meters;
    if (direct == kInf && general == kInf) throw NetworkError("disconnected");
    if (direct <= general) {
        path.length = direct;  // stays on one edge, no intermediate vertices
        return path;
    }
    // Walk backward from the arrival anchor along tight in-edges.
    std::vector<VertexId> chain{a.arrive};
    VertexId cur = a.arrive;
    while (cur != a.depart) {
        VertexId best_prev = kInvalidVertex;
        for (const auto& e : net_.in_edges(cur)) {
            if (dist[e.other] + e.length <= dist[cur] + kPathEps) {
                if (best_prev == kInvalidVertex || e.other < best_prev) best_prev = e.other;
            }
        }
        if (best_prev == kInvalidVertex) throw NetworkError("path reconstruction failed");
        chain.push_back(best_prev);
        cur = best_prev;
    }
    std::reverse(chain.begin(), chain.end());
    path.vertices = std::move(chain);
    path.length = general;
    return path;
}

NetworkPosition advance(const RoadNetwork& net, const Path& path, double distance) {
    if (distance <= 0.0) return path.start;
    if (distance >= path.length) return path.end;
    double remaining = distance;
    NetworkPosition cur = path.start;
    std::size_t next_idx = 0;
    // Leg from a mid-edge start to the first chain vertex (the edge head).
    if (!cur.is_vertex()) {
        const Edge& e = net.edge(cur.edge);
        if (path.vertices.empty()) {
            // Single-edge path: the end lies further along the same edge.
            return NetworkPosition::on_edge(net, cur.edge, cur.offset + remaining);
        }
        double leg = e.length - cur.offset;
        if (remaining < leg) {
            return NetworkPosition::on_edge(net, cur.edge, cur.offset + remaining);
        }
        remaining -= leg;
        cur = NetworkPosition::at_vertex(e.to);
        // vertices.front() == e.to
        next_idx = 1;
    } else if (!path.vertices.empty()) {
        next_idx = 1;  // vertices.front() == start vertex
    }
    while (next_idx < path.vertices.size()) {
        VertexId from = cur.vertex;
        VertexId to = path.vertices[next_idx];
        const RoadNetwork::AdjEntry* found = nullptr;
        for (const auto& e : net.out_edges(from)) {
            if (e.other == to && (!found || e.length < found->length)) found = &e;
        }
        if (!found) throw NetworkError("path chain is not edge-connected");
        if (remaining < found->length) {
            return NetworkPosition::on_edge(net, found->edge, remaining);
        }
        remaining -= found->length;
        cur = NetworkPosition::at_vertex(to);
        ++next_idx;
    }
    // Leg from the last chain vertex to a mid-edge end.
    if (!path.end.is_vertex()) {
        if (remaining < path.end.offset) {
            return NetworkPosition::on_edge(net, path.end.edge, remaining);
        }
    }
    return path.end;
}

Point project_equirectangular(double lon, double lat, double lon0, double lat0) {
    constexpr double kEarthRadius = 6371000.0;
    constexpr double kDeg = 3.14159265358979323846 / 180.0;
    double x = kEarthRadius * std::cos(lat0 * kDeg) * (lon - lon0) * kDeg;
    double y = kEarthRadius * (lat - lat0) * kDeg;
    return {x, y};
}

}  // namespace geoprune
