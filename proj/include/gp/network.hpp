#pragma once

#include <cstdint>
#include <list>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gp/geometry.hpp"

namespace geoprune {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

constexpr VertexId kInvalidVertex = -1;

struct Edge {
    VertexId from = kInvalidVertex;
    VertexId to = kInvalidVertex;
    double length = 0.0;  // meters
};

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Directed road network with planar coordinates in meters.
class RoadNetwork {
public:
    VertexId add_vertex(double x, double y);
    EdgeId add_edge(VertexId from, VertexId to, double length);

    std::size_t vertex_count() const { return coords_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const Point& coord(VertexId v) const { return coords_.at(v); }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }
    struct AdjEntry {
        VertexId other;  // head for out-edges, tail for in-edges
        double length;
        EdgeId edge;
    };
    const std::vector<AdjEntry>& out_edges(VertexId v) const { return adj_.at(v); }
    const std::vector<AdjEntry>& in_edges(VertexId v) const { return radj_.at(v); }

    /// Restricts to the largest strongly connected component; returns the
    /// set of retained original vertex ids ordered by new id.
    bool on_largest_scc(VertexId v) const;
    std::vector<char> largest_scc_mask() const;

    /// Parses `V <id> <x> <y>` / `E <from> <to> <length_m>` records.
    /// Throws NetworkError with a line number on malformed input.
    static RoadNetwork load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::vector<Point> coords_;
    std::vector<Edge> edges_;
    std::vector<std::vector<AdjEntry>> adj_;
    std::vector<std::vector<AdjEntry>> radj_;
};

/// A location on the network: either a vertex or a point part-way along a
/// directed edge. Offsets 0 and edge-length canonicalize to vertices.
struct NetworkPosition {
    VertexId vertex = kInvalidVertex;  // set when the position is a vertex
    EdgeId edge = -1;                  // set when mid-edge
    double offset = 0.0;               // meters from the edge tail

    static NetworkPosition at_vertex(VertexId v) { return {v, -1, 0.0}; }
    static NetworkPosition on_edge(const RoadNetwork& net, EdgeId e, double offset);

    bool is_vertex() const { return vertex != kInvalidVertex; }
    bool operator==(const NetworkPosition& o) const {
        return vertex == o.vertex && edge == o.edge && offset == o.offset;
    }
};

Point position_coord(const RoadNetwork& net, const NetworkPosition& pos);

/// A drivable path: the start position, a chain of vertices, and the end
/// position (which may sit on the edge leaving the last chain vertex).
struct Path {
    NetworkPosition start;
    std::vector<VertexId> vertices;  // includes endpoints when they are vertices
    NetworkPosition end;
    double length = 0.0;  // meters
};

/// Shortest-path travel times at constant speed, with an LRU cache of
/// single-source distance arrays. Queries are logically pure; the cache
/// is internal and this provider must be confined to one querying context
/// or externally synchronized.
class TravelTimeProvider {
public:
    TravelTimeProvider(const RoadNetwork& net, double speed_mps,
                       std::size_t cache_sources = 8192);

    double speed() const { return speed_; }
    const RoadNetwork& network() const { return net_; }

    /// Seconds along the shortest path; throws NetworkError("disconnected")
    /// when the destination is unreachable.
    double travel_time(const NetworkPosition& src, const NetworkPosition& dst) const;
    double travel_time(VertexId src, VertexId dst) const;

    /// Vertex-to-vertex distance in meters; infinity when unreachable.
    double distance(VertexId src, VertexId dst) const;

    Path shortest_path(const NetworkPosition& src, const NetworkPosition& dst) const;

private:
    const std::vector<double>& source_distances(VertexId src) const;

    const RoadNetwork& net_;
    double speed_;
    std::size_t cache_capacity_;
    mutable std::unordered_map<VertexId, std::pair<std::vector<double>, std::list<VertexId>::iterator>> cache_;
    mutable std::list<VertexId> lru_;
};

/// Advances `distance` meters from the start of `path`, clamped at its end.
NetworkPosition advance(const RoadNetwork& net, const Path& path, double distance);

/// Equirectangular local projection of (lon, lat) degrees to planar meters.
Point project_equirectangular(double lon, double lat, double lon0, double lat0);

}  // namespace geoprune
