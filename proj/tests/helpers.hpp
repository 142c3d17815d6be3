#pragma once

#include <random>
#include <vector>

#include "gp/network.hpp"

namespace gptest {

using namespace geoprune;

/// W x H grid with bidirectional unit edges of length `edge_len`.
inline RoadNetwork make_grid(int w, int h, double edge_len) {
    RoadNetwork net;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) net.add_vertex(x * edge_len, y * edge_len);
    auto both = [&](VertexId a, VertexId b) {
        net.add_edge(a, b, edge_len);
        net.add_edge(b, a, edge_len);
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) both(y * w + x, y * w + x + 1);
            if (y + 1 < h) both(y * w + x, (y + 1) * w + x);
        }
    }
    return net;
}

/// Independent all-pairs distance oracle (Floyd-Warshall).
inline std::vector<std::vector<double>> floyd_warshall(const RoadNetwork& net) {
    const std::size_t n = net.vertex_count();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (std::size_t v = 0; v < n; ++v) d[v][v] = 0.0;
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        const Edge& edge = net.edge(static_cast<EdgeId>(e));
        d[edge.from][edge.to] = std::min(d[edge.from][edge.to], edge.length);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    return d;
}

}  // namespace gptest
