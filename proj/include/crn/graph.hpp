#pragma once

#include <vector>

namespace crn {

using Adjacency = std::vector<std::vector<int>>;

// Component label per node, labels numbered 0.. in order of first appearance.
std::vector<int> strongly_connected_components(const Adjacency& out_edges);

// Nodes reachable from `start` following out-edges.
std::vector<bool> reachable_from(const Adjacency& out_edges, int start);

}  // namespace crn
