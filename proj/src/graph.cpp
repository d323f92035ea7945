#include "crn/graph.hpp"

#include <algorithm>
#include <utility>

namespace crn {

// Iterative Tarjan; generators of truncated chains can have tens of thousands
// of states, too deep for recursion.
std::vector<int> strongly_connected_components(const Adjacency& out_edges) {
  const int n = static_cast<int>(out_edges.size());
  std::vector<int> index(n, -1), low(n, 0), label(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> frames;
  int counter = 0;
  int components = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < out_edges[v].size()) {
        const int w = out_edges[v][next++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w = -1;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          label[w] = components;
        } while (w != v);
        ++components;
      }
      const int finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const int parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }

  // Relabel in order of first appearance for stable output.
  std::vector<int> remap(components, -1);
  int next_label = 0;
  for (int& l : label) {
    if (remap[l] < 0) remap[l] = next_label++;
    l = remap[l];
  }
  return label;
}

std::vector<bool> reachable_from(const Adjacency& out_edges, int start) {
  std::vector<bool> seen(out_edges.size(), false);
  std::vector<int> todo{start};
  seen[start] = true;
  while (!todo.empty()) {
    const int v = todo.back();
    todo.pop_back();
    for (int w : out_edges[v]) {
      if (!seen[w]) {
        seen[w] = true;
        todo.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace crn
