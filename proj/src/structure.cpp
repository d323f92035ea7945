#include "crn/structure.hpp"

#include "crn/graph.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <numeric>

namespace crn {
namespace {

using Rational = boost::multiprecision::cpp_rational;
using RationalMatrix = std::vector<std::vector<Rational>>;

RationalMatrix to_rational(const Eigen::MatrixXi& m) {
  RationalMatrix out(m.rows(), std::vector<Rational>(m.cols()));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  }
  return out;
}

// Reduced row echelon form in place; returns the pivot column of each
// nonzero row.
std::vector<int> rref(RationalMatrix& a) {
  std::vector<int> pivots;
  if (a.empty()) return pivots;
  const std::size_t rows = a.size();
  const std::size_t cols = a[0].size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[row], a[pivot]);
    const Rational lead = a[row][col];
    for (auto& v : a[row]) v /= lead;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || a[r][col] == 0) continue;
      const Rational factor = a[r][col];
      for (std::size_t c = col; c < cols; ++c) a[r][c] -= factor * a[row][c];
    }
    pivots.push_back(static_cast<int>(col));
    ++row;
  }
  return pivots;
}

}  // namespace

std::vector<std::vector<int>> linkage_classes(const ReactionNetwork& net) {
  const int n = net.num_complexes();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (int k = 0; k < net.num_reactions(); ++k) {
    const int a = find(net.source_index(k));
    const int b = find(net.product_index(k));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of_root(n, -1);
  for (int z = 0; z < n; ++z) {
    const int root = find(z);
    if (class_of_root[root] < 0) {
      class_of_root[root] = static_cast<int>(classes.size());
      classes.emplace_back();
    }
    classes[class_of_root[root]].push_back(z);
  }
  return classes;
}

bool is_weakly_reversible(const ReactionNetwork& net) {
  Adjacency edges(net.num_complexes());
  for (int k = 0; k < net.num_reactions(); ++k) {
    edges[net.source_index(k)].push_back(net.product_index(k));
  }
  // Strong components refine linkage classes; equal counts means each class
  // is a single strong component.
  const auto scc = strongly_connected_components(edges);
  const int num_scc = scc.empty() ? 0 : *std::max_element(scc.begin(), scc.end()) + 1;
  return num_scc == static_cast<int>(linkage_classes(net).size());
}

int stoich_dimension(const ReactionNetwork& net) {
  RationalMatrix gamma = to_rational(net.stoichiometric_matrix());
  return static_cast<int>(rref(gamma).size());
}

std::vector<int> stoich_basis_reactions(const ReactionNetwork& net) {
  RationalMatrix gamma = to_rational(net.stoichiometric_matrix());
  return rref(gamma);
}

StructureReport deficiency(const ReactionNetwork& net) {
  StructureReport report;
  report.num_complexes = net.num_complexes();
  report.linkage_partition = linkage_classes(net);
  report.num_linkage_classes = static_cast<int>(report.linkage_partition.size());
  report.stoich_dim = stoich_dimension(net);
  report.deficiency =
      report.num_complexes - report.num_linkage_classes - report.stoich_dim;
  report.weakly_reversible = is_weakly_reversible(net);
  return report;
}

Matrix conservation_laws(const ReactionNetwork& net) {
  const int m = net.num_species();
  // Left null space of Gamma = null space of Gamma^T (K x m).
  RationalMatrix a = to_rational(net.stoichiometric_matrix().transpose());
  const std::vector<int> pivots = rref(a);
  std::vector<bool> is_pivot(m, false);
  for (int p : pivots) is_pivot[p] = true;

  Matrix laws(m - static_cast<int>(pivots.size()), m);
  int row = 0;
  for (int free = 0; free < m; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> w(m, Rational(0));
    w[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) w[pivots[r]] = -a[r][free];

    // Scale to a primitive integer vector.
    using boost::multiprecision::cpp_int;
    cpp_int scale = 1;
    for (const auto& v : w) {
      const cpp_int den = boost::multiprecision::denominator(v);
      scale = scale / boost::multiprecision::gcd(scale, den) * den;
    }
    cpp_int g = 0;
    for (const auto& v : w) {
      const cpp_int num = boost::multiprecision::numerator(Rational(v * scale));
      g = boost::multiprecision::gcd(g, num < 0 ? cpp_int(-num) : num);
    }
    if (g == 0) g = 1;
    for (int i = 0; i < m; ++i) {
      const cpp_int num = boost::multiprecision::numerator(Rational(w[i] * scale)) / g;
      laws(row, i) = num.convert_to<double>();
    }
    ++row;
  }
  return laws;
}

}  // namespace crn
