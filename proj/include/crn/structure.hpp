#pragma once

#include "crn/network.hpp"
#include "crn/types.hpp"

#include <vector>

namespace crn {

/// Structural invariants of the complex graph.
struct StructureReport {
  int num_complexes = 0;
  int num_linkage_classes = 0;
  int stoich_dim = 0;
  int deficiency = 0;
  bool weakly_reversible = false;
  std::vector<std::vector<int>> linkage_partition;
};

/// Connected components of the undirected complex graph. Each class lists
/// complex indices in increasing order; classes are ordered by their smallest
/// member.
std::vector<std::vector<int>> linkage_classes(const ReactionNetwork& net);

/// True iff every linkage class is strongly connected as a directed graph.
///
/// Note the whole graph is never strongly connected once there are two or
/// more linkage classes, so the per-class reading is the only useful one.
bool is_weakly_reversible(const ReactionNetwork& net);

// Rank of the reaction vectors, by exact rational elimination.
int stoich_dimension(const ReactionNetwork& net);

StructureReport deficiency(const ReactionNetwork& net);

/// Integer basis of the left null space of the stoichiometric matrix, one
/// conservation law per row ((m - s) x m). Every row w satisfies
/// w . (y_k' - y_k) = 0 exactly.
Matrix conservation_laws(const ReactionNetwork& net);

// Indices of s reactions whose reaction vectors form a basis of the
// stoichiometric subspace (first independent ones in reaction order).
std::vector<int> stoich_basis_reactions(const ReactionNetwork& net);

}  // namespace crn
