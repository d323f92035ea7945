#pragma once

#include "crn/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crn {

// y -> y' with rate constant kappa. Complexes are count vectors over the
// network's species.
struct Reaction {
  IntVector source;
  IntVector product;
  double rate = 1.0;
};

/// Immutable reaction network {S, C, R}.
///
/// Species order is the declaration order and is the index order of every
/// vector in the library (complexes, states, equilibria, scaling exponents).
/// Complexes are deduplicated; each reaction refers to its source and product
/// complex by index so per-complex sums can iterate complexes directly.
class ReactionNetwork {
 public:
  /// Throws DomainError on empty/duplicate species, negative coefficients,
  /// self-loops, duplicate (source, product) pairs or non-positive rates.
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

  int num_species() const { return static_cast<int>(species_.size()); }
  int num_reactions() const { return static_cast<int>(reactions_.size()); }
  int num_complexes() const { return static_cast<int>(complexes_.size()); }

  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(int k) const { return reactions_[k]; }
  const std::vector<IntVector>& complexes() const { return complexes_; }
  const IntVector& complex(int z) const { return complexes_[z]; }

  int source_index(int k) const { return source_index_[k]; }
  int product_index(int k) const { return product_index_[k]; }

  // y_k' - y_k
  IntVector reaction_vector(int k) const {
    return reactions_[k].product - reactions_[k].source;
  }

  // m x K matrix whose columns are the reaction vectors.
  Eigen::MatrixXi stoichiometric_matrix() const;

  Vector rates() const;
  ReactionNetwork with_rates(const Vector& rates) const;

  std::optional<int> species_index(const std::string& name) const;

  friend bool operator==(const ReactionNetwork& a, const ReactionNetwork& b);

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  std::vector<IntVector> complexes_;
  std::vector<int> source_index_;
  std::vector<int> product_index_;
};

}  // namespace crn
