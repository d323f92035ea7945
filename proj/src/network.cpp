#include "crn/network.hpp"

#include "crn/errors.hpp"

#include <set>
#include <utility>

namespace crn {
namespace {

bool same_complex(const IntVector& a, const IntVector& b) {
  return a.size() == b.size() && a == b;
}

}  // namespace

ReactionNetwork::ReactionNetwork(std::vector<std::string> species,
                                 std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  if (species_.empty()) throw DomainError("network needs at least one species");
  if (reactions_.empty()) throw DomainError("network needs at least one reaction");
  std::set<std::string> seen;
  for (const auto& name : species_) {
    if (name.empty()) throw DomainError("empty species name");
    if (!seen.insert(name).second) throw DomainError("duplicate species '" + name + "'");
  }

  const int m = num_species();
  std::set<std::pair<int, int>> pairs;
  auto intern = [&](const IntVector& y) {
    for (int z = 0; z < num_complexes(); ++z) {
      if (same_complex(complexes_[z], y)) return z;
    }
    complexes_.push_back(y);
    return num_complexes() - 1;
  };

  for (std::size_t k = 0; k < reactions_.size(); ++k) {
    const Reaction& r = reactions_[k];
    const std::string where = "reaction " + std::to_string(k);
    if (r.source.size() != m || r.product.size() != m) {
      throw DomainError(where + ": complex length does not match species count");
    }
    if ((r.source.array() < 0).any() || (r.product.array() < 0).any()) {
      throw DomainError(where + ": negative stoichiometric coefficient");
    }
    if (!(r.rate > 0.0)) throw DomainError(where + ": rate constant must be positive");
    if (same_complex(r.source, r.product)) throw DomainError(where + ": self-loop");
    const int s = intern(r.source);
    const int p = intern(r.product);
    if (!pairs.emplace(s, p).second) throw DomainError(where + ": duplicate reaction");
    source_index_.push_back(s);
    product_index_.push_back(p);
  }
}

Eigen::MatrixXi ReactionNetwork::stoichiometric_matrix() const {
  Eigen::MatrixXi gamma(num_species(), num_reactions());
  for (int k = 0; k < num_reactions(); ++k) gamma.col(k) = reaction_vector(k);
  return gamma;
}

Vector ReactionNetwork::rates() const {
  Vector kappa(num_reactions());
  for (int k = 0; k < num_reactions(); ++k) kappa[k] = reactions_[k].rate;
  return kappa;
}

ReactionNetwork ReactionNetwork::with_rates(const Vector& rates) const {
  if (rates.size() != num_reactions()) throw DomainError("rate vector has wrong length");
  std::vector<Reaction> copy = reactions_;
  for (int k = 0; k < num_reactions(); ++k) copy[k].rate = rates[k];
  return ReactionNetwork(species_, std::move(copy));
}

std::optional<int> ReactionNetwork::species_index(const std::string& name) const {
  for (int i = 0; i < num_species(); ++i) {
    if (species_[i] == name) return i;
  }
  return std::nullopt;
}

bool operator==(const ReactionNetwork& a, const ReactionNetwork& b) {
  if (a.species_ != b.species_ || a.num_reactions() != b.num_reactions()) return false;
  for (int k = 0; k < a.num_reactions(); ++k) {
    const Reaction& ra = a.reactions_[k];
    const Reaction& rb = b.reactions_[k];
    if (ra.source != rb.source || ra.product != rb.product || ra.rate != rb.rate) {
      return false;
    }
  }
  return true;
}

}  // namespace crn
