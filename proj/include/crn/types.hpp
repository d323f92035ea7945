#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <functional>

namespace crn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::VectorXi;

// A lattice point of the stochastic model: molecule counts in species order.
using State = Eigen::VectorXi;

// Lexicographic order so states can key ordered maps deterministically.
struct StateLess {
  bool operator()(const State& a, const State& b) const {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
  }
};

inline bool nonnegative(const State& x) { return (x.array() >= 0).all(); }

}  // namespace crn
