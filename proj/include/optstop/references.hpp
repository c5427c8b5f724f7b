#pragma once

#include <cstddef>
#include <span>

namespace optstop {

// Published benchmark values. They are used for report deltas only and never
// feed into a computation.

struct PutReference {
  double sigma;
  double x0;
  double maturity;
  std::size_t steps;
  double v_train;
  double ls_train;
  double v_test;
  double ls_test;
};

struct MaxCallReference {
  std::size_t dim;
  double x0;
  double v_test_four_features;
  double v_test_raw_plus_reward;
  double v_test_raw;
  double neural_net;            // lower bound of the neural-network method, same test data
  double neural_net_published;  // value reported by the neural-network authors
};

struct BarrierReference {
  std::size_t dim;
  double x0;
  double v_test;
  double single_tree;            // single-tree lower bound, same test data
  double single_tree_published;  // value reported by the single-tree authors
};

std::span<const PutReference> put_references();
std::span<const MaxCallReference> max_call_references(bool symmetric);
std::span<const BarrierReference> barrier_references();

}  // namespace optstop
