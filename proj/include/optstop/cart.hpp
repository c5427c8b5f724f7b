#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace optstop {

/// Deduplicated (point, increment) training data for one tree.
///
/// Each entry holds the group average of the increments of all inputs that
/// share the point, together with the group size. Split scores and leaf
/// decisions use the product multiplicity * delta, so sums over the set equal
/// sums over the original (undeduplicated) inputs.
class SampleSet {
 public:
  explicit SampleSet(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return delta_.size(); }
  bool empty() const { return delta_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {points_.data() + i * dim_, dim_};
  }
  double coord(std::size_t i, std::size_t d) const { return points_[i * dim_ + d]; }
  double delta(std::size_t i) const { return delta_[i]; }
  std::size_t multiplicity(std::size_t i) const { return multiplicity_[i]; }
  double weight(std::size_t i) const {
    return static_cast<double>(multiplicity_[i]) * delta_[i];
  }

  void push_back(std::span<const double> point, double delta,
                 std::size_t multiplicity = 1);

 private:
  std::size_t dim_;
  std::vector<double> points_;
  std::vector<double> delta_;
  std::vector<std::size_t> multiplicity_;
};

/// Merges exactly-equal points (row-major `points`, `dim` columns). Output
/// keeps first-occurrence order; each group carries its mean increment and size.
SampleSet removal(std::span<const double> points, std::size_t dim,
                  std::span<const double> deltas);

struct SplitDecision {
  bool is_leaf = true;
  int weight = 1;          // leaf only: 1 = STOP, 0 = CONTINUE
  std::size_t dim = 0;     // split only
  double threshold = 0.0;  // split only: left iff x[dim] <= threshold
  std::size_t position = 0;  // split only: number of samples routed left
  double score = 0.0;      // best partial-sum score seen (0 if none)
  double total = 0.0;      // sum of multiplicity * delta over the node
};

/// Leaf weight for a node whose weighted increments sum to `total`.
constexpr int leaf_weight(double total) { return total > 0.0 ? 0 : 1; }

/// Data-driven splitter: splits only when the best partial-sum score
/// max(|prefix|, |total - prefix|) strictly exceeds |total|.
SplitDecision delta_split(const SampleSet& samples);

/// Unconditional splitter: splits every node with more than one sample.
SplitDecision prototype_split(const SampleSet& samples);

enum class Splitter { delta, prototype };

std::string_view to_string(Splitter s);
Splitter parse_splitter(std::string_view text);

struct GrowConfig {
  std::size_t max_depth = 10;
  std::size_t min_node_size = 10;
  Splitter splitter = Splitter::delta;

  void validate() const;
};

/// Binary tree with {0,1} leaves stored in a pre-order node arena.
class CartTree {
 public:
  struct Node {
    static constexpr std::uint32_t kNone = 0xffffffffu;
    std::uint32_t dim = kNone;  // kNone marks a leaf
    double threshold = 0.0;
    std::uint32_t left = kNone;
    std::uint32_t right = kNone;
    int weight = 0;

    bool is_leaf() const { return dim == kNone; }
  };

  CartTree() = default;
  CartTree(std::size_t input_dim, std::vector<Node> nodes);

  static CartTree leaf(std::size_t input_dim, int weight);

  int predict(std::span<const double> x) const;
  // Same as predict without the dimension check.
  int predict_unchecked(const double* x) const {
    std::uint32_t i = 0;
    while (!nodes_[i].is_leaf()) {
      const Node& node = nodes_[i];
      i = x[node.dim] <= node.threshold ? node.left : node.right;
    }
    return nodes_[i].weight;
  }

  std::size_t input_dim() const { return input_dim_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Text format:
  ///   tree <input_dim> <node_count>
  ///   <id> split <dim> <threshold> <left> <right>
  ///   <id> leaf <weight>
  /// Thresholds are printed with 17 significant digits and round-trip exactly.
  void write(std::ostream& out) const;
  static CartTree read(std::istream& in);

  friend bool operator==(const CartTree& a, const CartTree& b);

 private:
  void validate() const;

  std::size_t input_dim_ = 0;
  std::vector<Node> nodes_;
};

CartTree grow(const SampleSet& samples, const GrowConfig& config);

}  // namespace optstop
