#include "optstop/cart.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "optstop/error.hpp"

namespace optstop {

void SampleSet::push_back(std::span<const double> point, double delta,
                          std::size_t multiplicity) {
  if (point.size() != dim_) {
    throw DimensionError(fmt::format("sample point has {} coordinates, expected {}",
                                     point.size(), dim_));
  }
  if (multiplicity == 0) throw ParameterError("sample multiplicity must be positive");
  points_.insert(points_.end(), point.begin(), point.end());
  delta_.push_back(delta);
  multiplicity_.push_back(multiplicity);
}

SampleSet removal(std::span<const double> points, std::size_t dim,
                  std::span<const double> deltas) {
  if (dim == 0) throw DimensionError("removal: dim must be positive");
  if (points.size() != deltas.size() * dim) {
    throw DimensionError("removal: points and deltas disagree in length");
  }
  const std::size_t count = deltas.size();
  auto row = [&](std::size_t i) { return points.subspan(i * dim, dim); };

  // Group equal rows by sorting indices lexicographically; ties keep index order.
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ra = row(a);
    auto rb = row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });

  struct Group {
    std::size_t first;
    double sum;
    std::size_t size;
  };
  std::vector<Group> groups;
  for (std::size_t pos = 0; pos < count;) {
    const auto head = row(order[pos]);
    Group g{order[pos], 0.0, 0};
    std::size_t end = pos;
    while (end < count && std::equal(head.begin(), head.end(), row(order[end]).begin())) {
      g.first = std::min(g.first, order[end]);
      g.sum += deltas[order[end]];
      ++g.size;
      ++end;
    }
    groups.push_back(g);
    pos = end;
  }
  std::sort(groups.begin(), groups.end(),
            [](const Group& a, const Group& b) { return a.first < b.first; });

  SampleSet out(dim);
  for (const auto& g : groups) {
    out.push_back(row(g.first), g.size == 1 ? g.sum : g.sum / static_cast<double>(g.size),
                  g.size);
  }
  return out;
}

namespace {

// Best split of the samples listed in `idx` (ascending sample indices).
SplitDecision find_split(const SampleSet& samples, std::span<const std::uint32_t> idx,
                         std::vector<std::uint32_t>& sorted) {
  SplitDecision best;
  double total = 0.0;
  for (auto i : idx) total += samples.weight(i);
  best.total = total;

  bool found = false;
  double best_score = 0.0;
  for (std::size_t d = 0; d < samples.dim(); ++d) {
    sorted.assign(idx.begin(), idx.end());
    std::stable_sort(sorted.begin(), sorted.end(), [&](std::uint32_t a, std::uint32_t b) {
      return samples.coord(a, d) < samples.coord(b, d);
    });
    double left = 0.0;
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      left += samples.weight(sorted[k]);
      const double here = samples.coord(sorted[k], d);
      if (!(here < samples.coord(sorted[k + 1], d))) continue;
      const double score = std::max(std::abs(left), std::abs(total - left));
      if (!found || score > best_score) {
        found = true;
        best_score = score;
        best.dim = d;
        best.threshold = here;
        best.position = k + 1;
      }
    }
  }
  best.score = best_score;
  best.is_leaf = !found;
  best.weight = leaf_weight(total);
  return best;
}

SplitDecision delta_decision(const SampleSet& samples, std::span<const std::uint32_t> idx,
                             std::vector<std::uint32_t>& scratch) {
  auto decision = find_split(samples, idx, scratch);
  if (decision.is_leaf || !(decision.score > std::abs(decision.total))) {
    decision.is_leaf = true;
  }
  return decision;
}

SplitDecision prototype_decision(const SampleSet& samples,
                                 std::span<const std::uint32_t> idx,
                                 std::vector<std::uint32_t>& scratch) {
  auto decision = find_split(samples, idx, scratch);
  if (idx.size() == 1) {
    decision.is_leaf = true;
  } else if (decision.is_leaf) {
    throw InternalError("prototype_split: no valid split among distinct points");
  }
  return decision;
}

std::vector<std::uint32_t> all_indices(const SampleSet& samples) {
  std::vector<std::uint32_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), 0u);
  return idx;
}

}  // namespace

SplitDecision delta_split(const SampleSet& samples) {
  if (samples.empty()) throw ParameterError("delta_split: empty sample set");
  std::vector<std::uint32_t> scratch;
  return delta_decision(samples, all_indices(samples), scratch);
}

SplitDecision prototype_split(const SampleSet& samples) {
  if (samples.empty()) throw ParameterError("prototype_split: empty sample set");
  std::vector<std::uint32_t> scratch;
  return prototype_decision(samples, all_indices(samples), scratch);
}

std::string_view to_string(Splitter s) {
  return s == Splitter::delta ? "delta" : "prototype";
}

Splitter parse_splitter(std::string_view text) {
  if (text == "delta") return Splitter::delta;
  if (text == "prototype") return Splitter::prototype;
  throw ParameterError(fmt::format("unknown splitter '{}'", text));
}

void GrowConfig::validate() const {
  if (min_node_size < 1) throw ParameterError("min_node_size must be at least 1");
}

CartTree::CartTree(std::size_t input_dim, std::vector<Node> nodes)
    : input_dim_(input_dim), nodes_(std::move(nodes)) {
  validate();
}

CartTree CartTree::leaf(std::size_t input_dim, int weight) {
  Node node;
  node.weight = weight;
  return CartTree(input_dim, {node});
}

void CartTree::validate() const {
  if (nodes_.empty()) throw ParameterError("tree: no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if (node.is_leaf()) {
      if (node.weight != 0 && node.weight != 1) {
        throw ParameterError(fmt::format("tree: node {} has weight {}", i, node.weight));
      }
      continue;
    }
    // Pre-order layout: children always follow their parent, so no cycles.
    if (node.dim >= input_dim_ || node.left <= i || node.right <= i ||
        node.left >= nodes_.size() || node.right >= nodes_.size()) {
      throw ParameterError(fmt::format("tree: node {} is malformed", i));
    }
  }
}

int CartTree::predict(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw DimensionError(fmt::format("predict: expected {} features, got {}", input_dim_,
                                     x.size()));
  }
  return predict_unchecked(x.data());
}

std::size_t CartTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t CartTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

bool operator==(const CartTree& a, const CartTree& b) {
  if (a.input_dim_ != b.input_dim_ || a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const auto& x = a.nodes_[i];
    const auto& y = b.nodes_[i];
    if (x.dim != y.dim || x.left != y.left || x.right != y.right) return false;
    if (x.is_leaf() ? x.weight != y.weight : x.threshold != y.threshold) return false;
  }
  return true;
}

void CartTree::write(std::ostream& out) const {
  out << fmt::format("tree {} {}\n", input_dim_, nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if (node.is_leaf()) {
      out << fmt::format("{} leaf {}\n", i, node.weight);
    } else {
      out << fmt::format("{} split {} {:.17g} {} {}\n", i, node.dim, node.threshold,
                         node.left, node.right);
    }
  }
}

CartTree CartTree::read(std::istream& in) {
  std::string line;
  std::string tag;
  std::size_t input_dim = 0, count = 0;
  if (!std::getline(in, line)) throw ConfigError("tree: unexpected end of input");
  {
    std::istringstream head(line);
    if (!(head >> tag >> input_dim >> count) || tag != "tree" || count == 0) {
      throw ConfigError(fmt::format("tree: bad header '{}'", line));
    }
  }
  std::vector<Node> nodes(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw ConfigError("tree: truncated node list");
    std::istringstream row(line);
    std::size_t id = 0;
    std::string kind;
    if (!(row >> id >> kind) || id != i) {
      throw ConfigError(fmt::format("tree: bad node line '{}'", line));
    }
    Node node;
    if (kind == "leaf") {
      if (!(row >> node.weight)) throw ConfigError("tree: bad leaf line");
    } else if (kind == "split") {
      std::string threshold;
      if (!(row >> node.dim >> threshold >> node.left >> node.right)) {
        throw ConfigError("tree: bad split line");
      }
      node.threshold = std::stod(threshold);
    } else {
      throw ConfigError(fmt::format("tree: unknown node kind '{}'", kind));
    }
    nodes[i] = node;
  }
  try {
    return CartTree(input_dim, std::move(nodes));
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

class Grower {
 public:
  Grower(const SampleSet& samples, const GrowConfig& config)
      : samples_(samples), config_(config) {}

  std::vector<CartTree::Node> run() {
    build(all_indices(samples_), 0);
    return std::move(nodes_);
  }

 private:
  std::uint32_t build(std::vector<std::uint32_t> idx, std::size_t depth) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    SplitDecision decision;
    if (depth >= config_.max_depth || idx.size() < config_.min_node_size) {
      double total = 0.0;
      for (auto i : idx) total += samples_.weight(i);
      decision.is_leaf = true;
      decision.weight = leaf_weight(total);
    } else if (config_.splitter == Splitter::delta) {
      decision = delta_decision(samples_, idx, scratch_);
    } else {
      decision = prototype_decision(samples_, idx, scratch_);
    }

    if (decision.is_leaf) {
      nodes_[id].weight = decision.weight;
      return id;
    }

    std::vector<std::uint32_t> left, right;
    left.reserve(decision.position);
    right.reserve(idx.size() - decision.position);
    for (auto i : idx) {
      (samples_.coord(i, decision.dim) <= decision.threshold ? left : right).push_back(i);
    }
    if (left.size() != decision.position) {
      throw InternalError("grow: threshold partition disagrees with split position");
    }
    idx.clear();
    idx.shrink_to_fit();

    nodes_[id].dim = static_cast<std::uint32_t>(decision.dim);
    nodes_[id].threshold = decision.threshold;
    const auto l = build(std::move(left), depth + 1);
    const auto r = build(std::move(right), depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  const SampleSet& samples_;
  const GrowConfig& config_;
  std::vector<CartTree::Node> nodes_;
  std::vector<std::uint32_t> scratch_;
};

}  // namespace

CartTree grow(const SampleSet& samples, const GrowConfig& config) {
  config.validate();
  if (samples.empty()) throw ParameterError("grow: empty sample set");
  return CartTree(samples.dim(), Grower(samples, config).run());
}

}  // namespace optstop
