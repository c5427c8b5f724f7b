#include <doctest.h>

#include <random>
#include <sstream>
#include <vector>

#include "optstop/cart.hpp"
#include "optstop/error.hpp"
#include "../oracles.hpp"

using namespace optstop;

namespace {

SampleSet make_set(std::size_t dim, const std::vector<double>& points,
                   const std::vector<double>& deltas) {
  return removal(points, dim, deltas);
}

SampleSet cross_example() {
  return make_set(2, {2, 6, 5, 5, 3, 3, 6, 2}, {2, -0.5, -0.5, 2});
}

// Small grids make ties and repeated coordinates common; dyadic increments
// keep every partial sum exact.
SampleSet random_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 20), dims(1, 3), coord(0, 5), num(-16, 16);
  const std::size_t p = size(rng), d = dims(rng);
  std::vector<double> pts, del;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < d; ++j) pts.push_back(coord(rng));
    del.push_back(num(rng) / 8.0);
  }
  return removal(pts, d, del);
}

}  // namespace

TEST_CASE("removal merges equal points with mean increment and multiplicity") {
  auto s = make_set(1, {4, 4}, {2, -1});
  REQUIRE(s.size() == 1);
  CHECK(s.delta(0) == 0.5);
  CHECK(s.multiplicity(0) == 2);

  auto t = make_set(2, {1, 1, 1, 1, 1, 1}, {3, 0, 0});
  REQUIRE(t.size() == 1);
  CHECK(t.delta(0) == 1.0);
  CHECK(t.multiplicity(0) == 3);
  CHECK(t.weight(0) == 3.0);
}

TEST_CASE("removal keeps distinct points in input order") {
  auto s = make_set(1, {3, 1, 2}, {0.1, 0.2, 0.3});
  REQUIRE(s.size() == 3);
  CHECK(s.coord(0, 0) == 3);
  CHECK(s.coord(2, 0) == 2);
  CHECK(s.multiplicity(1) == 1);
  CHECK(s.delta(1) == 0.2);
}

TEST_CASE("removal preserves the weighted sum") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    std::uniform_int_distribution<int> coord(0, 2), num(-8, 8);
    std::vector<double> pts, del;
    double total = 0.0;
    for (int i = 0; i < 30; ++i) {
      pts.push_back(coord(rng));
      pts.push_back(coord(rng));
      del.push_back(num(rng) / 4.0);
      total += del.back();
    }
    const auto s = removal(pts, 2, del);
    double merged = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) merged += s.weight(i);
    CHECK(merged == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("four-point cross example turns the root into a leaf") {
  const auto d = delta_split(cross_example());
  CHECK(d.is_leaf);
  CHECK(d.weight == 0);
  CHECK(d.score == 2.0);
  CHECK(d.total == 3.0);
  const auto tree = grow(cross_example(), GrowConfig{10, 1, Splitter::delta});
  CHECK(tree.node_count() == 1);
  const std::vector<double> x{100.0, -7.0};
  CHECK(tree.predict(x) == 0);
}

TEST_CASE("same-sign increments give a stopping leaf") {
  const auto d = delta_split(make_set(1, {1, 2, 3}, {-1, -0.5, -2}));
  CHECK(d.is_leaf);
  CHECK(d.weight == 1);
}

TEST_CASE("one-dimensional split example") {
  const auto d = delta_split(make_set(1, {1, 2, 3, 4}, {-1, -1, 1, 1}));
  REQUIRE_FALSE(d.is_leaf);
  CHECK(d.dim == 0);
  CHECK(d.threshold == 2.0);
  CHECK(d.score == 2.0);
}

TEST_CASE("prototype splitter") {
  const auto single = prototype_split(make_set(1, {7}, {-0.2}));
  CHECK(single.is_leaf);
  CHECK(single.weight == 1);
  const auto cross = prototype_split(cross_example());
  CHECK_FALSE(cross.is_leaf);
  CHECK(cross.score == 2.0);
  const auto pair = prototype_split(make_set(1, {1, 2}, {5, 5}));
  REQUIRE_FALSE(pair.is_leaf);
  CHECK(pair.threshold == 1.0);
}

TEST_CASE("empty input is rejected") {
  SampleSet empty(1);
  CHECK_THROWS_AS(delta_split(empty), ParameterError);
  CHECK_THROWS_AS(prototype_split(empty), ParameterError);
}

TEST_CASE("delta split agrees with exhaustive enumeration") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 300; ++rep) {
    const auto s = random_set(rng);
    const auto got = delta_split(s);
    const auto want = oracle::exhaustive_delta_split(s);
    REQUIRE(got.is_leaf == want.is_leaf);
    if (got.is_leaf) {
      CHECK(got.weight == want.weight);
    } else {
      CHECK(got.dim == want.dim);
      CHECK(got.threshold == want.threshold);
      CHECK(got.score == want.score);
    }
  }
}

TEST_CASE("grow limits") {
  const auto s = make_set(1, {1, 2, 3, 4}, {-1, -1, 1, 1});
  const auto root = grow(s, GrowConfig{0, 1, Splitter::delta});
  CHECK(root.node_count() == 1);
  CHECK(root.nodes()[0].weight == 1);  // total 0 stops
  const auto small = grow(s, GrowConfig{10, 5, Splitter::delta});
  CHECK(small.node_count() == 1);
  const auto full = grow(s, GrowConfig{10, 1, Splitter::delta});
  CHECK(full.depth() == 1);
  CHECK(full.leaf_count() == 2);
  const std::vector<double> lo{2.0}, hi{3.0};
  CHECK(full.predict(lo) == 1);
  CHECK(full.predict(hi) == 0);
}

TEST_CASE("prototype tree separates every point") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = random_set(rng);
    const auto tree = grow(s, GrowConfig{64, 1, Splitter::prototype});
    CHECK(tree.leaf_count() == s.size());
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const int g = tree.predict(s.point(i));
      CHECK(g == (s.delta(i) <= 0.0 ? 1 : 0));
      lhs += s.weight(i) * g;
      rhs += std::min(s.weight(i), 0.0);
    }
    CHECK(lhs == rhs);
  }
}

TEST_CASE("predict sends boundary values left") {
  using Node = CartTree::Node;
  std::vector<Node> nodes(3);
  nodes[0] = Node{0, 2.0, 1, 2, 0};
  nodes[1].weight = 1;
  nodes[2].weight = 0;
  const CartTree tree(1, nodes);
  const std::vector<double> at{2.0}, above{2.0001};
  CHECK(tree.predict(at) == 1);
  CHECK(tree.predict(above) == 0);
  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(tree.predict(wrong), DimensionError);
  const auto one = CartTree::leaf(3, 1);
  const std::vector<double> any{-5.0, 0.0, 9.0};
  CHECK(one.predict(any) == 1);
}

TEST_CASE("tree text dump round trip") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto tree = grow(random_set(rng), GrowConfig{6, 1, Splitter::delta});
    std::stringstream buf;
    tree.write(buf);
    const auto back = CartTree::read(buf);
    CHECK(back == tree);
  }
}
