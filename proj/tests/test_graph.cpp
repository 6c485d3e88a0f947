#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "maxent/edge_csv.hpp"
#include "maxent/graph.hpp"

using namespace maxent;
using Catch::Approx;

TEST_CASE("degrees of small graphs", "[graph]") {
  const auto g = WeightedGraph::from_dense(3, {0, 1, 1, 1, 0, 1, 1, 1, 0});
  CHECK(degrees(g) == std::vector<double>{2, 2, 2});
  CHECK(degrees(WeightedGraph(4)) == std::vector<double>(4, 0.0));
}

TEST_CASE("degrees match a double loop", "[graph]") {
  Rng rng(99);
  const std::size_t n = 5;
  std::vector<double> dense(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dense[i * n + j] = dense[j * n + i] = static_cast<double>(rng() % 7);
    }
  }
  const auto g = WeightedGraph::from_dense(n, dense);
  const auto d = degrees(g);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += dense[i * n + j];
    CHECK(d[i] == s);
  }
}

TEST_CASE("dense input is validated", "[graph]") {
  CHECK_THROWS_AS(WeightedGraph::from_dense(2, {0, 1, 2, 0}), ValidationError);
  CHECK_THROWS_AS(WeightedGraph::from_dense(2, {1, 0, 0, 0}), ValidationError);
  CHECK_THROWS_AS(WeightedGraph::from_dense(2, {0, -1, -1, 0}), ValidationError);
  CHECK_THROWS_AS(WeightedGraph::from_dense(2, {0, 1, 1}), ValidationError);
  WeightedGraph g(3);
  CHECK_THROWS_AS(g.set_edge(1, 1, 1.0), ValidationError);
  g.set_edge(0, 2, 1.5);
  CHECK(g(2, 0) == 1.5);
  CHECK_THROWS_AS(g.validate_for(WeightModel::infinite_discrete()), ValidationError);
  CHECK_NOTHROW(g.validate_for(WeightModel::continuous()));
  g.set_edge(0, 2, 3.0);
  CHECK_THROWS_AS(g.validate_for(WeightModel::finite_discrete(3)), ValidationError);
}

TEST_CASE("pair sum range", "[graph]") {
  const std::vector<double> theta = {0.3, -0.1, 2.0, 0.5};
  const auto r = pair_sum_range(theta);
  CHECK(r.min == Approx(0.2));
  CHECK(r.max == Approx(2.5));
}

TEST_CASE("feasibility names the pair", "[graph]") {
  const std::vector<double> theta = {1.0, 0.5, -0.6};
  try {
    require_feasible(WeightModel::continuous(), theta);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("(2,3)") != std::string::npos);
  }
  CHECK_NOTHROW(require_feasible(WeightModel::finite_discrete(2), theta));
}

TEST_CASE("sampling is deterministic for a seed", "[graph][sampler]") {
  const std::vector<double> theta = {0.4, 0.9, 1.3, 0.2, 0.7};
  Rng a(42);
  Rng b(42);
  const auto g1 = sample_graph(WeightModel::continuous(), theta, a);
  const auto g2 = sample_graph(WeightModel::continuous(), theta, b);
  CHECK(g1 == g2);
  Rng c(43);
  CHECK_FALSE(g1 == sample_graph(WeightModel::continuous(), theta, c));
  for (std::size_t i = 0; i < 5; ++i) CHECK(g1(i, i) == 0.0);
}

TEST_CASE("Bernoulli graph at theta = 0", "[graph][sampler]") {
  const std::vector<double> theta(6, 0.0);
  Rng rng(5);
  double ones = 0.0;
  double edges = 0.0;
  for (int rep = 0; rep < 2000; ++rep) {
    const auto g = sample_graph(WeightModel::finite_discrete(2), theta, rng);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        REQUIRE((g(i, j) == 0.0 || g(i, j) == 1.0));
        ones += g(i, j);
        edges += 1.0;
      }
    }
  }
  const double se = std::sqrt(0.25 / edges);
  CHECK(std::abs(ones / edges - 0.5) < 5.0 * se);
}

TEST_CASE("expected degree of a symmetric exponential graph", "[graph][sampler]") {
  const std::vector<double> theta = {1.0, 1.0, 1.0};
  Rng rng(11);
  const int reps = 100000;
  double sum = 0.0;
  for (int k = 0; k < reps; ++k) sum += degrees(sample_graph(WeightModel::continuous(), theta, rng))[0];
  // d_1 is a sum of two Exp(2) draws: mean 1, variance 2 / 4
  const double se = std::sqrt(0.5 / reps);
  CHECK(std::abs(sum / reps - 1.0) < 5.0 * se);
}

TEST_CASE("edge list round trip", "[csv]") {
  WeightedGraph g(4);
  g.set_edge(0, 1, 2.0);
  g.set_edge(1, 3, 0.125);
  g.set_edge(2, 3, 7.0);
  std::stringstream buf;
  write_edge_list(buf, g);
  const auto back = read_edge_list(buf);
  CHECK(back == g);
}

TEST_CASE("edge list parsing", "[csv]") {
  std::istringstream in("i,j,weight\n1,2,3\n\n 2 , 3 , 0.5 \n");
  const auto g = read_edge_list(in);
  CHECK(g.size() == 3);
  CHECK(g(1, 0) == 3.0);
  CHECK(g(2, 1) == 0.5);

  std::istringstream padded("i,j,weight\n1,2,1\n");
  CHECK(read_edge_list(padded, 5).size() == 5);
}

namespace {

std::size_t error_line(const std::string& text, std::optional<std::size_t> n = std::nullopt) {
  std::istringstream in(text);
  try {
    read_edge_list(in, n);
  } catch (const CsvError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("edge list errors carry line numbers", "[csv]") {
  CHECK(error_line("a,b,c\n") == 1);
  CHECK(error_line("i,j,weight\n1,2,1\n1,2,x\n") == 3);
  CHECK(error_line("i,j,weight\n1,2\n") == 2);
  CHECK(error_line("i,j,weight\n1,1,1\n") == 2);
  CHECK(error_line("i,j,weight\n0,1,1\n") == 2);
  CHECK(error_line("i,j,weight\n1,2,-1\n") == 2);
  CHECK(error_line("i,j,weight\n1,2,1\n2,1,1\n") == 3);
  CHECK(error_line("i,j,weight\n1,2,inf\n") == 2);
  CHECK(error_line("i,j,weight\n1,9,1\n", 4) == 2);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_edge_list(empty), CsvError);
}
