#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "jumbo/search_space.hpp"

using namespace jumbo;

namespace {

SearchSpace mixed_space() {
  SearchSpace space;
  space.vars = {VarSpec::continuous(-1.0, 2.0), VarSpec::integer(0, 5),
                VarSpec::categorical(3)};
  return space;
}

}  // namespace

TEST_CASE("encoded width counts one-hot blocks") {
  REQUIRE(mixed_space().encoded_dim() == 5);
  SearchSpace single;
  single.vars = {VarSpec::continuous(0.0, 1.0)};
  REQUIRE(single.encoded_dim() == 1);
}

TEST_CASE("box bounds cover each encoded coordinate") {
  VectorXd lo, hi;
  space_box(mixed_space(), lo, hi);
  REQUIRE(lo.size() == 5);
  REQUIRE(lo(0) == -1.0);
  REQUIRE(hi(0) == 2.0);
  REQUIRE(lo(1) == 0.0);
  REQUIRE(hi(1) == 5.0);
  for (int i = 2; i < 5; ++i) {
    REQUIRE(lo(i) == 0.0);
    REQUIRE(hi(i) == 1.0);
  }
}

TEST_CASE("encoding transform is idempotent on random box points") {
  SearchSpace space = mixed_space();
  VectorXd lo, hi;
  space_box(space, lo, hi);
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 10000; ++rep) {
    VectorXd x(5);
    for (int i = 0; i < 5; ++i) x(i) = lo(i) + unif(rng) * (hi(i) - lo(i));
    const VectorXd once = transform_encoded(space, x);
    const VectorXd twice = transform_encoded(space, once);
    REQUIRE((once - twice).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("integer coordinates round half up and clamp") {
  SearchSpace space;
  space.vars = {VarSpec::integer(0, 5)};
  auto round_of = [&](double v) {
    VectorXd x(1);
    x << v;
    return transform_encoded(space, x)(0);
  };
  REQUIRE(round_of(0.49) == 0.0);
  REQUIRE(round_of(0.5) == 1.0);
  REQUIRE(round_of(4.6) == 5.0);
  REQUIRE(round_of(5.0) == 5.0);
  REQUIRE(round_of(0.0) == 0.0);
}

TEST_CASE("categorical blocks snap to the strongest coordinate") {
  SearchSpace space;
  space.vars = {VarSpec::categorical(3)};
  VectorXd x(3);
  x << 0.2, 0.9, 0.3;
  VectorXd t = transform_encoded(space, x);
  REQUIRE(t(0) == 0.0);
  REQUIRE(t(1) == 1.0);
  REQUIRE(t(2) == 0.0);

  // Exact ties resolve to the lowest index.
  x << 0.7, 0.7, 0.1;
  t = transform_encoded(space, x);
  REQUIRE(t(0) == 1.0);
  REQUIRE(t(1) == 0.0);
}

TEST_CASE("points outside the box are rejected, boundary slack is accepted") {
  SearchSpace space;
  space.vars = {VarSpec::continuous(0.0, 1.0)};
  VectorXd x(1);
  x << -1e-10;
  REQUIRE(transform_encoded(space, x)(0) == 0.0);  // clamped
  x << 1.0 + 1e-10;
  REQUIRE(transform_encoded(space, x)(0) == 1.0);
  x << -1e-6;
  REQUIRE_THROWS_AS(transform_encoded(space, x), std::invalid_argument);
  x << 1.5;
  REQUIRE_THROWS_AS(transform_encoded(space, x), std::invalid_argument);
}

TEST_CASE("sampled points are valid encoded points") {
  SearchSpace space = mixed_space();
  std::mt19937_64 rng(83);
  for (int rep = 0; rep < 200; ++rep) {
    const VectorXd x = sample_point(space, rng);
    const VectorXd t = transform_encoded(space, x);
    REQUIRE((x - t).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(x(0) >= -1.0);
    REQUIRE(x(0) <= 2.0);
    REQUIRE(x(1) == std::floor(x(1)));
    REQUIRE(x.segment(2, 3).sum() == 1.0);
  }
}

TEST_CASE("invalid spaces are rejected") {
  SearchSpace empty;
  REQUIRE_THROWS_AS(validate(empty), std::invalid_argument);
  SearchSpace bad;
  bad.vars = {VarSpec::continuous(1.0, 1.0)};
  REQUIRE_THROWS_AS(validate(bad), std::invalid_argument);
  bad.vars = {VarSpec::integer(0.5, 2.0)};
  REQUIRE_THROWS_AS(validate(bad), std::invalid_argument);
  bad.vars = {VarSpec::categorical(1)};
  REQUIRE_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("wrong encoded width is rejected") {
  SearchSpace space = mixed_space();
  VectorXd x(4);
  x.setZero();
  REQUIRE_THROWS_AS(transform_encoded(space, x), std::invalid_argument);
}
