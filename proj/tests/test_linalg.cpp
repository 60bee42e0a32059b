#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <vector>

#include "nashseek/linalg.hpp"

using namespace nashseek;

TEST_CASE("dot, norms, distances on small hand vectors") {
  const std::vector<double> a{1.0, -2.0, 3.0};
  const std::vector<double> b{4.0, 0.5, -1.0};
  CHECK(dot(a, b) == 0.0);
  CHECK(squared_norm(a) == 14.0);
  CHECK(norm(std::vector<double>{3.0, 4.0}) == 5.0);
  CHECK(squared_distance(a, b) == 9.0 + 6.25 + 16.0);
  CHECK(sum(a) == 2.0);
}

TEST_CASE("axpy and copy_into mutate the destination") {
  std::vector<double> y{1.0, 1.0};
  axpy(2.0, std::vector<double>{3.0, -1.0}, y);
  CHECK(y == std::vector<double>{7.0, -1.0});
  copy_into(std::vector<double>{5.0, 6.0}, y);
  CHECK(y == std::vector<double>{5.0, 6.0});
}

TEST_CASE("size mismatches throw") {
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{1.0};
  CHECK_THROWS(dot(a, b));
  CHECK_THROWS(squared_distance(a, b));
  std::vector<double> y{0.0};
  CHECK_THROWS(axpy(1.0, a, y));
  CHECK_THROWS(copy_into(a, y));
}

TEST_CASE("all_finite flags NaN and infinity") {
  CHECK(all_finite(std::vector<double>{0.0, -1e308}));
  CHECK_FALSE(all_finite(std::vector<double>{
      0.0, std::numeric_limits<double>::quiet_NaN()}));
  CHECK_FALSE(
      all_finite(std::vector<double>{std::numeric_limits<double>::infinity()}));
}
