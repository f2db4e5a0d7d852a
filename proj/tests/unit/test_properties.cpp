#include <doctest.h>

#include "../support/properties.hpp"

using namespace rkhs::testing;

namespace {

void require(const PropertyResult& r) {
  INFO(r.name << ": " << r.detail);
  CHECK(r.ok);
  CHECK(r.cases > 0);
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("pythagoras over 200 random nested cases") { require(check_pythagoras(200)); }
TEST_CASE("norm monotonicity along schedules") { require(check_norm_monotonicity()); }
TEST_CASE("node exactness") { require(check_node_exactness()); }
TEST_CASE("power function") { require(check_power_function()); }
TEST_CASE("error bound validity") { require(check_bound_validity()); }
TEST_CASE("finite expansion recovery") { require(check_finite_expansion_recovery()); }
TEST_CASE("fit model recovery") { require(check_fit_recovery()); }
TEST_CASE("oracle agreement") { require(check_oracle_agreement()); }

TEST_CASE("random nested cases are reproducible") {
  const NestedCase a = random_nested_case(99);
  const NestedCase b = random_nested_case(99);
  CHECK(a.fine.points() == b.fine.points());
  CHECK(a.values == b.values);
  CHECK(a.coarse.size() <= a.fine.size());
}

}
