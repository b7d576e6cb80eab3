#include <doctest.h>

#include "properties.hpp"

using namespace tropical;

namespace {

void expect(const properties::Result& r, std::size_t min_cases) {
  INFO(r.name << ": " << r.first_failure);
  CHECK(r.cases >= min_cases);
  CHECK(r.failures == 0);
  CHECK(r.ok());
}

}  // namespace

TEST_CASE("dominant term agrees with the naive scan") { expect(properties::dom_agreement(101), 1000); }

TEST_CASE("equilibration pieces cover exactly the integer solutions") {
  expect(properties::equilibration_completeness(202), 1000);
}

TEST_CASE("renormalization identity") { expect(properties::renormalization_identity(303), 1000); }

TEST_CASE("permanency classification against integration") { expect(properties::permanency_grid(404), 1000); }

TEST_CASE("finite difference thresholds") { expect(properties::finite_difference_thresholds(505), 1000); }
