// Randomized invariants over 100 models each, with seeds different from the
// acceptance runner.

#include "doctest.h"
#include "properties.hpp"

using namespace carma::testing;

namespace {

void require_ok(const PropertyResult& r) {
    INFO(r.detail);
    CHECK(r.ok);
    CHECK(r.cases == 100);
}

}  // namespace

TEST_CASE("property: factorized MA polynomial is minimum phase") { require_ok(min_phase_property(100, 1)); }

TEST_CASE("property: factorization round trip") { require_ok(factorization_round_trip_property(100, 2)); }

TEST_CASE("property: Wold identity") { require_ok(wold_identity_property(100, 3)); }

TEST_CASE("property: filter round trip") { require_ok(filter_round_trip_property(100, 4)); }

TEST_CASE("property: residue and matrix-exponential kernels agree") { require_ok(kernel_equivalence_property(100, 5)); }

TEST_CASE("property: filtered process is (p-1)-dependent") { require_ok(dependence_property(100, 6)); }
