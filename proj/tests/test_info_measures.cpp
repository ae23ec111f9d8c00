#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kellylab/info_measures.hpp"
#include "test_support.hpp"

using namespace kellylab;

namespace {

// Term-by-term long double summation, independent of the library path.
long double entropy_oracle(std::initializer_list<long double> p) {
  long double h = 0;
  for (auto x : p) {
    if (x > 0) h += x * std::log(1.0L / x);
  }
  return h;
}

}  // namespace

TEST_CASE("SimplexVector construction") {
  SUBCASE("renormalizes small drift") {
    const SimplexVector v({0.5 + 4e-10, 0.5});
    CHECK(v[0] + v[1] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("rejects large drift, negatives, non-finite and empty") {
    CHECK_THROWS_AS(SimplexVector({0.5, 0.6}), Error);
    CHECK_THROWS_AS(SimplexVector({1.1, -0.1}), Error);
    CHECK_THROWS_AS(SimplexVector({NAN, 1.0}), Error);
    CHECK_THROWS_AS(SimplexVector(std::vector<double>{}), Error);
    try {
      SimplexVector({0.2, 0.2});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidSimplex);
    }
  }
  SUBCASE("exact inputs are kept bit for bit") {
    const SimplexVector p({0.2, 0.3, 0.5});
    CHECK(p[0] == 0.2);
    CHECK(p[1] == 0.3);
    CHECK(p[2] == 0.5);
  }
}

TEST_CASE("entropy examples") {
  CHECK(entropy(SimplexVector({0.5, 0.5})).value == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(entropy(SimplexVector({1.0, 0.0})).value == 0.0);
  const auto oracle = static_cast<double>(entropy_oracle({0.25L, 0.75L}));
  CHECK(oracle == doctest::Approx(0.562335).epsilon(1e-6));
  CHECK(std::abs(entropy(SimplexVector({0.25, 0.75})).value - oracle) <= 1e-15);
}

TEST_CASE("kl_divergence examples") {
  CHECK(kl_divergence(SimplexVector({0.3, 0.7}), SimplexVector({0.3, 0.7}))->value == 0.0);
  CHECK(kl_divergence(SimplexVector({1, 0}), SimplexVector({0.5, 0.5}))->value ==
        doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  const auto bad = kl_divergence(SimplexVector({0.5, 0.5}), SimplexVector({1, 0}));
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.unbounded().kind == UnboundedKind::SupportViolation);
  CHECK_THROWS_AS(bad.value(), std::logic_error);
  CHECK_THROWS_AS(kl_divergence(SimplexVector({1.0}), SimplexVector({0.5, 0.5})), Error);
}

TEST_CASE("cross_entropy examples") {
  CHECK(cross_entropy(SimplexVector({0.5, 0.5}), SimplexVector({0.5, 0.5}))->value ==
        doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(cross_entropy(SimplexVector({1, 0}), SimplexVector({0.25, 0.75}))->value ==
        doctest::Approx(std::log(4.0)).epsilon(1e-15));
  // Against a uniform q the cross entropy is ln 2 whatever p is; it also
  // equals H(p) + KL(p||q) = 0.610864 + 0.082283.
  const SimplexVector p({0.7, 0.3}), q({0.5, 0.5});
  const double ce = cross_entropy(p, q)->value;
  CHECK(ce == doctest::Approx(0.693147).epsilon(1e-6));
  const long double h = entropy_oracle({0.7L, 0.3L});
  const long double kl = 0.7L * std::log(0.7L / 0.5L) + 0.3L * std::log(0.3L / 0.5L);
  CHECK(std::abs(ce - static_cast<double>(h + kl)) <= 1e-15);
  CHECK_FALSE(cross_entropy(SimplexVector({0.5, 0.5}), SimplexVector({0, 1})).ok());
}

TEST_CASE("bits conversion") {
  const Nats x{0.020135513550688873};
  CHECK(x.to_bits().value * kLn2 == doctest::Approx(x.value).epsilon(1e-16));
  CHECK(to_bits(Nats{kLn2}).value == 1.0);
}

TEST_CASE("property: Gibbs, chain identity and entropy bounds") {
  testing::Rng rng(20240601);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = testing::uniform_index(rng, 1, 8);
    const SimplexVector p = testing::random_simplex(rng, m, 0.0);
    const SimplexVector q = testing::random_simplex(rng, m, 0.0);

    const double kl = kl_divergence(p, q)->value;
    CHECK(kl >= 0.0);
    CHECK(kl_divergence(p, p)->value <= 1e-12);

    const double h = entropy(p).value;
    const double ce = cross_entropy(p, q)->value;
    CHECK(std::abs(ce - h - kl) <= 1e-12);

    CHECK(h >= -1e-12);
    CHECK(h <= std::log(static_cast<double>(m)) + 1e-12);
  }
}
