#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "doctest.h"
#include "shoeprint/error.hpp"
#include "shoeprint/rng.hpp"

using namespace shoeprint;

TEST_CASE("generator streams are frozen per seed") {
  Rng zero(0);
  CHECK(zero.next_u64() == 11091344671253066420ULL);
  CHECK(zero.next_u64() == 13793997310169335082ULL);
  CHECK(zero.next_u64() == 1900383378846508768ULL);
  CHECK(zero.next_u64() == 7684712102626143532ULL);

  Rng other(42);
  CHECK(other.next_u64() == 1546998764402558742ULL);
  CHECK(other.next_u64() == 6990951692964543102ULL);
  CHECK(other.next_u64() == 12544586762248559009ULL);
  CHECK(other.next_u64() == 17057574109182124193ULL);
}

TEST_CASE("uniform doubles are frozen and stay in [0, 1)") {
  Rng rng(42);
  CHECK(rng.uniform() == 0.08386297105988216);
  CHECK(rng.uniform() == 0.3789802506626686);
  CHECK(rng.uniform() == 0.6800434110281394);
  Rng more(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = more.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("ranged uniform stays within its bounds") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-2.5, 4.0);
    CHECK(u >= -2.5);
    CHECK(u < 4.0);
  }
}

TEST_CASE("integer draws include both endpoints and only the range") {
  Rng rng(11);
  std::map<long long, int> counts;
  for (int i = 0; i < 6000; ++i) ++counts[rng.uniform_int(-1, 2)];
  CHECK(counts.size() == 4);
  CHECK(counts.count(-1) == 1);
  CHECK(counts.count(2) == 1);
  for (const auto& [value, count] : counts) {
    CHECK(value >= -1);
    CHECK(value <= 2);
    CHECK(count > 1000);  // roughly uniform over four outcomes
  }
  CHECK(rng.uniform_int(5, 5) == 5);
  CHECK_THROWS_AS(rng.uniform_int(3, 2), ConfigError);
}

TEST_CASE("gaussian draws have the requested moments") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));

  Rng standard(123), shifted(123);
  for (int i = 0; i < 16; ++i) {
    CHECK(shifted.gaussian(10.0, 2.0) == 10.0 + 2.0 * standard.gaussian());
  }
}

TEST_CASE("gaussian caching preserves determinism") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.gaussian() == b.gaussian());
}

TEST_CASE("pair hashing is order sensitive and deterministic") {
  CHECK(hash_combine(1, 2) == hash_combine(1, 2));
  CHECK(hash_combine(1, 2) != hash_combine(2, 1));
  CHECK(hash_combine(0, 0) != 0);
}

TEST_CASE("byte hashing matches the fnv-1a reference checksums") {
  // reference values for the 64-bit FNV-1a parameters
  CHECK(fnv1a64(std::string("")) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64(std::string("a")) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64(std::string("foobar")) == 0x85944171f73967e8ULL);
}
