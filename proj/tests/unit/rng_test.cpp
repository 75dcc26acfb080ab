#include "doctest.h"
#include "rcgan/rng.hpp"

#include <set>
#include <stdexcept>
#include <vector>

using namespace rcgan;

TEST_CASE("same seed yields the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(43);
  CHECK(Rng(42).next_u64() != c.next_u64());
}

TEST_CASE("uniform stays in [0,1) and ranges map correctly") {
  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = r.uniform(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v < 3.0);
  }
}

TEST_CASE("below covers the full range and stays in bounds") {
  Rng r(11);
  std::set<int> seen;
  for (int i = 0; i < 500; ++i) {
    const int v = r.below(5);
    CHECK(v >= 0);
    CHECK(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("serialize round-trips mid-stream including gaussian draws") {
  Rng r(99);
  r.normal();  // advance into the middle of the stream
  r.uniform();
  const std::string state = r.serialize();

  std::vector<double> expect;
  for (int i = 0; i < 10; ++i) expect.push_back(r.normal(1.0, 2.0));

  Rng s(0);
  s.deserialize(state);
  for (int i = 0; i < 10; ++i) CHECK(s.normal(1.0, 2.0) == expect[i]);
}

TEST_CASE("normal draws have no hidden spare") {
  // If an implementation cached a Box-Muller spare outside the engine, the
  // continuation after serialize/deserialize would diverge on odd call
  // counts. Exercise an odd number of draws before the snapshot.
  Rng r(5);
  r.normal();
  const std::string state = r.serialize();
  const double next_from_r = r.normal();
  Rng s(0);
  s.deserialize(state);
  CHECK(s.normal() == next_from_r);
}

TEST_CASE("mix derives distinct deterministic stream seeds") {
  CHECK(Rng::mix(1, 2) == Rng::mix(1, 2));
  CHECK(Rng::mix(1, 2) != Rng::mix(2, 1));
  CHECK(Rng::mix(1, 2) != Rng::mix(1, 3));
}

TEST_CASE("deserialize rejects malformed state") {
  Rng r(1);
  CHECK_THROWS_AS(r.deserialize("definitely-not-an-engine-state"), std::exception);
}

TEST_CASE("normal has roughly correct moments") {
  Rng r(12345);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.0).epsilon(0.05));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}
