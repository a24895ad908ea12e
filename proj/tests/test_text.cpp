#include <doctest.h>

#include <random>

#include "coherency/text.hpp"

using namespace coherency;

TEST_CASE("partial_match examples") {
  CHECK(partial_match("Frankfurt am Main", "frankfurt"));
  CHECK_FALSE(partial_match("berlin", "Malta"));
  CHECK_FALSE(partial_match("", "malta"));
  CHECK_FALSE(partial_match("malta", ""));
  CHECK_FALSE(partial_match("   ", "   "));
  CHECK(partial_match("  MALTA ", "malta"));
}

TEST_CASE("clean_prediction strips one trailing period") {
  CHECK(clean_prediction(" Valletta. ") == "Valletta");
  CHECK(clean_prediction("U.S..") == "U.S.");
  CHECK(clean_prediction(".") == "");
  CHECK(clean_prediction("Malta") == "Malta");
}

TEST_CASE("normalize_entity is lowercase plus trim") {
  CHECK(normalize_entity("  New York\t") == "new york");
  CHECK(to_lower("ÄBC") == "Äbc");
}

TEST_CASE("mix_seed and uniform_index are deterministic") {
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(fnv1a64("") == 1469598103934665603ULL);
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    const auto x = uniform_index(a, 7);
    CHECK(x == uniform_index(b, 7));
    CHECK(x < 7);
  }
  std::mt19937_64 c(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform_unit(c);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
