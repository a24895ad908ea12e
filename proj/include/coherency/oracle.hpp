#pragma once

#include <cstddef>
#include <cstdint>

#include "coherency/engine.hpp"
#include "coherency/synthetic.hpp"

namespace coherency {

struct OracleOptions {
  ExclusionMode exclusion = ExclusionMode::Pivot;
  std::size_t samples = 10000;  // simulated runs for random behaviors
  std::uint64_t seed = 1;
};

struct OracleEstimate {
  double mean = 0.0;
  double ci_low = 0.0;   // 95% CI of the expectation
  double ci_high = 0.0;
  double run_low = 0.0;  // central 95% of single-run macro scores
  double run_high = 0.0;
};

struct OracleResult {
  bool exact = false;  // closed form; all intervals collapse to the mean
  std::size_t samples = 0;
  OracleEstimate round1, round2, avg;
};

// Expected macro coherency of manual-prompt evaluation against a synthetic KB,
// computed straight from the fact list and the behavior definitions. Shares no
// code with the engine or the synthetic backend.
OracleResult brute_force_expected_coherency(const SyntheticKB& kb, const OracleOptions& options = {});

}  // namespace coherency
