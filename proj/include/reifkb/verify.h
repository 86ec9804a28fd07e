#ifndef REIFKB_VERIFY_H_
#define REIFKB_VERIFY_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "reifkb/gradcheck.h"

namespace reifkb {

// Outcome of one property suite. `worst` is the suite's headline number
// (max error, mismatch count, ...) and `limit` the bound it is held to.
struct SuiteResult {
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  double worst = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t random_kbs = 100;
  std::vector<std::size_t> shard_counts = {1, 2, 3, 7};
};

// Naive, late and reified follow agree within 1e-9 on random KBs and
// random non-negative inputs.
SuiteResult VerifyEquivalence(const VerifyOptions& options);

// On hard KBs with k-hot inputs, every strategy's output support equals the
// R-neighbour oracle.
SuiteResult VerifyOracle(const VerifyOptions& options);

// Instrumented per-call op counts: naive (1, N_R sparse adds), late (N_R,
// N_R), reified (3, 1).
SuiteResult VerifyOpCounts(const VerifyOptions& options);

// Sharded output within 1e-9 of unsharded for every shard count, and
// parallel shard execution byte-identical to sequential.
SuiteResult VerifyShards(const VerifyOptions& options);

// Finite-difference checks for multihop T=3, cvt, kbc N=2/T=3 and chain
// T=3 on small fixed fixtures; one result per model, held to < 1e-4.
std::vector<SuiteResult> VerifyGradients(const GradCheckOptions& options);

std::vector<SuiteResult> RunAllSuites(const VerifyOptions& options);

// Fixed-width table, one row per suite.
void PrintSuiteTable(const std::vector<SuiteResult>& results, std::ostream& out);

}  // namespace reifkb

#endif  // REIFKB_VERIFY_H_
