#pragma once

#include <iosfwd>

#include "oramlab/construction.hpp"
#include "oramlab/stats.hpp"

namespace oramlab {

/// Per-position observable: (tick, leaf), or a sentinel leaf for positions
/// past the end of the run or after a failure.
struct Symbol {
  Tick tick = 0;
  std::int64_t leaf = 0;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};
inline constexpr std::int64_t kEnd = -1;
inline constexpr std::int64_t kFail = -2;

/// Total observed length; a failed run sorts above every finite length.
struct LengthObs {
  bool failed = false;
  BigUint length = 0;
  friend bool operator==(const LengthObs& a, const LengthObs& b) {
    return a.failed == b.failed && (a.failed || a.length == b.length);
  }
  friend bool operator<(const LengthObs& a, const LengthObs& b) {
    if (a.failed != b.failed) return b.failed;
    return !a.failed && a.length < b.length;
  }
  friend bool operator!=(const LengthObs& a, const LengthObs& b) { return !(a == b); }
};

struct Sample {
  std::vector<Symbol> prefix;      ///< exactly n symbols
  std::optional<LengthObs> length;  ///< present when the run was completed
};

struct ExperimentSpec {
  std::shared_ptr<const Construction> construction;
  TraceInput a1 = TraceInput::from_trace({});
  TraceInput a2 = TraceInput::from_trace({});
  std::string label;  ///< workload pair name for reports
  std::uint64_t n = 64;
  std::uint64_t samples = 1000;
  double alpha = 0.01;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  /// Longest prefix compared by the full-trace stage of the Definition 1 test.
  std::uint64_t full_trace_cap = 256;

  void validate() const;
};

/// Sample j of input i (i = 0 for a1, 1 for a2) runs with derive_seed(master, i, j).
/// With `need_length` every run is completed (inputs must be finite).
std::pair<std::vector<Sample>, std::vector<Sample>> sample_truncations(const ExperimentSpec& spec,
                                                                       bool need_length = false);

/// One run. Throws ConfigError if `need_length` and the input is unbounded.
Sample run_sample(const Construction& c, const TraceInput& input, std::uint64_t seed, std::uint64_t n,
                  bool need_length);

enum class Verdict : std::uint8_t { Indistinguishable, Distinguished, VacuouslySatisfied };
std::string_view to_string(Verdict v) noexcept;

struct TestRow {
  std::string test;
  stats::ChiSquare chi;
  double p = 1.0;  ///< after any multiplicity correction
};

struct DistinguisherReport {
  std::string construction;
  std::string definition;
  std::string workload_pair;
  std::uint64_t n = 0;
  std::uint64_t samples = 0;
  double alpha = 0.01;
  std::vector<TestRow> tests;
  double p = 1.0;
  Verdict verdict = Verdict::Indistinguishable;
};

/// Per-position two-sample tests over the first `positions` symbols, Bonferroni
/// combined, and the pooled leaf-marginal test; overall p is twice the smaller.
std::vector<TestRow> trace_tests(const std::vector<Sample>& s1, const std::vector<Sample>& s2,
                                 std::uint64_t positions, double& p);
TestRow length_test(const std::vector<Sample>& s1, const std::vector<Sample>& s2);

DistinguisherReport test_def2(const ExperimentSpec& spec);
/// Two stages: if the total lengths differ at alpha the definition asks
/// nothing (VacuouslySatisfied); otherwise the full traces are compared.
DistinguisherReport test_def1(const ExperimentSpec& spec);
/// Needs |a1| = |a2|. Compares total lengths and n-truncations.
DistinguisherReport test_strong_def(const ExperimentSpec& spec);

struct CausalityResult {
  bool causal = true;
  std::uint64_t checked = 0;
  std::optional<std::uint64_t> first_failure;  ///< n of the first failing check
};

/// For each n, output on [A]_n must be an exact prefix (adversary view) of the
/// output on a longer input: A itself when finite, else [A]_{2n+16}.
/// Outputs are compared up to `cap` accesses.
CausalityResult test_causality(const Construction& c, const TraceInput& a, const std::vector<std::uint64_t>& n_list,
                               std::uint64_t seed, std::uint64_t cap = 1 << 20);

struct StashGrowth {
  std::vector<double> rate_seq;
  std::vector<double> rate_rand;
  double mean_seq = 0;
  double mean_rand = 0;
};

/// Net stash growth (all trees) per logical access over the first W accesses,
/// one value per seed. The configuration should disable eviction and leave
/// the stash unbounded.
StashGrowth stash_growth(const OramConfig& cfg, const RecursionConfig& rc, const TraceInput& a_seq,
                         const TraceInput& a_rand, std::uint64_t window, const std::vector<std::uint64_t>& seeds);

/// Row of a suite used for the cross-definition consistency check.
struct SuiteEntry {
  std::string construction;
  std::string workload_pair;
  std::uint64_t n = 0;
  double alpha = 0;
  bool causal = false;
  Verdict strong = Verdict::Indistinguishable;
  Verdict def2 = Verdict::Indistinguishable;
};

/// For every causal construction judged Indistinguishable under the strong
/// test, the truncation test at the same settings must agree. Returns the
/// entries that violate this.
std::vector<SuiteEntry> implication_violations(const std::vector<SuiteEntry>& suite);

void write_report_csv(const std::vector<DistinguisherReport>& reports, std::ostream& out);
void write_report_summary(const std::vector<DistinguisherReport>& reports, std::ostream& out);

}  // namespace oramlab
