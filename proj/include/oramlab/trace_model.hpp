#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <variant>

#include "oramlab/common.hpp"

namespace oramlab {

enum class Op : std::uint8_t { Read, Write, Halt };

/// One program-side request (op, addr, data). Halt carries addr 0 and a zero payload.
struct LogicalAccess {
  Op op = Op::Read;
  BlockAddr addr = 0;
  Payload data;

  friend bool operator==(const LogicalAccess&, const LogicalAccess&) = default;
};

using LogicalTrace = std::vector<LogicalAccess>;

/// Throws ConfigError/RangeError if the trace has an address outside
/// [0, addr_space), a Halt before the end, or a Halt with nonzero fields.
void validate_trace(std::span<const LogicalAccess> trace, std::uint64_t addr_space);

// ---------------------------------------------------------------------------
// Synthetic workloads

enum class WorkloadKind : std::uint8_t { Sequential, UniformRandom, Strided, Zipf, Mixed };

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::Sequential;
  std::optional<std::uint64_t> length;  ///< nullopt: unbounded
  std::uint64_t addr_space = 1024;      ///< power of two, >= 2
  std::uint64_t stride = 1;             ///< Strided
  double zipf_exponent = 1.0;           ///< Zipf; addr_space <= 2^24
  double locality_fraction = 0.5;       ///< Mixed: P(next = previous + 1)
  double write_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Streams the accesses of a workload one at a time. Addresses and ops come
/// from independent engines, so the address stream does not depend on
/// write_fraction.
class WorkloadGenerator {
 public:
  explicit WorkloadGenerator(const WorkloadSpec& spec);

  /// Next access, or nullopt once a bounded workload is exhausted.
  std::optional<LogicalAccess> next();

 private:
  BlockAddr next_address();

  WorkloadSpec spec_;
  Rng addr_rng_;
  Rng op_rng_;
  std::uint64_t index_ = 0;
  BlockAddr previous_ = 0;
  std::shared_ptr<const std::vector<double>> zipf_cdf_;
};

/// All accesses of a bounded workload. Throws ConfigError if unbounded.
LogicalTrace generate(const WorkloadSpec& spec);

/// The first min(n, length) accesses of any workload.
LogicalTrace generate_prefix(const WorkloadSpec& spec, std::uint64_t n);

/// A replayable input: an explicit finite trace or a (possibly unbounded)
/// workload generator. Every cursor replays the same sequence from the start,
/// so prefixes of any length are computable.
class TraceInput {
 public:
  static TraceInput from_trace(LogicalTrace trace);
  static TraceInput from_workload(const WorkloadSpec& spec);

  std::optional<std::uint64_t> length() const;
  LogicalTrace prefix(std::uint64_t n) const;

  class Cursor {
   public:
    std::optional<LogicalAccess> next();

   private:
    friend class TraceInput;
    std::shared_ptr<const LogicalTrace> trace_;
    std::size_t pos_ = 0;
    std::optional<WorkloadGenerator> gen_;
  };

  Cursor cursor() const;

 private:
  std::variant<std::shared_ptr<const LogicalTrace>, WorkloadSpec> source_;
};

// ---------------------------------------------------------------------------
// LLC filter

struct LlcConfig {
  std::uint64_t capacity_blocks = 8;
  std::uint64_t associativity = 8;
  bool enabled = false;

  void validate() const;
};

/// Accesses that miss in a set-associative LRU cache (write-allocate), in
/// input order. Halt passes through. Set index is addr mod (capacity/assoc).
LogicalTrace llc_filter(std::span<const LogicalAccess> trace, const LlcConfig& cfg);

// ---------------------------------------------------------------------------
// Trace files: one `op,addr[,data_hex]` record per line, op in {R,W,H},
// decimal addresses, lowercase hex data, '#' comment lines.

LogicalTrace parse_trace(std::istream& in, std::uint64_t addr_space = std::uint64_t{1} << 32);
void write_trace(std::span<const LogicalAccess> trace, std::ostream& out);

LogicalTrace read_trace_file(const std::filesystem::path& path,
                             std::uint64_t addr_space = std::uint64_t{1} << 32);
void write_trace_file(std::span<const LogicalAccess> trace, const std::filesystem::path& path);

}  // namespace oramlab
