#pragma once

#include <functional>

#include "oramlab/trace_model.hpp"

namespace oramlab {

/// A non-oblivious RAM: maps a logical trace to the physical access sequence
/// it performs. Every output record is one memory access; addresses must fit
/// the encoding width.
using InnerRam = std::function<LogicalTrace(const LogicalTrace&)>;

/// Physical address = logical address.
LogicalTrace pass_through(const LogicalTrace& a);

struct BogusConfig {
  unsigned addr_bits = 2;
  /// Append each record's 512-bit payload to the encoding.
  bool include_data = false;

  void validate() const;
  unsigned record_bits() const noexcept;
};

/// Op codes of a record: Read=01, Write=10, Halt=11.
unsigned op_code(Op op) noexcept;

/// Bitstring of the records, read as a big-endian integer.
BigUint encode_records(const LogicalTrace& records, const BogusConfig& cfg);

struct PaddedPlan {
  LogicalTrace inner_trace;
  BigUint x;
  BigUint total_length;  ///< always x

  /// |inner_trace| real accesses followed by x - |inner_trace| padding reads of address 0.
  BigUint padding_length() const { return total_length - inner_trace.size(); }
};

PaddedPlan bogus_wrap(const InnerRam& inner, const LogicalTrace& a, const BogusConfig& cfg = {});

/// First min(n, x) accesses of the plan. Ticks count from 0; `leaf` carries
/// the physical address.
ObservedTrace bogus_prefix(const PaddedPlan& plan, std::uint64_t n);

}  // namespace oramlab
