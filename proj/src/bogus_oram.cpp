#include "oramlab/bogus_oram.hpp"

namespace oramlab {

LogicalTrace pass_through(const LogicalTrace& a) { return a; }

void BogusConfig::validate() const {
  if (addr_bits == 0 || addr_bits > 64) throw ConfigError("bogus addr_bits must be in [1, 64]");
}

unsigned BogusConfig::record_bits() const noexcept {
  return 2 + addr_bits + (include_data ? static_cast<unsigned>(Payload::kBytes * 8) : 0);
}

unsigned op_code(Op op) noexcept {
  switch (op) {
    case Op::Read: return 0b01;
    case Op::Write: return 0b10;
    case Op::Halt: return 0b11;
  }
  return 0;
}

BigUint encode_records(const LogicalTrace& records, const BogusConfig& cfg) {
  cfg.validate();
  BigUint x = 0;
  for (const auto& r : records) {
    if (cfg.addr_bits < 64 && (r.addr >> cfg.addr_bits) != 0)
      throw RangeError("address " + std::to_string(r.addr) + " does not fit in " + std::to_string(cfg.addr_bits) +
                       " bits");
    x <<= 2;
    x |= op_code(r.op);
    x <<= cfg.addr_bits;
    x |= r.addr;
    if (cfg.include_data) {
      for (std::size_t i = 0; i < Payload::kBytes; ++i) {
        x <<= 8;
        x |= r.data.byte(i);
      }
    }
  }
  return x;
}

PaddedPlan bogus_wrap(const InnerRam& inner, const LogicalTrace& a, const BogusConfig& cfg) {
  PaddedPlan plan;
  plan.inner_trace = inner(a);
  plan.x = encode_records(plan.inner_trace, cfg);
  plan.total_length = plan.x;
  if (plan.x < plan.inner_trace.size()) throw ContractViolation("encoding shorter than the inner trace");
  return plan;
}

ObservedTrace bogus_prefix(const PaddedPlan& plan, std::uint64_t n) {
  const std::uint64_t len = plan.total_length < n ? static_cast<std::uint64_t>(plan.total_length) : n;
  ObservedTrace out;
  out.reserve(len);
  for (std::uint64_t i = 0; i < len; ++i) {
    if (i < plan.inner_trace.size())
      out.push_back({i, plan.inner_trace[i].addr, AccessKind::Real});
    else
      out.push_back({i, 0, AccessKind::Padding});
  }
  return out;
}

}  // namespace oramlab
