#include "oramlab/trace_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "oramlab/lru_cache.hpp"

namespace oramlab {

namespace {

constexpr std::uint64_t kMaxZipfSpace = std::uint64_t{1} << 24;

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void validate_trace(std::span<const LogicalAccess> trace, std::uint64_t addr_space) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& a = trace[i];
    if (a.op == Op::Halt) {
      if (i + 1 != trace.size()) throw ConfigError("halt at position " + std::to_string(i) + " is not last");
      if (a.addr != 0 || !a.data.is_zero()) throw ConfigError("halt must carry zero address and data");
      continue;
    }
    if (a.addr >= addr_space)
      throw RangeError("address " + std::to_string(a.addr) + " outside address space of " +
                       std::to_string(addr_space) + " blocks");
  }
}

// ---------------------------------------------------------------------------

void WorkloadSpec::validate() const {
  if (addr_space < 2) throw ConfigError("workload address space must be at least 2 blocks");
  if (!is_power_of_two(addr_space)) throw ConfigError("workload address space must be a power of two");
  if (length && *length == 0) throw ConfigError("workload length must be positive");
  if (kind == WorkloadKind::Strided && stride == 0) throw ConfigError("stride must be positive");
  if (kind == WorkloadKind::Zipf) {
    if (!(zipf_exponent > 0.0)) throw ConfigError("zipf exponent must be positive");
    if (addr_space > kMaxZipfSpace) throw ConfigError("zipf workloads support at most 2^24 addresses");
  }
  if (kind == WorkloadKind::Mixed && !(locality_fraction >= 0.0 && locality_fraction <= 1.0))
    throw ConfigError("locality fraction must lie in [0, 1]");
  if (!(write_fraction >= 0.0 && write_fraction <= 1.0)) throw ConfigError("write fraction must lie in [0, 1]");
}

WorkloadGenerator::WorkloadGenerator(const WorkloadSpec& spec)
    : spec_(spec), addr_rng_(derive_seed(spec.seed, 0, 0)), op_rng_(derive_seed(spec.seed, 1, 0)) {
  spec_.validate();
  previous_ = spec_.addr_space - 1;
  if (spec_.kind == WorkloadKind::Zipf) {
    auto cdf = std::make_shared<std::vector<double>>(spec_.addr_space);
    double sum = 0.0;
    for (std::uint64_t r = 0; r < spec_.addr_space; ++r) {
      sum += std::pow(static_cast<double>(r + 1), -spec_.zipf_exponent);
      (*cdf)[r] = sum;
    }
    for (auto& c : *cdf) c /= sum;
    zipf_cdf_ = std::move(cdf);
  }
}

BlockAddr WorkloadGenerator::next_address() {
  const std::uint64_t space = spec_.addr_space;
  switch (spec_.kind) {
    case WorkloadKind::Sequential:
      return index_ % space;
    case WorkloadKind::UniformRandom:
      return uniform_below(addr_rng_, space);
    case WorkloadKind::Strided:
      // index * stride mod space without overflow: space is a power of two.
      return (index_ * spec_.stride) & (space - 1);
    case WorkloadKind::Zipf: {
      const double u = uniform_unit(addr_rng_);
      const auto it = std::upper_bound(zipf_cdf_->begin(), zipf_cdf_->end(), u);
      return std::min<std::uint64_t>(static_cast<std::uint64_t>(it - zipf_cdf_->begin()), space - 1);
    }
    case WorkloadKind::Mixed: {
      const double u = uniform_unit(addr_rng_);
      if (u < spec_.locality_fraction) return (previous_ + 1) & (space - 1);
      return uniform_below(addr_rng_, space);
    }
  }
  return 0;
}

std::optional<LogicalAccess> WorkloadGenerator::next() {
  if (spec_.length && index_ >= *spec_.length) return std::nullopt;
  LogicalAccess a;
  a.addr = next_address();
  previous_ = a.addr;
  if (spec_.write_fraction > 0.0 && uniform_unit(op_rng_) < spec_.write_fraction) {
    a.op = Op::Write;
    a.data = Payload::from_u64(op_rng_());
  }
  ++index_;
  return a;
}

LogicalTrace generate(const WorkloadSpec& spec) {
  if (!spec.length) throw ConfigError("cannot materialize an unbounded workload; use generate_prefix");
  return generate_prefix(spec, *spec.length);
}

LogicalTrace generate_prefix(const WorkloadSpec& spec, std::uint64_t n) {
  WorkloadGenerator gen(spec);
  LogicalTrace out;
  out.reserve(static_cast<std::size_t>(spec.length ? std::min(n, *spec.length) : n));
  for (std::uint64_t i = 0; i < n; ++i) {
    auto a = gen.next();
    if (!a) break;
    out.push_back(std::move(*a));
  }
  return out;
}

// ---------------------------------------------------------------------------

TraceInput TraceInput::from_trace(LogicalTrace trace) {
  TraceInput in;
  in.source_ = std::make_shared<const LogicalTrace>(std::move(trace));
  return in;
}

TraceInput TraceInput::from_workload(const WorkloadSpec& spec) {
  spec.validate();
  TraceInput in;
  in.source_ = spec;
  return in;
}

std::optional<std::uint64_t> TraceInput::length() const {
  if (const auto* t = std::get_if<std::shared_ptr<const LogicalTrace>>(&source_)) return (*t)->size();
  return std::get<WorkloadSpec>(source_).length;
}

LogicalTrace TraceInput::prefix(std::uint64_t n) const {
  if (const auto* t = std::get_if<std::shared_ptr<const LogicalTrace>>(&source_)) {
    const auto end = (*t)->begin() + static_cast<std::ptrdiff_t>(std::min<std::uint64_t>(n, (*t)->size()));
    return LogicalTrace((*t)->begin(), end);
  }
  return generate_prefix(std::get<WorkloadSpec>(source_), n);
}

TraceInput::Cursor TraceInput::cursor() const {
  Cursor c;
  if (const auto* t = std::get_if<std::shared_ptr<const LogicalTrace>>(&source_))
    c.trace_ = *t;
  else
    c.gen_.emplace(std::get<WorkloadSpec>(source_));
  return c;
}

std::optional<LogicalAccess> TraceInput::Cursor::next() {
  if (gen_) return gen_->next();
  if (!trace_ || pos_ >= trace_->size()) return std::nullopt;
  return (*trace_)[pos_++];
}

// ---------------------------------------------------------------------------

void LlcConfig::validate() const {
  if (capacity_blocks == 0 || associativity == 0) throw ConfigError("LLC capacity and associativity must be positive");
  if (capacity_blocks % associativity != 0) throw ConfigError("LLC capacity must be divisible by associativity");
}

LogicalTrace llc_filter(std::span<const LogicalAccess> trace, const LlcConfig& cfg) {
  cfg.validate();
  if (!cfg.enabled) throw ConfigError("llc_filter requires an enabled LLC configuration");
  const std::uint64_t sets = cfg.capacity_blocks / cfg.associativity;
  std::vector<LruCache<BlockAddr, char>> cache(sets, LruCache<BlockAddr, char>(cfg.associativity));

  LogicalTrace misses;
  for (const auto& a : trace) {
    if (a.op == Op::Halt) {
      misses.push_back(a);
      continue;
    }
    auto& set = cache[a.addr % sets];
    if (set.lookup(a.addr)) continue;
    set.insert(a.addr, 0);
    misses.push_back(a);
  }
  return misses;
}

// ---------------------------------------------------------------------------

LogicalTrace parse_trace(std::istream& in, std::uint64_t addr_space) {
  LogicalTrace trace;
  std::string raw;
  std::size_t line_no = 0;
  bool halted = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (halted) throw ParseError(line_no, "record after halt");

    const auto fields = split_commas(line);
    if (fields.size() > 3) throw ParseError(line_no, "too many fields");
    LogicalAccess a;
    if (fields[0] == "R")
      a.op = Op::Read;
    else if (fields[0] == "W")
      a.op = Op::Write;
    else if (fields[0] == "H")
      a.op = Op::Halt;
    else
      throw ParseError(line_no, "unknown op '" + std::string(fields[0]) + "'");

    if (fields.size() < 2) {
      if (a.op != Op::Halt) throw ParseError(line_no, "missing address");
    } else {
      const auto f = fields[1];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), a.addr);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
        throw ParseError(line_no, "invalid address '" + std::string(f) + "'");
    }
    if (fields.size() == 3) {
      try {
        a.data = Payload::from_hex(fields[2]);
      } catch (const std::exception& e) {
        throw ParseError(line_no, e.what());
      }
    }

    if (a.op == Op::Halt) {
      if (a.addr != 0 || !a.data.is_zero()) throw ParseError(line_no, "halt must not carry address or data");
      halted = true;
    } else if (a.addr >= addr_space) {
      throw RangeError("line " + std::to_string(line_no) + ": address " + std::to_string(a.addr) +
                       " outside address space of " + std::to_string(addr_space) + " blocks");
    }
    trace.push_back(std::move(a));
  }
  return trace;
}

void write_trace(std::span<const LogicalAccess> trace, std::ostream& out) {
  for (const auto& a : trace) {
    switch (a.op) {
      case Op::Read: out << "R," << a.addr; break;
      case Op::Write: out << "W," << a.addr; break;
      case Op::Halt: out << "H,0\n"; continue;
    }
    if (!a.data.is_zero()) out << ',' << a.data.to_hex();
    out << '\n';
  }
}

LogicalTrace read_trace_file(const std::filesystem::path& path, std::uint64_t addr_space) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path.string());
  return parse_trace(in, addr_space);
}

void write_trace_file(std::span<const LogicalAccess> trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file " + path.string());
  write_trace(trace, out);
}

}  // namespace oramlab
