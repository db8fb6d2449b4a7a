#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oramlab {

using Tick = std::uint64_t;
using BlockAddr = std::uint64_t;
using Leaf = std::uint32_t;
using BigUint = boost::multiprecision::cpp_int;

/// One deterministic engine per simulated instance. mt19937_64 output is fixed
/// by the standard; all bounded draws go through uniform_below() so results do
/// not depend on the standard library's distribution implementations.
using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Errors

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Raised when background eviction cannot bring the stash below its threshold.
class LivelockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Seeding and draws

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for sample `j` of input `i` under `master`:
///   h(m, i, j) = splitmix64(splitmix64(splitmix64(m) ^ i) ^ j)
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i, std::uint64_t j) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ i) ^ j);
}

/// Unbiased draw in [0, bound) by rejection. bound must be nonzero.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if ((bound & (bound - 1)) == 0) return rng() & (bound - 1);
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Payloads

/// Opaque fixed-width block contents. A default-constructed payload is the
/// all-zero block and costs no storage; simulation never inspects contents.
class Payload {
 public:
  static constexpr std::size_t kBytes = 64;

  Payload() = default;

  /// Big-endian hex value, zero-extended to the block width.
  static Payload from_hex(std::string_view hex);
  static Payload from_u64(std::uint64_t value);

  /// Minimal lowercase hex of the block value; "0" for the zero block.
  std::string to_hex() const;
  bool is_zero() const noexcept;

  std::uint8_t byte(std::size_t i) const noexcept { return bytes_.empty() ? 0 : bytes_[i]; }
  void set_byte(std::size_t i, std::uint8_t v);

  std::uint32_t word(std::size_t i) const noexcept;
  void set_word(std::size_t i, std::uint32_t v);

  friend bool operator==(const Payload& a, const Payload& b) noexcept;

 private:
  std::vector<std::uint8_t> bytes_;  // empty, or exactly kBytes
};

// ---------------------------------------------------------------------------
// Observable traces

enum class AccessKind : std::uint8_t { Real, Dummy, Padding };

/// One externally visible memory access. `leaf` is the accessed path label for
/// tree ORAMs and the physical address for flat constructions. hidden_kind is
/// ground truth for diagnostics and never reaches a statistical test.
struct ObservedAccess {
  Tick tick = 0;
  std::uint64_t leaf = 0;
  AccessKind hidden_kind = AccessKind::Real;

  friend bool operator==(const ObservedAccess&, const ObservedAccess&) = default;
};

using ObservedTrace = std::vector<ObservedAccess>;

/// What the adversary sees of one access.
struct AdversaryView {
  Tick tick = 0;
  std::uint64_t location = 0;

  friend bool operator==(const AdversaryView&, const AdversaryView&) = default;
};

std::vector<AdversaryView> adversary_projection(std::span<const ObservedAccess> trace);

std::string_view to_string(AccessKind kind) noexcept;

}  // namespace oramlab
