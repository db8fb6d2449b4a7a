#include "oramlab/common.hpp"

#include <algorithm>

namespace oramlab {

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Payload Payload::from_hex(std::string_view hex) {
  if (hex.empty()) throw std::invalid_argument("empty hex payload");
  // Leading zeros do not count against the block width.
  while (hex.size() > 1 && hex.front() == '0') hex.remove_prefix(1);
  if (hex.size() > 2 * kBytes) throw RangeError("payload wider than " + std::to_string(kBytes) + " bytes");

  Payload p;
  std::size_t pos = kBytes * 2;  // nibble index one past the last
  for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
    const int d = hex_digit(*it);
    if (d < 0) throw std::invalid_argument("invalid hex digit '" + std::string(1, *it) + "'");
    --pos;
    if (d == 0) continue;
    const std::size_t byte = pos / 2;
    const std::uint8_t shift = (pos % 2 == 0) ? 4 : 0;
    p.set_byte(byte, static_cast<std::uint8_t>(p.byte(byte) | (d << shift)));
  }
  return p;
}

Payload Payload::from_u64(std::uint64_t value) {
  Payload p;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto b = static_cast<std::uint8_t>(value >> (8 * i));
    if (b != 0) p.set_byte(kBytes - 1 - i, b);
  }
  return p;
}

std::string Payload::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(kBytes * 2);
  for (std::size_t i = 0; i < kBytes; ++i) {
    const std::uint8_t b = byte(i);
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  const auto first = out.find_first_not_of('0');
  return first == std::string::npos ? std::string("0") : out.substr(first);
}

bool Payload::is_zero() const noexcept {
  return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

void Payload::set_byte(std::size_t i, std::uint8_t v) {
  if (i >= kBytes) throw RangeError("payload byte index out of range");
  if (bytes_.empty()) {
    if (v == 0) return;
    bytes_.assign(kBytes, 0);
  }
  bytes_[i] = v;
}

std::uint32_t Payload::word(std::size_t i) const noexcept {
  std::uint32_t v = 0;
  for (std::size_t b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(byte(4 * i + b)) << (8 * b);
  return v;
}

void Payload::set_word(std::size_t i, std::uint32_t v) {
  for (std::size_t b = 0; b < 4; ++b) set_byte(4 * i + b, static_cast<std::uint8_t>(v >> (8 * b)));
}

bool operator==(const Payload& a, const Payload& b) noexcept {
  for (std::size_t i = 0; i < Payload::kBytes; ++i)
    if (a.byte(i) != b.byte(i)) return false;
  return true;
}

std::vector<AdversaryView> adversary_projection(std::span<const ObservedAccess> trace) {
  std::vector<AdversaryView> out;
  out.reserve(trace.size());
  for (const auto& a : trace) out.push_back({a.tick, a.leaf});
  return out;
}

std::string_view to_string(AccessKind kind) noexcept {
  switch (kind) {
    case AccessKind::Real: return "real";
    case AccessKind::Dummy: return "dummy";
    case AccessKind::Padding: return "padding";
  }
  return "?";
}

}  // namespace oramlab
