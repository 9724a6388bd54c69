#pragma once

// Timestamped event log of one run, serialised as JSON lines: a header line,
// one line per event, and a footer carrying the event count.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tewa {

inline constexpr int kFormatVersion = 1;

struct TraceHeader {
  int version = kFormatVersion;
  std::string spec_hash;
  std::uint64_t seed = 0;
  std::string scenario;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct TraceEvent {
  std::int64_t tick = 0;
  std::int64_t seq = 0;
  std::string kind;
  nlohmann::json payload;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct SimTrace {
  TraceHeader header;
  std::vector<TraceEvent> events;

  // Appends with the next sequence number.
  void append(std::int64_t tick, std::string kind, nlohmann::json payload);

  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

std::string write_trace(const SimTrace& trace);
// Throws VersionMismatch for another format version and CorruptTrace for
// anything malformed or truncated.
SimTrace read_trace(std::string_view document);

// FNV-1a 64 of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace tewa
