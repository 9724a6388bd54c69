#include "tewa/trace.hpp"

#include <cstdio>

#include "tewa/errors.hpp"

namespace tewa {

using nlohmann::json;

void SimTrace::append(std::int64_t tick, std::string kind, json payload) {
  events.push_back({tick, static_cast<std::int64_t>(events.size()), std::move(kind), std::move(payload)});
}

std::string write_trace(const SimTrace& trace) {
  std::string out;
  json header = {{"format", "tewa-trace"},
                 {"version", trace.header.version},
                 {"spec_hash", trace.header.spec_hash},
                 {"seed", trace.header.seed},
                 {"scenario", trace.header.scenario}};
  out += header.dump();
  out += '\n';
  for (const auto& e : trace.events) {
    json line = {{"tick", e.tick}, {"seq", e.seq}, {"kind", e.kind}, {"payload", e.payload}};
    out += line.dump();
    out += '\n';
  }
  out += json({{"end", true}, {"events", trace.events.size()}}).dump();
  out += '\n';
  return out;
}

SimTrace read_trace(std::string_view document) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < document.size()) {
    const auto nl = document.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(document.substr(start));
      break;
    }
    lines.push_back(document.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.size() < 2) throw CorruptTrace("trace is missing its header or footer");

  auto parse = [](std::string_view line, std::size_t number) {
    try {
      return json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorruptTrace("trace line " + std::to_string(number) + ": " + e.what());
    }
  };

  SimTrace trace;
  const json header = parse(lines.front(), 1);
  if (!header.is_object() || header.value("format", "") != "tewa-trace") {
    throw CorruptTrace("first line is not a trace header");
  }
  const int version = header.value("version", -1);
  if (version != kFormatVersion) {
    throw VersionMismatch("trace version " + std::to_string(version) + " is not supported");
  }
  try {
    trace.header.version = version;
    trace.header.spec_hash = header.at("spec_hash").get<std::string>();
    trace.header.seed = header.at("seed").get<std::uint64_t>();
    trace.header.scenario = header.at("scenario").get<std::string>();
  } catch (const json::exception& e) {
    throw CorruptTrace(std::string("bad trace header: ") + e.what());
  }

  const json footer = parse(lines.back(), lines.size());
  if (!footer.is_object() || !footer.contains("end")) throw CorruptTrace("trace is truncated");
  const auto expected = footer.value("events", std::size_t{0});
  if (expected != lines.size() - 2) throw CorruptTrace("trace event count does not match footer");

  std::int64_t last_tick = 0;
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const json line = parse(lines[i], i + 1);
    try {
      TraceEvent e{line.at("tick").get<std::int64_t>(), line.at("seq").get<std::int64_t>(),
                   line.at("kind").get<std::string>(), line.at("payload")};
      if (e.seq != static_cast<std::int64_t>(i - 1) || e.tick < last_tick) {
        throw CorruptTrace("trace events out of order at line " + std::to_string(i + 1));
      }
      last_tick = e.tick;
      trace.events.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw CorruptTrace("trace line " + std::to_string(i + 1) + ": " + ex.what());
    }
  }
  return trace;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x00000100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace tewa
