#include "tewa/protocol.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "tewa/errors.hpp"

namespace tewa {

using nlohmann::json;

namespace {

constexpr MessageType kAllTypes[] = {MessageType::Hello,           MessageType::TrackUpdate,
                                     MessageType::Tick,            MessageType::EngagementOrder,
                                     MessageType::EngagementResult, MessageType::Error,
                                     MessageType::Bye};

json engagement_json(const EngagementEvent& e) {
  return {{"ws", e.ws_id},
          {"track", e.track_id},
          {"serial", e.serial},
          {"fire_time", e.fire_time},
          {"impact_time", e.impact_time},
          {"sskp", e.sskp},
          {"outcome", std::string(to_string(e.outcome))}};
}

json schedule_json(const WsSchedule& schedule) {
  json out = json::array();
  for (const auto& e : schedule.sorted()) {
    out.push_back({{"ws", e.ws_id},
                   {"track", e.track_id},
                   {"slot", e.slot == SlotKind::Locked ? "locked" : "queued"}});
  }
  return out;
}

// Messages are small and strictly request/reply; don't let Nagle hold them.
void set_no_delay(int fd) {
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

void send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      throw ProtocolError(std::string("send failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

// Pops one line from buffer, reading more from fd as needed.
std::optional<std::string> next_line(int fd, std::string& buffer) {
  for (;;) {
    const auto nl = buffer.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char chunk[4096];
    const auto n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      if (buffer.empty()) return std::nullopt;
      std::string rest = std::move(buffer);
      buffer.clear();
      return rest;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace

std::string_view to_string(MessageType t) {
  switch (t) {
    case MessageType::Hello: return "Hello";
    case MessageType::TrackUpdate: return "TrackUpdate";
    case MessageType::Tick: return "Tick";
    case MessageType::EngagementOrder: return "EngagementOrder";
    case MessageType::EngagementResult: return "EngagementResult";
    case MessageType::Error: return "Error";
    case MessageType::Bye: return "Bye";
  }
  return "Error";
}

MessageType parse_message_type(std::string_view s) {
  for (auto t : kAllTypes) {
    if (to_string(t) == s) return t;
  }
  throw ProtocolError("unknown message type '" + std::string(s) + "'");
}

Message parse_message(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed message: ") + e.what());
  }
  if (!doc.is_object()) throw ProtocolError("message must be an object");
  if (!doc.contains("type") || !doc["type"].is_string()) {
    throw ProtocolError("message lacks a string 'type'");
  }
  Message m;
  m.type = parse_message_type(doc["type"].get<std::string>());
  if (doc.contains("tick")) {
    if (!doc["tick"].is_number_integer()) throw ProtocolError("'tick' must be an integer");
    m.tick = doc["tick"].get<std::int64_t>();
  }
  if (doc.contains("payload")) {
    if (!doc["payload"].is_object()) throw ProtocolError("'payload' must be an object");
    m.payload = doc["payload"];
  }
  return m;
}

std::string format_message(const Message& message) {
  json doc = {{"type", std::string(to_string(message.type))},
              {"tick", message.tick},
              {"payload", message.payload}};
  return doc.dump();
}

json track_report_to_json(const TrackReport& r) {
  json doc = {{"id", r.track_id},
              {"class", r.threat_class},
              {"position", json::array({r.position.x, r.position.y})},
              {"altitude", r.altitude},
              {"value", r.value}};
  if (r.exited) doc["exited"] = true;
  return doc;
}

TrackReport track_report_from_json(const json& doc) {
  if (!doc.is_object()) throw ProtocolError("track entry must be an object");
  TrackReport r;
  try {
    r.track_id = doc.at("id").get<std::string>();
    r.threat_class = doc.value("class", std::string(kUnknownThreatClass));
    r.altitude = doc.value("altitude", 0.0);
    r.value = doc.value("value", 1.0);
    r.exited = doc.value("exited", false);
    if (!r.exited) {
      const auto& p = doc.at("position");
      if (!p.is_array() || p.size() != 2) throw ProtocolError("position must be [x, y]");
      r.position = {p[0].get<double>(), p[1].get<double>()};
    }
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("bad track entry: ") + e.what());
  }
  if (r.track_id.empty()) throw ProtocolError("track id must not be empty");
  return r;
}

ProtocolSession::ProtocolSession(const ScenarioSpec& deployment, std::optional<std::uint64_t> seed)
    : state_(initial_state(deployment, seed, TrackFeed::External)) {}

std::string ProtocolSession::error(std::int64_t tick, const std::string& reason) const {
  return format_message({MessageType::Error, tick, {{"reason", reason}}});
}

std::vector<std::string> ProtocolSession::handle_line(std::string_view line) {
  if (closed_) return {};
  Message m;
  try {
    m = parse_message(line);
  } catch (const ProtocolError& e) {
    return {error(state_.tick, e.what())};
  }

  switch (m.type) {
    case MessageType::Hello: {
      const int version = m.payload.value("version", kProtocolVersion);
      if (version != kProtocolVersion) {
        return {error(m.tick, "unsupported protocol version " + std::to_string(version))};
      }
      return {format_message({MessageType::Hello,
                              state_.tick,
                              {{"version", kProtocolVersion},
                               {"deployment", state_.spec->name},
                               {"dt", state_.spec->dt}}})};
    }
    case MessageType::TrackUpdate: {
      if (m.tick != state_.tick + 1) {
        return {error(m.tick, "track update for tick " + std::to_string(m.tick) + ", expected " +
                                  std::to_string(state_.tick + 1))};
      }
      if (!m.payload.contains("tracks") || !m.payload["tracks"].is_array()) {
        return {error(m.tick, "TrackUpdate payload needs a 'tracks' array")};
      }
      std::vector<TrackReport> reports;
      try {
        for (const auto& t : m.payload["tracks"]) reports.push_back(track_report_from_json(t));
      } catch (const ProtocolError& e) {
        return {error(m.tick, e.what())};
      }
      for (auto& r : reports) {
        std::erase_if(buffered_, [&](const TrackReport& b) { return b.track_id == r.track_id; });
        buffered_.push_back(std::move(r));
      }
      return {};
    }
    case MessageType::Tick:
      return on_tick(m);
    case MessageType::Bye:
      closed_ = true;
      state_.trace.append(state_.tick, "end", {{"ticks", state_.tick}});
      return {format_message({MessageType::Bye, state_.tick, json::object()})};
    case MessageType::Error:
      return {};
    case MessageType::EngagementOrder:
    case MessageType::EngagementResult:
      return {error(m.tick, std::string(to_string(m.type)) + " is only sent by the engine")};
  }
  return {};
}

std::vector<std::string> ProtocolSession::on_tick(const Message& m) {
  if (m.tick != state_.tick + 1) {
    return {error(m.tick, "tick " + std::to_string(m.tick) + " out of order, expected " +
                              std::to_string(state_.tick + 1))};
  }
  try {
    step(state_, buffered_);
  } catch (const Error& e) {
    buffered_.clear();
    return {error(m.tick, e.what())};
  }
  buffered_.clear();

  json orders = json::array();
  for (const auto& e : state_.last_tick.fired) orders.push_back(engagement_json(e));
  json results = json::array();
  for (const auto& e : state_.last_tick.resolved) results.push_back(engagement_json(e));
  return {
      format_message({MessageType::EngagementOrder,
                      state_.tick,
                      {{"orders", orders},
                       {"schedule", schedule_json(state_.schedule)},
                       {"mode", std::string(to_string(state_.mode))}}}),
      format_message({MessageType::EngagementResult,
                      state_.tick,
                      {{"results", results}, {"leaks", state_.last_tick.leaked}}}),
  };
}

SimTrace ProtocolSession::trace() const {
  SimTrace t = state_.trace;
  if (t.events.empty() || t.events.back().kind != "end") {
    t.append(state_.tick, "end", {{"ticks", state_.tick}});
  }
  return t;
}

std::pair<std::string, int> parse_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos) throw ProtocolError("endpoint must be host:port, got " + endpoint);
  std::string host = endpoint.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(endpoint.substr(colon + 1), &used);
    if (used != endpoint.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ProtocolError("bad port in endpoint " + endpoint);
  }
  if (port < 0 || port > 65535) throw ProtocolError("port out of range in " + endpoint);
  return {host, port};
}

ProtocolServer::ProtocolServer(const std::string& endpoint) {
  const auto [host, port] = parse_endpoint(endpoint);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  const std::string ip = host == "localhost" ? "127.0.0.1" : host;
  if (::inet_pton(AF_INET, ip.c_str(), &addr.sin_addr) != 1) {
    throw ProtocolError("cannot listen on host " + host);
  }
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw ProtocolError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 1) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(listen_fd_);
    throw ProtocolError("cannot listen on " + endpoint + ": " + reason);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

ProtocolServer::~ProtocolServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void ProtocolServer::serve_one(ProtocolSession& session) {
  int fd = -1;
  do {
    fd = ::accept(listen_fd_, nullptr, nullptr);
  } while (fd < 0 && errno == EINTR);
  if (fd < 0) throw ProtocolError(std::string("accept: ") + std::strerror(errno));
  set_no_delay(fd);

  std::string buffer;
  try {
    while (!session.closed()) {
      const auto line = next_line(fd, buffer);
      if (!line) break;  // peer went away
      if (line->empty()) continue;
      for (const auto& reply : session.handle_line(*line)) send_all(fd, reply + "\n");
    }
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

ProtocolClient::ProtocolClient(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &found) != 0 || found == nullptr) {
    throw ProtocolError("cannot resolve " + host);
  }
  fd_ = ::socket(found->ai_family, found->ai_socktype, found->ai_protocol);
  const bool ok = fd_ >= 0 && ::connect(fd_, found->ai_addr, found->ai_addrlen) == 0;
  ::freeaddrinfo(found);
  if (!ok) {
    if (fd_ >= 0) ::close(fd_);
    throw ProtocolError("cannot connect to " + host + ":" + service);
  }
  set_no_delay(fd_);
}

ProtocolClient::~ProtocolClient() {
  if (fd_ >= 0) ::close(fd_);
}

void ProtocolClient::send_line(std::string_view line) {
  std::string framed(line);
  framed.push_back('\n');
  send_all(fd_, framed);
}

std::optional<std::string> ProtocolClient::read_line() { return next_line(fd_, buffer_); }

}  // namespace tewa
