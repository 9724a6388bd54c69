#pragma once

// Line-delimited JSON protocol between an external simulator and the engine.
// Every message is one line: {"type": ..., "tick": n, "payload": {...}}.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tewa/engine.hpp"
#include "tewa/scenario.hpp"

namespace tewa {

inline constexpr int kProtocolVersion = 1;

enum class MessageType { Hello, TrackUpdate, Tick, EngagementOrder, EngagementResult, Error, Bye };

std::string_view to_string(MessageType t);
MessageType parse_message_type(std::string_view s);  // throws ProtocolError

struct Message {
  MessageType type = MessageType::Hello;
  std::int64_t tick = 0;
  nlohmann::json payload = nlohmann::json::object();
};

// Throws ProtocolError with a readable reason.
Message parse_message(std::string_view line);
std::string format_message(const Message& message);

nlohmann::json track_report_to_json(const TrackReport& report);
TrackReport track_report_from_json(const nlohmann::json& doc);

// Transport-free session: feed it lines, get reply lines back.
class ProtocolSession {
 public:
  explicit ProtocolSession(const ScenarioSpec& deployment,
                           std::optional<std::uint64_t> seed = std::nullopt);

  std::vector<std::string> handle_line(std::string_view line);
  bool closed() const { return closed_; }
  const SimState& state() const { return state_; }
  // Session log so far, terminated with an "end" record.
  SimTrace trace() const;

 private:
  std::vector<std::string> on_tick(const Message& m);
  std::string error(std::int64_t tick, const std::string& reason) const;

  SimState state_;
  std::vector<TrackReport> buffered_;
  bool closed_ = false;
};

// Minimal blocking TCP endpoint serving one simulator connection at a time.
class ProtocolServer {
 public:
  // endpoint is "host:port"; port 0 picks a free port.
  explicit ProtocolServer(const std::string& endpoint);
  ~ProtocolServer();
  ProtocolServer(const ProtocolServer&) = delete;
  ProtocolServer& operator=(const ProtocolServer&) = delete;

  int port() const { return port_; }
  // Accepts one connection and runs the session until Bye or disconnect.
  void serve_one(ProtocolSession& session);

 private:
  int listen_fd_ = -1;
  int port_ = 0;
};

// Blocking line client for tests and tooling.
class ProtocolClient {
 public:
  ProtocolClient(const std::string& host, int port);
  ~ProtocolClient();
  ProtocolClient(const ProtocolClient&) = delete;
  ProtocolClient& operator=(const ProtocolClient&) = delete;

  void send_line(std::string_view line);
  // nullopt once the peer has closed the connection.
  std::optional<std::string> read_line();

 private:
  int fd_ = -1;
  std::string buffer_;
};

std::pair<std::string, int> parse_endpoint(const std::string& endpoint);

}  // namespace tewa
