#include <doctest.h>

#include "support.hpp"
#include "tewa/engine.hpp"
#include "tewa/errors.hpp"
#include "tewa/protocol.hpp"
#include "tewa/scenario.hpp"
#include "tewa/trace.hpp"
#include "wire.hpp"

using namespace tewa;
using namespace tewa::testing;

namespace {

const char* kInline = R"({
  "version": 1,
  "name": "inline",
  "libraries": {
    "threat_classes": [{"id": "jet", "base_capability": 0.6, "base_speed": 0.3}],
    "weapon_classes": [{"id": "gun", "lethality_index": 0.8}],
    "correlation": [{"weapon": "gun", "threat": "jet", "c": 0.7},
                    {"weapon": "gun", "threat": "unknown", "c": 0.4}]
  },
  "das": [{"id": "A", "center": [0, 0], "radius": 1}],
  "weapons": [{"id": "W", "da": "A", "class": "gun", "position": [0, 0], "range": 8,
               "projectile_speed": 1.0, "ammo": 5}],
  "threats": [{"id": "T", "class": "jet", "waypoints": [[0, 15], [0, 0]], "speeds": [0.3]}]
})";

std::string with(std::string doc, const std::string& from, const std::string& to) {
  const auto at = doc.find(from);
  REQUIRE(at != std::string::npos);
  return doc.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("parse an inline scenario") {
  const auto spec = parse_scenario(kInline);
  CHECK(spec.name == "inline");
  REQUIRE(spec.das.size() == 1);
  CHECK(spec.das[0].weapon_ids == std::vector<std::string>{"W"});
  CHECK(spec.das[0].quota == 2);
  CHECK(spec.weapons[0].lethality_index == 0.8);
  CHECK(spec.threats[0].leg_speeds == std::vector<double>{0.3});
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("scenario errors") {
  SUBCASE("weapon on an unknown asset") {
    CHECK_THROWS_AS(parse_scenario(with(kInline, R"("da": "A")", R"("da": "Z")")), ValidationError);
  }
  SUBCASE("malformed text reports its line") {
    try {
      parse_scenario(with(kInline, R"("radius": 1)", R"("radius": })"));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 10);
    }
  }
  SUBCASE("wrong field type names the field") {
    try {
      parse_scenario(with(kInline, R"("range": 8)", R"("range": "far")"));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.field() == "weapons[0].range");
    }
  }
  SUBCASE("another format version") {
    CHECK_THROWS_AS(parse_scenario(with(kInline, R"("version": 1)", R"("version": 2)")),
                    VersionMismatch);
  }
  SUBCASE("missing file") {
    CHECK_THROWS(load_scenario_file(data_dir() / "scenarios" / "absent.json"));
  }
}

TEST_CASE("scenario documents round-trip") {
  for (const auto* name : {"minimal", "table1_k5", "table1_k10", "table1_k50", "gap_instance"}) {
    CAPTURE(name);
    const auto spec = load_scenario_file(scenario_path(name));
    const auto text = serialize_scenario(spec);
    const auto again = parse_scenario(text);
    CHECK(serialize_scenario(again) == text);
    CHECK(scenario_hash(again) == scenario_hash(spec));
  }
  const auto deployment = load_scenario_file(data_dir() / "deployments" / "grid_deployment.json");
  CHECK(deployment.threats.empty());
  CHECK(deployment.weapons.size() == 10);
}

TEST_CASE("trace documents") {
  const auto spec = load_scenario_file(scenario_path("table1_k5"));
  const auto run = run_scenario(spec);
  const auto text = write_trace(run.trace);

  SUBCASE("round trip") {
    CHECK(read_trace(text) == run.trace);
    CHECK(run.trace.header.spec_hash == scenario_hash(spec));
  }
  SUBCASE("empty trace") {
    SimTrace empty;
    empty.header.scenario = "nothing";
    CHECK(read_trace(write_trace(empty)) == empty);
  }
  SUBCASE("truncated") {
    const auto cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
    CHECK_THROWS_AS(read_trace(cut), CorruptTrace);
    CHECK_THROWS_AS(read_trace(text.substr(0, text.size() / 2)), CorruptTrace);
    CHECK_THROWS_AS(read_trace(""), CorruptTrace);
  }
  SUBCASE("other version") {
    const auto at = text.find("\"version\":1");
    REQUIRE(at != std::string::npos);
    auto bumped = text;
    bumped.replace(at, 11, "\"version\":9");
    CHECK_THROWS_AS(read_trace(bumped), VersionMismatch);
  }
  SUBCASE("hash") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  }
}

TEST_CASE("protocol messages") {
  const auto m = parse_message(R"({"type": "Tick", "tick": 3, "payload": {}})");
  CHECK(m.type == MessageType::Tick);
  CHECK(m.tick == 3);
  CHECK(parse_message(format_message(m)).type == MessageType::Tick);
  CHECK_THROWS_AS(parse_message("not json"), ProtocolError);
  CHECK_THROWS_AS(parse_message(R"({"type": "Dance", "tick": 1})"), ProtocolError);

  const TrackReport r{"X", "jet", {1.5, -2}, 0.4, 0.7, false};
  const auto back = track_report_from_json(track_report_to_json(r));
  CHECK(back.track_id == "X");
  CHECK(back.position.x == 1.5);
  CHECK(back.altitude == 0.4);
  CHECK(back.value == 0.7);
}

TEST_CASE("protocol session") {
  const auto deployment = load_scenario_file(data_dir() / "deployments" / "grid_deployment.json");
  ProtocolSession session(deployment, 5);

  auto one = [](const std::vector<std::string>& replies, std::size_t n = 1) {
    REQUIRE(replies.size() == n);
    return parse_message(replies[0]);
  };

  CHECK(one(session.handle_line(R"({"type":"Hello","tick":0,"payload":{"version":1}})")).type ==
        MessageType::Hello);

  SUBCASE("tick without tracks orders nothing") {
    const auto replies = session.handle_line(R"({"type":"Tick","tick":1,"payload":{}})");
    REQUIRE(replies.size() == 2);
    const auto order = parse_message(replies[0]);
    CHECK(order.type == MessageType::EngagementOrder);
    CHECK(order.payload["orders"].empty());
    CHECK(parse_message(replies[1]).type == MessageType::EngagementResult);
  }
  SUBCASE("malformed input keeps the session alive") {
    CHECK(one(session.handle_line("{{{")).type == MessageType::Error);
    CHECK_FALSE(session.closed());
    CHECK(session.handle_line(R"({"type":"Tick","tick":1,"payload":{}})").size() == 2);
  }
  SUBCASE("out-of-order tick") {
    const auto err = one(session.handle_line(R"({"type":"Tick","tick":4,"payload":{}})"));
    CHECK(err.type == MessageType::Error);
    CHECK(session.state().tick == 0);
  }
  SUBCASE("bad track update") {
    const auto err = one(session.handle_line(
        R"({"type":"TrackUpdate","tick":1,"payload":{"tracks":[{"class":"fighter"}]}})"));
    CHECK(err.type == MessageType::Error);
  }
  SUBCASE("tracks are picked up and scheduled") {
    CHECK(session
              .handle_line(R"({"type":"TrackUpdate","tick":1,"payload":{"tracks":[
                 {"id":"X","class":"fighter","position":[0,14],"altitude":0.5}]}})")
              .empty());
    session.handle_line(R"({"type":"Tick","tick":1,"payload":{}})");
    session.handle_line(R"({"type":"TrackUpdate","tick":2,"payload":{"tracks":[
                 {"id":"X","class":"fighter","position":[0,13.97],"altitude":0.5}]}})");
    const auto replies = session.handle_line(R"({"type":"Tick","tick":2,"payload":{}})");
    REQUIRE(replies.size() == 2);
    CHECK_FALSE(parse_message(replies[0]).payload["schedule"].empty());
  }
  SUBCASE("bye closes") {
    CHECK(one(session.handle_line(R"({"type":"Bye","tick":0,"payload":{}})")).type == MessageType::Bye);
    CHECK(session.closed());
    CHECK(session.handle_line(R"({"type":"Tick","tick":1,"payload":{}})").empty());
    CHECK(session.trace().events.back().kind == "end");
  }
}

TEST_CASE("endpoint parsing") {
  CHECK(parse_endpoint("127.0.0.1:9000") == std::pair<std::string, int>{"127.0.0.1", 9000});
  CHECK(parse_endpoint(":0").first == "127.0.0.1");
  CHECK_THROWS_AS(parse_endpoint("nohost"), ProtocolError);
  CHECK_THROWS_AS(parse_endpoint("h:99999"), ProtocolError);
}

TEST_CASE("socket run matches the in-process run") {
  const auto spec = load_scenario_file(scenario_path("table1_k5"));
  const auto local = run_scenario(spec, 21);
  const auto remote = run_over_wire(spec, 21, local.metrics.ticks);
  const auto a = decision_events(local.trace);
  const auto b = decision_events(remote);
  CHECK(a.size() > 10);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(i);
    CHECK(a[i].tick == b[i].tick);
    CHECK(a[i].kind == b[i].kind);
    CHECK(a[i].payload == b[i].payload);
  }
}
