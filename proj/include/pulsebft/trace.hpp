#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace pulsebft {

using Json = nlohmann::ordered_json;

enum class TracePhase { Input, Send, Receive, Compute };

inline const char* phase_name(TracePhase p) {
  switch (p) {
    case TracePhase::Input: return "input";
    case TracePhase::Send: return "send";
    case TracePhase::Receive: return "receive";
    case TracePhase::Compute: return "compute";
  }
  return "?";
}

inline TracePhase phase_from_name(const std::string& s) {
  if (s == "input") return TracePhase::Input;
  if (s == "send") return TracePhase::Send;
  if (s == "receive") return TracePhase::Receive;
  if (s == "compute") return TracePhase::Compute;
  throw std::runtime_error("bad phase name: " + s);
}

/// One line of the trace. proc 0 marks engine-level events.
struct TraceEvent {
  std::int64_t pulse = 0;
  std::int64_t round = 0;  // absolute round index
  TracePhase phase = TracePhase::Compute;
  int proc = 0;
  std::string kind;
  Json data;
};

/// Replayable event log. Rerunning the same validated config and seed must
/// reproduce the serialized form byte for byte, so events are appended in
/// execution order and serialized with a fixed field order.
class Trace {
 public:
  int verbosity = 0;

  void add(std::int64_t pulse, std::int64_t round, TracePhase phase, int proc,
           std::string kind, Json data = Json::object()) {
    events_.push_back({pulse, round, phase, proc, std::move(kind), std::move(data)});
  }

  const std::vector<TraceEvent>& events() const { return events_; }
  bool empty() const { return events_.empty(); }
  std::size_t size() const { return events_.size(); }

  std::string to_jsonl() const {
    std::string out;
    for (const TraceEvent& e : events_) {
      Json line;
      line["pulse"] = e.pulse;
      line["round"] = e.round;
      line["phase"] = phase_name(e.phase);
      line["proc"] = e.proc;
      line["kind"] = e.kind;
      line["data"] = e.data;
      out += line.dump();
      out += '\n';
    }
    return out;
  }

  static Trace from_jsonl(const std::string& text) {
    Trace t;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      std::string line = text.substr(pos, end - pos);
      pos = end + 1;
      if (line.empty()) continue;
      Json j = Json::parse(line);
      TraceEvent e;
      e.pulse = j.at("pulse").get<std::int64_t>();
      e.round = j.at("round").get<std::int64_t>();
      e.phase = phase_from_name(j.at("phase").get<std::string>());
      e.proc = j.at("proc").get<int>();
      e.kind = j.at("kind").get<std::string>();
      e.data = j.at("data");
      t.events_.push_back(std::move(e));
    }
    return t;
  }

 private:
  std::vector<TraceEvent> events_;
};

}  // namespace pulsebft
