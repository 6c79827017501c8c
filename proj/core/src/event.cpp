#include "ledgermine/event.hpp"

#include "ledgermine/error.hpp"

namespace ledgermine {

void validate_event(const Event& e, const Taxonomy& taxonomy) {
  if (e.id.empty()) {
    throw Error(Errc::malformed_event, "event id must be non-empty");
  }
  if (!Taxonomy::valid_path(e.type)) {
    throw Error(Errc::malformed_event, "event type '" + e.type + "' violates the path syntax");
  }
  if (e.duration_s < 0) {
    throw Error(Errc::malformed_event, "event '" + e.id + "' has negative duration");
  }
  if (!e.attributes.is_object()) {
    throw Error(Errc::malformed_event, "event '" + e.id + "' attrs must be an object");
  }
  for (const auto& [key, value] : e.attributes.items()) {
    if (!(value.is_string() || value.is_number() || value.is_boolean())) {
      throw Error(Errc::malformed_event,
                  "event '" + e.id + "' attr '" + key + "' must be a scalar");
    }
  }
  if (!taxonomy.contains(e.type)) {
    throw Error(Errc::unknown_event_type, "event type '" + e.type + "' not in taxonomy");
  }
}

Event event_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(Errc::malformed_event, "event line must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "id" && key != "type" && key != "ts" && key != "dur_s" &&
        key != "attrs" && key != "source") {
      throw Error(Errc::malformed_event, "unknown event field '" + key + "'");
    }
  }
  for (const char* required : {"id", "type", "ts", "source"}) {
    if (!j.contains(required)) {
      throw Error(Errc::malformed_event, std::string("missing event field '") + required + "'");
    }
  }
  Event e;
  if (!j["id"].is_string() || !j["type"].is_string() || !j["ts"].is_string() ||
      !j["source"].is_string()) {
    throw Error(Errc::malformed_event, "id, type, ts and source must be strings");
  }
  e.id = j["id"].get<std::string>();
  e.type = j["type"].get<std::string>();
  e.source = j["source"].get<std::string>();
  const auto ts = parse_instant(j["ts"].get<std::string>());
  if (!ts) {
    throw Error(Errc::malformed_event,
                "ts '" + j["ts"].get<std::string>() + "' is not ISO-8601 UTC");
  }
  e.timestamp = *ts;
  if (j.contains("dur_s")) {
    if (!j["dur_s"].is_number_integer()) {
      throw Error(Errc::malformed_event, "dur_s must be an integer");
    }
    e.duration_s = j["dur_s"].get<std::int64_t>();
  }
  if (j.contains("attrs")) {
    e.attributes = j["attrs"];
  }
  return e;
}

nlohmann::json event_to_json(const Event& e) {
  nlohmann::json j;
  j["id"] = e.id;
  j["type"] = e.type;
  j["ts"] = format_instant(e.timestamp);
  if (e.duration_s != 0) j["dur_s"] = e.duration_s;
  if (!e.attributes.empty()) j["attrs"] = e.attributes;
  j["source"] = e.source;
  return j;
}

}  // namespace ledgermine
