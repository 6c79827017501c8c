#include "ledgermine/taxonomy.hpp"

#include <fstream>

#include <json.hpp>

#include "ledgermine/error.hpp"
#include "ledgermine/rng.hpp"

namespace ledgermine {
namespace {

bool path_segment_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

}  // namespace

bool Taxonomy::valid_path(std::string_view path) {
  if (path.empty() || path.front() == '.' || path.back() == '.') return false;
  bool seg_empty = true;
  for (char c : path) {
    if (c == '.') {
      if (seg_empty) return false;
      seg_empty = true;
    } else if (path_segment_char(c)) {
      seg_empty = false;
    } else {
      return false;
    }
  }
  return !seg_empty;
}

void Taxonomy::add_type(const std::string& path) {
  if (!valid_path(path)) {
    throw Error(Errc::malformed_event, "invalid type path '" + path + "'");
  }
  std::size_t pos = 0;
  while ((pos = path.find('.', pos)) != std::string::npos) {
    paths_.insert(path.substr(0, pos));
    ++pos;
  }
  paths_.insert(path);
}

void Taxonomy::mark_actionable(const std::string& path) {
  if (!contains(path)) {
    throw Error(Errc::unknown_event_type, "actionable path '" + path + "' not in taxonomy");
  }
  actionable_.insert(path);
}

void Taxonomy::mark_media(const std::string& path) {
  if (!contains(path)) {
    throw Error(Errc::unknown_event_type, "media path '" + path + "' not in taxonomy");
  }
  media_.insert(path);
}

bool Taxonomy::contains(std::string_view path) const {
  return paths_.find(std::string(path)) != paths_.end();
}

bool Taxonomy::is_descendant_or_equal(std::string_view path, std::string_view ancestor) {
  if (path.size() < ancestor.size()) return false;
  if (path.substr(0, ancestor.size()) != ancestor) return false;
  return path.size() == ancestor.size() || path[ancestor.size()] == '.';
}

bool Taxonomy::type_matches(std::string_view event_type, std::string_view pattern_atom) const {
  if (!contains(event_type)) {
    throw Error(Errc::unknown_event_type, "type '" + std::string(event_type) + "' not in taxonomy");
  }
  if (!contains(pattern_atom)) {
    throw Error(Errc::unknown_event_type, "type '" + std::string(pattern_atom) + "' not in taxonomy");
  }
  return is_descendant_or_equal(event_type, pattern_atom);
}

bool Taxonomy::marked_or_descendant(std::string_view path, const std::set<std::string>& marks) const {
  for (const auto& m : marks) {
    if (is_descendant_or_equal(path, m)) return true;
  }
  return false;
}

bool Taxonomy::is_actionable(std::string_view path) const {
  return marked_or_descendant(path, actionable_);
}

bool Taxonomy::is_media(std::string_view path) const {
  return marked_or_descendant(path, media_);
}

std::vector<std::string> Taxonomy::leaves() const {
  std::vector<std::string> out;
  for (auto it = paths_.begin(); it != paths_.end(); ++it) {
    auto next = std::next(it);
    const bool has_child =
        next != paths_.end() && is_descendant_or_equal(*next, *it) && *next != *it;
    if (!has_child) out.push_back(*it);
  }
  return out;
}

std::string Taxonomy::fingerprint() const {
  std::string canonical;
  for (const auto& p : paths_) canonical += p + "\n";
  canonical += "#actionable\n";
  for (const auto& p : actionable_) canonical += p + "\n";
  canonical += "#media\n";
  for (const auto& p : media_) canonical += p + "\n";
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  return buf;
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error, "cannot open taxonomy file " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, "taxonomy file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("types") || !doc["types"].is_array()) {
    throw Error(Errc::parse_error, "taxonomy file must be an object with a 'types' array");
  }
  Taxonomy tax;
  for (const auto& t : doc["types"]) {
    if (!t.is_string()) throw Error(Errc::parse_error, "taxonomy 'types' entries must be strings");
    tax.add_type(t.get<std::string>());
  }
  if (doc.contains("actionable")) {
    for (const auto& t : doc["actionable"]) tax.mark_actionable(t.get<std::string>());
  }
  if (doc.contains("media")) {
    for (const auto& t : doc["media"]) tax.mark_media(t.get<std::string>());
  }
  return tax;
}

void Taxonomy::save(const std::filesystem::path& path) const {
  nlohmann::json doc;
  doc["types"] = paths_;
  doc["actionable"] = actionable_;
  doc["media"] = media_;
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::io_error, "cannot write taxonomy file " + path.string());
  }
  out << doc.dump(2) << "\n";
}

}  // namespace ledgermine
