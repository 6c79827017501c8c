#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ledgermine {

// Shared hierarchical vocabulary of event types. Paths are dotted,
// lowercase segments ("exercise.bike"); adding a path implies all of its
// ancestors. Two designated subsets drive the guidance module: actionable
// types may be recommended, media types name guidance channels.
class Taxonomy {
 public:
  // [a-z0-9_]+(\.[a-z0-9_]+)*
  static bool valid_path(std::string_view path);

  // Inserts the path and every ancestor. Throws MalformedEvent on syntax.
  void add_type(const std::string& path);

  // Throws UnknownEventType if the path is not present.
  void mark_actionable(const std::string& path);
  void mark_media(const std::string& path);

  bool contains(std::string_view path) const;

  // True iff event_type equals pattern_atom or descends from it. Both
  // paths must exist; throws UnknownEventType otherwise.
  bool type_matches(std::string_view event_type, std::string_view pattern_atom) const;

  // Membership including descendants of a marked path.
  bool is_actionable(std::string_view path) const;
  bool is_media(std::string_view path) const;

  // Paths with no children, sorted.
  std::vector<std::string> leaves() const;

  const std::set<std::string>& paths() const { return paths_; }
  const std::set<std::string>& actionable() const { return actionable_; }
  const std::set<std::string>& media() const { return media_; }
  bool empty() const { return paths_.empty(); }

  // Stable identity over the full content; knowledge-graph files record it.
  std::string fingerprint() const;

  // JSON file: {"types": [...], "actionable": [...], "media": [...]}.
  static Taxonomy load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  static bool is_descendant_or_equal(std::string_view path, std::string_view ancestor);
  bool marked_or_descendant(std::string_view path, const std::set<std::string>& marks) const;

  std::set<std::string> paths_;
  std::set<std::string> actionable_;
  std::set<std::string> media_;
};

}  // namespace ledgermine
