#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ledgermine/taxonomy.hpp"

namespace ledgermine {

// Inclusive bounds in seconds; 0 <= lo <= hi.
struct Window {
  std::int64_t lo_s = 0;
  std::int64_t hi_s = 0;

  friend bool operator==(const Window&, const Window&) = default;
  friend auto operator<=>(const Window&, const Window&) = default;
};

// AST of the temporal pattern language. A pattern is either a single type
// atom or a sequence `left W[a,b] right`: an occurrence of `left` followed
// by one of `right` with an anchor-to-anchor gap inside the closed window.
// The occurrence time (anchor) of a composite is the timestamp of its
// final matched event, which makes left-associative chaining well-defined.
//
// Concrete grammar (whitespace-insensitive, "w" accepted for "W"):
//   pattern := term { "W[" number "," number "]" term }
//   term    := PATH | "(" pattern ")"
//   number  := hours, decimal, at most 2 fraction digits
//   PATH    := [a-z0-9_]+(\.[a-z0-9_]+)*
class Pattern {
 public:
  static Pattern atom(std::string type_path);
  // Throws WindowError unless 0 <= lo <= hi.
  static Pattern seq(Pattern left, Pattern right, Window window);

  bool is_atom() const { return node_->atom.has_value(); }
  const std::string& atom_type() const { return *node_->atom; }
  const Pattern& left() const { return *node_->left; }
  const Pattern& right() const { return *node_->right; }
  const Window& window() const { return node_->window; }

  // Leaf type paths, in-order.
  std::vector<std::string> atom_paths() const;
  std::size_t depth() const;

  bool operator==(const Pattern& other) const;

 private:
  struct Node {
    std::optional<std::string> atom;
    std::shared_ptr<const Pattern> left;
    std::shared_ptr<const Pattern> right;
    Window window;
  };
  explicit Pattern(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Throws SyntaxError (with byte offset and the expected token) or
// WindowError.
Pattern parse_pattern(std::string_view text);

// Canonical text; parse_pattern(format_pattern(p)) == p for every pattern
// whose windows sit on the grammar's 0.01h grid (multiples of 36s). Hours
// print as the shortest exact decimal.
std::string format_pattern(const Pattern& pattern);

// Shortest-decimal hour rendering of a seconds value, shared with the
// knowledge-graph DOT export.
std::string format_hours(std::int64_t seconds);

// Throws UnknownEventType listing every offending atom.
void validate_pattern(const Pattern& pattern, const Taxonomy& taxonomy);

}  // namespace ledgermine
