#include "ledgermine/pattern.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "ledgermine/error.hpp"
#include "ledgermine/time.hpp"

namespace ledgermine {

Pattern Pattern::atom(std::string type_path) {
  if (!Taxonomy::valid_path(type_path)) {
    throw Error(Errc::malformed_event, "invalid atom path '" + type_path + "'");
  }
  auto node = std::make_shared<Node>();
  node->atom = std::move(type_path);
  return Pattern(std::move(node));
}

Pattern Pattern::seq(Pattern left, Pattern right, Window window) {
  if (window.lo_s < 0 || window.lo_s > window.hi_s) {
    throw Error(Errc::window_error,
                "window [" + std::to_string(window.lo_s) + "," +
                    std::to_string(window.hi_s) + "]s violates 0 <= a <= b");
  }
  auto node = std::make_shared<Node>();
  node->left = std::make_shared<const Pattern>(std::move(left));
  node->right = std::make_shared<const Pattern>(std::move(right));
  node->window = window;
  return Pattern(std::move(node));
}

std::vector<std::string> Pattern::atom_paths() const {
  std::vector<std::string> out;
  const auto walk = [&out](const Pattern& p, const auto& self) -> void {
    if (p.is_atom()) {
      out.push_back(p.atom_type());
    } else {
      self(p.left(), self);
      self(p.right(), self);
    }
  };
  walk(*this, walk);
  return out;
}

std::size_t Pattern::depth() const {
  if (is_atom()) return 1;
  return 1 + std::max(left().depth(), right().depth());
}

bool Pattern::operator==(const Pattern& other) const {
  if (is_atom() != other.is_atom()) return false;
  if (is_atom()) return atom_type() == other.atom_type();
  return window() == other.window() && left() == other.left() && right() == other.right();
}

namespace {

// Recursive-descent parser over the raw byte string. Offsets in errors are
// byte positions into the original input.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Pattern parse() {
    Pattern p = parse_pattern();
    skip_ws();
    if (pos_ != text_.size()) {
      fail("end of input");
    }
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    throw Error(Errc::syntax_error,
                "offset " + std::to_string(pos_) + ": expected " + expected);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool at_window_operator() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    if (text_[pos_] != 'W' && text_[pos_] != 'w') return false;
    return pos_ + 1 < text_.size() && text_[pos_ + 1] == '[';
  }

  Pattern parse_pattern() {
    Pattern p = parse_term();
    while (at_window_operator()) {
      pos_ += 2;  // consume "W["
      const std::int64_t lo = parse_number();
      skip_ws();
      expect(',');
      const std::int64_t hi = parse_number();
      skip_ws();
      expect(']');
      if (lo < 0 || lo > hi) {
        throw Error(Errc::window_error,
                    "window [" + format_hours(lo) + "," + format_hours(hi) +
                        "]h violates 0 <= a <= b");
      }
      Pattern rhs = parse_term();
      p = Pattern::seq(std::move(p), std::move(rhs), Window{lo, hi});
    }
    return p;
  }

  Pattern parse_term() {
    skip_ws();
    if (pos_ >= text_.size()) fail("type path or '('");
    if (text_[pos_] == '(') {
      ++pos_;
      Pattern p = parse_pattern();
      skip_ws();
      expect(')');
      return p;
    }
    return Pattern::atom(parse_path());
  }

  std::string parse_path() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      const bool path_char =
          (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
      if (!path_char) break;
      ++pos_;
    }
    // A lone W followed by '[' is the operator, never a path; paths that
    // merely start with 'w' ("work") are fine.
    std::string path(text_.substr(start, pos_ - start));
    if (path.empty() || !Taxonomy::valid_path(path)) {
      pos_ = start;
      fail("type path");
    }
    return path;
  }

  // Hours with at most 2 fraction digits, converted exactly to seconds
  // (0.01h = 36s). A leading '-' is lexed so that negative bounds surface
  // as WindowError rather than SyntaxError.
  std::int64_t parse_number() {
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    std::int64_t whole = 0;
    std::size_t digits = 0;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      whole = whole * 10 + (text_[pos_] - '0');
      if (whole > 1000000000) {
        pos_ = start;
        fail("number within range");
      }
      ++pos_;
      ++digits;
    }
    if (digits == 0) {
      pos_ = start;
      fail("number");
    }
    std::int64_t frac_hundredths = 0;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      std::size_t frac_digits = 0;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
        if (frac_digits == 2) {
          fail("at most 2 fraction digits");
        }
        frac_hundredths = frac_hundredths * 10 + (text_[pos_] - '0');
        ++pos_;
        ++frac_digits;
      }
      if (frac_digits == 0) fail("fraction digit");
      if (frac_digits == 1) frac_hundredths *= 10;
    }
    const std::int64_t hundredths = whole * 100 + frac_hundredths;
    const std::int64_t seconds = hundredths * 36;
    return negative ? -seconds : seconds;
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("'") + c + "'");
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Pattern parse_pattern(std::string_view text) {
  return Parser(text).parse();
}

std::string format_hours(std::int64_t seconds) {
  const bool neg = seconds < 0;
  std::int64_t s = neg ? -seconds : seconds;
  std::string out = neg ? "-" : "";
  if (s % 36 == 0) {
    const std::int64_t hundredths = s / 36;
    out += std::to_string(hundredths / 100);
    const std::int64_t frac = hundredths % 100;
    if (frac != 0) {
      char buf[8];
      if (frac % 10 == 0) {
        std::snprintf(buf, sizeof(buf), ".%lld", static_cast<long long>(frac / 10));
      } else {
        std::snprintf(buf, sizeof(buf), ".%02lld", static_cast<long long>(frac));
      }
      out += buf;
    }
    return out;
  }
  // Off the 0.01h grid: not expressible in the grammar; best-effort decimal.
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g",
                static_cast<double>(s) / static_cast<double>(kSecondsPerHour));
  return out + buf;
}

namespace {

void format_into(const Pattern& p, std::string& out) {
  if (p.is_atom()) {
    out += p.atom_type();
    return;
  }
  // Chains associate left, so only a composite right side needs parens.
  format_into(p.left(), out);
  out += " W[" + format_hours(p.window().lo_s) + "," + format_hours(p.window().hi_s) + "] ";
  if (p.right().is_atom()) {
    format_into(p.right(), out);
  } else {
    out += "(";
    format_into(p.right(), out);
    out += ")";
  }
}

}  // namespace

std::string format_pattern(const Pattern& pattern) {
  std::string out;
  format_into(pattern, out);
  return out;
}

void validate_pattern(const Pattern& pattern, const Taxonomy& taxonomy) {
  std::set<std::string> unknown;
  for (const auto& path : pattern.atom_paths()) {
    if (!taxonomy.contains(path)) unknown.insert(path);
  }
  if (!unknown.empty()) {
    std::string detail = "unknown atom(s):";
    for (const auto& path : unknown) detail += " " + path;
    throw Error(Errc::unknown_event_type, detail);
  }
}

}  // namespace ledgermine
