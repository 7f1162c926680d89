#pragma once

/// @file ntriples.hpp
/// Reader and writer for the subset of N-Triples used by the toolkit:
/// IRI subjects and predicates, IRI or literal objects, `#` comments.
/// Blank nodes and named graphs are not supported.

#include <cctype>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "biaswalk/error.hpp"

namespace biaswalk {

struct Iri {
  std::string value;

  friend bool operator==(const Iri&, const Iri&) = default;
};

struct Literal {
  std::string lexical;
  std::optional<std::string> datatype;
  /// Language tag without the `@`; empty when absent.
  std::string language;

  friend bool operator==(const Literal&, const Literal&) = default;
};

using Object = std::variant<Iri, Literal>;

struct Triple {
  std::string subject;
  std::string predicate;
  Object object;

  bool has_iri_object() const noexcept { return std::holds_alternative<Iri>(object); }

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct ParseOptions {
  /// Skip malformed lines instead of throwing.
  bool lenient = false;
  /// Receives every skipped line's error in lenient mode.
  std::function<void(const ParseError&)> on_warning;
};

namespace detail {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

/// Cursor over one statement line. Member functions return an error reason on
/// failure instead of throwing so the reader can decide strict vs lenient.
class LineParser {
 public:
  explicit LineParser(std::string_view line) : s_(line) {}

  std::optional<std::string> parse(Triple& out) {
    skip_ws();
    if (auto err = read_iri(out.subject, "subject")) return err;
    skip_ws();
    if (auto err = read_iri(out.predicate, "predicate")) return err;
    skip_ws();
    if (at_end()) return "missing object";
    if (peek() == '<') {
      Iri iri;
      if (auto err = read_iri(iri.value, "object")) return err;
      out.object = std::move(iri);
    } else if (peek() == '"') {
      Literal lit;
      if (auto err = read_literal(lit)) return err;
      out.object = std::move(lit);
    } else if (peek() == '_') {
      return "blank nodes are not supported";
    } else {
      return "object must be an IRI or a literal";
    }
    skip_ws();
    if (at_end() || peek() != '.') return "missing terminating '.'";
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') return "unexpected text after '.'";
    return std::nullopt;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  std::optional<std::string> read_hex(std::size_t digits, std::uint32_t& cp) {
    if (pos_ + digits > s_.size()) return "truncated \\u escape";
    cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const char c = s_[pos_++];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') cp |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') cp |= static_cast<std::uint32_t>(c - 'A' + 10);
      else return "invalid hex digit in escape";
    }
    if (cp > 0x10FFFF) return "code point out of range";
    return std::nullopt;
  }

  std::optional<std::string> read_uchar(std::string& out) {
    // Positioned just after the backslash.
    if (at_end()) return "dangling backslash";
    const char kind = s_[pos_++];
    std::uint32_t cp = 0;
    if (kind == 'u') {
      if (auto err = read_hex(4, cp)) return err;
    } else if (kind == 'U') {
      if (auto err = read_hex(8, cp)) return err;
    } else {
      return std::string("invalid escape \\") + kind;
    }
    append_utf8(out, cp);
    return std::nullopt;
  }

  std::optional<std::string> read_iri(std::string& out, std::string_view role) {
    out.clear();
    if (at_end()) return "missing " + std::string(role);
    if (peek() == '_') return "blank nodes are not supported";
    if (peek() != '<') return std::string(role) + " must be an IRI";
    ++pos_;
    while (true) {
      if (at_end()) return "unterminated IRI";
      const char c = s_[pos_++];
      if (c == '>') break;
      if (c == '\\') {
        if (auto err = read_uchar(out)) return err;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
          c == '`') {
        return "illegal character in IRI";
      }
      out += c;
    }
    if (out.empty()) return "empty IRI";
    return std::nullopt;
  }

  std::optional<std::string> read_literal(Literal& lit) {
    ++pos_;  // opening quote
    while (true) {
      if (at_end()) return "unterminated literal";
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lit.lexical += c;
        continue;
      }
      if (at_end()) return "dangling backslash";
      const char e = peek();
      switch (e) {
        case 't': lit.lexical += '\t'; ++pos_; break;
        case 'b': lit.lexical += '\b'; ++pos_; break;
        case 'n': lit.lexical += '\n'; ++pos_; break;
        case 'r': lit.lexical += '\r'; ++pos_; break;
        case 'f': lit.lexical += '\f'; ++pos_; break;
        case '"': lit.lexical += '"'; ++pos_; break;
        case '\'': lit.lexical += '\''; ++pos_; break;
        case '\\': lit.lexical += '\\'; ++pos_; break;
        default:
          if (auto err = read_uchar(lit.lexical)) return err;
      }
    }
    if (!at_end() && peek() == '^') {
      if (pos_ + 1 >= s_.size() || s_[pos_ + 1] != '^') return "expected '^^' before datatype";
      pos_ += 2;
      std::string dt;
      if (auto err = read_iri(dt, "datatype")) return err;
      lit.datatype = std::move(dt);
    } else if (!at_end() && peek() == '@') {
      ++pos_;
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
      if (pos_ == start) return "empty language tag";
      lit.language = std::string(s_.substr(start, pos_ - start));
    }
    return std::nullopt;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline void escape_iri(std::string& out, std::string_view iri) {
  static constexpr char hex[] = "0123456789ABCDEF";
  for (const char c : iri) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
        c == '`' || c == '\\') {
      out += "\\u00";
      out += hex[u >> 4];
      out += hex[u & 0xF];
    } else {
      out += c;
    }
  }
}

}  // namespace detail

/// Streaming N-Triples reader. One statement per line.
class NTriplesReader {
 public:
  explicit NTriplesReader(std::istream& in, ParseOptions options = {}) : in_(in), options_(std::move(options)) {}

  /// Next triple, or nullopt at end of input. Throws ParseError on a malformed
  /// line unless lenient.
  std::optional<Triple> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::string_view view(line);
      if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
      const auto first = view.find_first_not_of(" \t");
      if (first == std::string_view::npos || view[first] == '#') continue;

      Triple triple;
      detail::LineParser parser(view);
      if (auto err = parser.parse(triple)) {
        ParseError error(Stage::ingest, line_no_, std::string(view), *err);
        if (!options_.lenient) throw error;
        ++skipped_;
        if (options_.on_warning) options_.on_warning(error);
        continue;
      }
      return triple;
    }
    return std::nullopt;
  }

  std::size_t line() const noexcept { return line_no_; }
  std::size_t skipped() const noexcept { return skipped_; }

 private:
  std::istream& in_;
  ParseOptions options_;
  std::size_t line_no_ = 0;
  std::size_t skipped_ = 0;
};

inline std::vector<Triple> parse_ntriples(std::istream& in, ParseOptions options = {}) {
  NTriplesReader reader(in, std::move(options));
  std::vector<Triple> out;
  while (auto t = reader.next()) out.push_back(std::move(*t));
  return out;
}

inline std::string format_iri(std::string_view iri) {
  std::string out = "<";
  detail::escape_iri(out, iri);
  out += '>';
  return out;
}

inline std::string format_literal(const Literal& lit) {
  std::string out = "\"";
  for (const char c : lit.lexical) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  if (lit.datatype) {
    out += "^^";
    out += format_iri(*lit.datatype);
  } else if (!lit.language.empty()) {
    out += '@';
    out += lit.language;
  }
  return out;
}

inline std::string format_triple(const Triple& t) {
  std::string out = format_iri(t.subject);
  out += ' ';
  out += format_iri(t.predicate);
  out += ' ';
  if (const auto* iri = std::get_if<Iri>(&t.object)) out += format_iri(iri->value);
  else out += format_literal(std::get<Literal>(t.object));
  out += " .";
  return out;
}

inline void write_ntriples(std::ostream& out, const std::vector<Triple>& triples) {
  for (const auto& t : triples) out << format_triple(t) << '\n';
}

}  // namespace biaswalk
