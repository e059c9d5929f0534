#include "errsynth/pyliteral.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "errsynth/error.hpp"

namespace errsynth::py {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Value parse_all() {
    Value v = value();
    ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, "python literal: " + what + " at offset " + std::to_string(pos_));
  }

  void ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool keyword(std::string_view kw) {
    if (s_.substr(pos_, kw.size()) != kw) return false;
    std::size_t end = pos_ + kw.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
    pos_ = end;
    return true;
  }

  Value value() {
    ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '{') return dict();
    if (c == '[') return sequence('[', ']');
    if (c == '(') return sequence('(', ')');
    if (c == '\'' || c == '"') return Value::str(string());
    if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) return number();
    Value v;
    if (keyword("None")) return v;
    if (keyword("True")) {
      v.kind = Value::Kind::Bool;
      v.b = true;
      return v;
    }
    if (keyword("False")) {
      v.kind = Value::Kind::Bool;
      return v;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Value dict() {
    ++pos_;
    Value v;
    v.kind = Value::Kind::Dict;
    if (eat('}')) return v;
    for (;;) {
      Value k = value();
      if (!eat(':')) fail("expected ':'");
      Value val = value();
      v.dict.emplace_back(std::move(k), std::move(val));
      if (eat(',')) {
        if (eat('}')) return v;
        continue;
      }
      if (eat('}')) return v;
      fail("expected ',' or '}'");
    }
  }

  Value sequence(char open, char close) {
    (void)open;
    ++pos_;
    Value v;
    v.kind = Value::Kind::List;
    if (eat(close)) return v;
    for (;;) {
      v.list.push_back(value());
      if (eat(',')) {
        if (eat(close)) return v;
        continue;
      }
      if (eat(close)) return v;
      fail(std::string("expected ',' or '") + close + "'");
    }
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  std::uint32_t hex(std::size_t digits) {
    if (pos_ + digits > s_.size()) fail("short escape");
    std::uint32_t cp = 0;
    auto r = std::from_chars(s_.data() + pos_, s_.data() + pos_ + digits, cp, 16);
    if (r.ec != std::errc() || r.ptr != s_.data() + pos_ + digits) fail("bad hex escape");
    pos_ += digits;
    return cp;
  }

  std::string string() {
    char q = s_[pos_++];
    std::string out;
    while (pos_ < s_.size()) {
      char c = s_[pos_++];
      if (c == q) return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= s_.size()) break;
      char e = s_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '0': out.push_back('\0'); break;
        case '\\': out.push_back('\\'); break;
        case '\'': out.push_back('\''); break;
        case '"': out.push_back('"'); break;
        case '\n': break;
        case 'x': append_utf8(out, hex(2)); break;
        case 'u': append_utf8(out, hex(4)); break;
        case 'U': append_utf8(out, hex(8)); break;
        default:
          // Python keeps unknown escapes verbatim
          out.push_back('\\');
          out.push_back(e);
      }
    }
    fail("unterminated string");
  }

  Value number() {
    std::size_t start = pos_;
    if (s_[pos_] == '+' || s_[pos_] == '-') ++pos_;
    bool is_float = false;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '.' || c == 'e' || c == 'E') {
        is_float = true;
        ++pos_;
        if ((c == 'e' || c == 'E') && pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      } else {
        break;
      }
    }
    std::string tok(s_.substr(start, pos_ - start));
    if (!tok.empty() && tok.front() == '+') tok.erase(0, 1);
    Value v;
    if (is_float) {
      v.kind = Value::Kind::Float;
      char* end = nullptr;
      v.f = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size()) fail("bad number");
    } else {
      v.kind = Value::Kind::Int;
      auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v.i);
      if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) fail("bad integer");
    }
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Value parse(std::string_view text) { return Parser(text).parse_all(); }

Value parse_trailing_dict(std::string_view text, std::size_t* dict_begin) {
  // try every '{' before the last '}'; the widest successful parse wins
  std::size_t close = text.rfind('}');
  if (close == std::string_view::npos) throw Error(ErrorCode::ParseError, "no dictionary in response");
  std::optional<Value> best;
  std::size_t best_begin = 0;
  std::size_t open = close;
  while (open != std::string_view::npos && open > 0) {
    open = text.rfind('{', open - 1);
    if (open == std::string_view::npos) break;
    try {
      Value v = parse(text.substr(open, close + 1 - open));
      if (v.kind == Value::Kind::Dict) {
        best = std::move(v);
        best_begin = open;
      }
    } catch (const Error&) {
    }
  }
  if (!best) throw Error(ErrorCode::ParseError, "no parseable dictionary in response");
  if (dict_begin) *dict_begin = best_begin;
  return std::move(*best);
}

std::string quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::string render(const Value& v) {
  switch (v.kind) {
    case Value::Kind::None: return "None";
    case Value::Kind::Bool: return v.b ? "True" : "False";
    case Value::Kind::Int: return std::to_string(v.i);
    case Value::Kind::Float: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v.f);
      return buf;
    }
    case Value::Kind::Str: return quote(v.s);
    case Value::Kind::List: {
      std::string out = "[";
      for (std::size_t k = 0; k < v.list.size(); ++k) {
        if (k) out += ", ";
        out += render(v.list[k]);
      }
      return out + "]";
    }
    case Value::Kind::Dict: {
      std::string out = "{";
      for (std::size_t k = 0; k < v.dict.size(); ++k) {
        if (k) out += ", ";
        out += render(v.dict[k].first) + " : " + render(v.dict[k].second);
      }
      return out + "}";
    }
  }
  return "None";
}

}  // namespace errsynth::py
