#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace errsynth::py {

/// Subset of Python literals found in model responses: None, bools, ints,
/// floats, strings, lists/tuples and dicts. Dict entries keep their order and
/// duplicate keys (several '' keys are normal in splice output).
struct Value {
  enum class Kind { None, Bool, Int, Float, Str, List, Dict };

  Kind kind = Kind::None;
  bool b = false;
  std::int64_t i = 0;
  double f = 0.0;
  std::string s;
  std::vector<Value> list;
  std::vector<std::pair<Value, Value>> dict;

  static Value none() { return {}; }
  static Value str(std::string v) {
    Value x;
    x.kind = Kind::Str;
    x.s = std::move(v);
    return x;
  }
  static Value integer(std::int64_t v) {
    Value x;
    x.kind = Kind::Int;
    x.i = v;
    return x;
  }

  bool is_str() const { return kind == Kind::Str; }
  bool is_int() const { return kind == Kind::Int; }
};

/// Parses exactly one literal (surrounding whitespace allowed).
/// Throws Error(ParseError) with the offending offset.
Value parse(std::string_view text);

/// Finds the last balanced top-level {...} in free text and parses it.
/// Throws Error(ParseError) when there is none.
Value parse_trailing_dict(std::string_view text, std::size_t* dict_begin = nullptr);

/// Single-quoted Python string literal.
std::string quote(std::string_view s);

std::string render(const Value& v);

}  // namespace errsynth::py
