#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace errsynth::text {

/// Collapse whitespace runs to single spaces and trim both ends.
std::string normalize_whitespace(std::string_view raw);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);

/// Token used for similarity and diffing. Words are maximal runs of
/// letters/digits (a decimal such as "4.3" stays one token); every other
/// non-space character is its own token.
struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offset in the source
  std::size_t end = 0;
  bool is_word = false;
  bool is_number = false;
};

std::vector<Token> tokenize(std::string_view s);
std::vector<std::string> token_texts(std::string_view s);

/// Levenshtein distance over token sequences.
std::size_t token_edit_distance(std::span<const std::string> a, std::span<const std::string> b);

/// Optimal-string-alignment distance (adjacent transposition costs 1).
std::size_t char_edit_distance(std::string_view a, std::string_view b);

/// 1 - tokenEditDistance / max(len); 1.0 for two empty inputs.
double sentence_similarity(std::string_view a, std::string_view b);

/// A contiguous run of differing tokens from an LCS diff.
struct Hunk {
  std::vector<std::string> removed;
  std::vector<std::string> inserted;
};

std::vector<Hunk> diff_tokens(std::span<const std::string> a, std::span<const std::string> b);

/// Case-insensitive whole-word search. A match must not be preceded or
/// followed by a letter or digit. Returns npos when absent.
std::size_t find_word(std::string_view haystack, std::string_view needle, std::size_t from = 0);
std::vector<std::size_t> find_all_words(std::string_view haystack, std::string_view needle);

/// Copy the capitalisation style of `model` onto `word` (all-caps, leading
/// capital or unchanged).
std::string match_case(std::string_view model, std::string_view word);

bool is_valid_utf8(std::string_view s);

/// Deterministic 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view s, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::string sha256_hex(std::string_view s);

}  // namespace errsynth::text
