#include "errsynth/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace errsynth::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) {
  auto u = static_cast<unsigned char>(c);
  // Non-ASCII bytes are treated as word characters so UTF-8 letters stay
  // inside their words.
  return std::isalnum(u) != 0 || u >= 0x80;
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

}  // namespace

std::string normalize_whitespace(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(c);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    Token tok;
    tok.begin = i;
    if (is_alnum(c)) {
      std::size_t j = i;
      bool all_digits = true;
      while (j < s.size()) {
        if (is_alnum(s[j])) {
          all_digits = all_digits && is_digit(s[j]);
          ++j;
        } else if (s[j] == '.' && all_digits && j > i && j + 1 < s.size() && is_digit(s[j + 1])) {
          ++j;  // decimal point inside a number
        } else {
          break;
        }
      }
      tok.end = j;
      tok.is_word = true;
      tok.is_number = all_digits;
    } else if (c == '_') {
      std::size_t j = i;
      while (j < s.size() && s[j] == '_') ++j;
      tok.end = j;
    } else {
      tok.end = i + 1;
    }
    tok.text = std::string(s.substr(tok.begin, tok.end - tok.begin));
    i = tok.end;
    out.push_back(std::move(tok));
  }
  return out;
}

std::vector<std::string> token_texts(std::string_view s) {
  std::vector<std::string> out;
  for (auto& t : tokenize(s)) out.push_back(std::move(t.text));
  return out;
}

std::size_t token_edit_distance(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t char_edit_distance(std::string_view a, std::string_view b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[n][m];
}

double sentence_similarity(std::string_view a, std::string_view b) {
  auto ta = token_texts(a);
  auto tb = token_texts(b);
  std::size_t longest = std::max(ta.size(), tb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(token_edit_distance(ta, tb)) / static_cast<double>(longest);
}

std::vector<Hunk> diff_tokens(std::span<const std::string> a, std::span<const std::string> b) {
  const std::size_t n = a.size(), m = b.size();
  // lcs[i][j] = LCS length of a[i:], b[j:]
  std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  std::vector<Hunk> hunks;
  Hunk open;
  auto flush = [&] {
    if (!open.removed.empty() || !open.inserted.empty()) hunks.push_back(std::move(open));
    open = Hunk{};
  };
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      flush();
      ++i;
      ++j;
    } else if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) {
      open.inserted.push_back(b[j++]);
    } else {
      open.removed.push_back(a[i++]);
    }
  }
  flush();
  return hunks;
}

std::size_t find_word(std::string_view haystack, std::string_view needle, std::size_t from) {
  if (needle.empty()) return std::string_view::npos;
  for (std::size_t pos = from; pos + needle.size() <= haystack.size(); ++pos) {
    if (!iequals(haystack.substr(pos, needle.size()), needle)) continue;
    bool left_ok = pos == 0 || !is_alnum(haystack[pos - 1]) || !is_alnum(needle.front());
    std::size_t end = pos + needle.size();
    bool right_ok = end == haystack.size() || !is_alnum(haystack[end]) || !is_alnum(needle.back());
    if (left_ok && right_ok) return pos;
  }
  return std::string_view::npos;
}

std::vector<std::size_t> find_all_words(std::string_view haystack, std::string_view needle) {
  std::vector<std::size_t> out;
  std::size_t pos = find_word(haystack, needle, 0);
  while (pos != std::string_view::npos) {
    out.push_back(pos);
    pos = find_word(haystack, needle, pos + needle.size());
  }
  return out;
}

std::string match_case(std::string_view model, std::string_view word) {
  std::string out(word);
  if (model.empty() || out.empty()) return out;
  bool model_upper = std::isupper(static_cast<unsigned char>(model.front())) != 0;
  bool all_upper = model.size() > 1 && std::all_of(model.begin(), model.end(), [](char c) {
                     return !std::isalpha(static_cast<unsigned char>(c)) ||
                            std::isupper(static_cast<unsigned char>(c));
                   });
  // Acronyms in the replacement (SVC, PICC) keep their own casing.
  bool word_has_upper = std::any_of(out.begin(), out.end(), [](char c) {
    return std::isupper(static_cast<unsigned char>(c)) != 0;
  });
  if (all_upper && !word_has_upper) {
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (model_upper) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  } else if (!word_has_upper || std::islower(static_cast<unsigned char>(out[0]))) {
    out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  }
  return out;
}

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) extra = 0;
    else if ((c >> 5) == 0x6) extra = 1;
    else if ((c >> 4) == 0xe) extra = 2;
    else if ((c >> 3) == 0x1e) extra = 3;
    else return false;
    if (extra > 0 && i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    }
    i += extra + 1;
  }
  return true;
}

std::uint64_t fnv1a64(std::string_view s, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string sha256_hex(std::string_view s) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(s.data(), s.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out;
  out.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

}  // namespace errsynth::text
