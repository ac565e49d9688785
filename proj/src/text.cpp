#include "kgqa/text.hpp"

#include <algorithm>
#include <cstdint>

namespace kgqa {
namespace {

#include "unicode_tables.inc"

constexpr bool is_detachable_punct(char c) {
  switch (c) {
    case '.':
    case ',':
    case '?':
    case '!':
    case ';':
    case ':':
    case '(':
    case ')':
    case '[':
    case ']':
    case '"':
    case '\'':
      return true;
    default:
      return false;
  }
}

constexpr bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Decodes one UTF-8 sequence starting at `i`. On malformed input consumes a
// single byte and reports it via `raw_byte` so the caller can copy it
// through untouched.
struct Decoded {
  char32_t cp = 0;
  std::size_t length = 1;
  bool valid = false;
};

Decoded decode_utf8(std::string_view s, std::size_t i) {
  const auto byte = [&](std::size_t k) { return static_cast<std::uint8_t>(s[k]); };
  const std::uint8_t b0 = byte(i);
  if (b0 < 0x80) return {b0, 1, true};

  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return {};  // stray continuation or invalid lead byte
  }
  if (i + len > s.size()) return {};
  for (std::size_t k = 1; k < len; ++k) {
    const std::uint8_t b = byte(i + k);
    if ((b & 0xC0) != 0x80) return {};
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return {};
  return {cp, len, true};
}

void encode_utf8(char32_t cp, std::string& out) {
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

// Composed form of (base, combining), or 0 when the pair has none.
char32_t compose_pair(char32_t base, char32_t combining) {
  const auto* first = std::begin(kComposeTable);
  const auto* last = std::end(kComposeTable);
  const auto* it = std::lower_bound(first, last, std::pair{base, combining},
                                    [](const ComposeEntry& e, const std::pair<char32_t, char32_t>& key) {
                                      return std::pair{e.base, e.combining} < key;
                                    });
  if (it != last && it->base == base && it->combining == combining) return it->composed;
  return 0;
}

char32_t to_lower_cp(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + ('a' - 'A');
  if (cp >= 0x00C0 && cp <= 0x017F) {
    const auto* first = std::begin(kLowerTable);
    const auto* last = std::end(kLowerTable);
    const auto* it = std::lower_bound(first, last, cp,
                                      [](const LowerEntry& e, char32_t key) { return e.upper < key; });
    if (it != last && it->upper == cp) return it->lower;
  }
  return cp;
}

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  const std::size_t n = source.size();
  while (pos < n) {
    while (pos < n && is_ascii_space(source[pos])) ++pos;
    if (pos >= n) break;
    std::size_t chunk_end = pos;
    while (chunk_end < n && !is_ascii_space(source[chunk_end])) ++chunk_end;

    std::size_t i = pos;
    std::size_t j = chunk_end;
    while (i < j && is_detachable_punct(source[i])) {
      tokens.push_back({std::string(1, source[i]), i, i + 1});
      ++i;
    }
    std::vector<Token> trailing;
    while (j > i && is_detachable_punct(source[j - 1])) {
      trailing.push_back({std::string(1, source[j - 1]), j - 1, j});
      --j;
    }
    if (i < j) tokens.push_back({std::string(source.substr(i, j - i)), i, j});
    tokens.insert(tokens.end(), trailing.rbegin(), trailing.rend());

    pos = chunk_end;
  }
  return tokens;
}

std::string normalize(std::string_view token_text) {
  // Decode, composing base + combining-mark pairs as they appear. The
  // composed result is held back one step so a following mark could in
  // principle compose again.
  std::vector<char32_t> cps;
  std::string out;
  out.reserve(token_text.size());

  std::size_t i = 0;
  const auto flush = [&] {
    for (char32_t cp : cps) encode_utf8(to_lower_cp(cp), out);
    cps.clear();
  };
  while (i < token_text.size()) {
    const Decoded d = decode_utf8(token_text, i);
    if (!d.valid) {
      flush();
      out.push_back(token_text[i]);
      ++i;
      continue;
    }
    if (!cps.empty()) {
      if (const char32_t composed = compose_pair(cps.back(), d.cp)) {
        cps.back() = composed;
        i += d.length;
        continue;
      }
    }
    cps.push_back(d.cp);
    i += d.length;
  }
  flush();
  return out;
}

std::vector<std::string> token_texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

std::vector<std::string> normalized_texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(normalize(t.text));
  return out;
}

}  // namespace kgqa
