#ifndef KGQA_TEXT_HPP
#define KGQA_TEXT_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgqa {

/// One token of a segmented sentence. Offsets are byte positions into the
/// UTF-8 source, so source.substr(start, end - start) == text always holds.
struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

/// Splits on whitespace, then detaches leading/trailing ASCII punctuation
/// (.,?!;:()[]"') as separate single-character tokens. Hyphens and digits
/// stay inside tokens. Empty input yields an empty list.
std::vector<Token> tokenize(std::string_view source);

/// Canonical composition (NFC over the Latin-1 Supplement / Latin Extended-A
/// range) followed by lowercasing. Code points outside that range pass
/// through unchanged; invalid UTF-8 bytes are preserved verbatim.
std::string normalize(std::string_view token_text);

/// Token texts of a tokenization, in order.
std::vector<std::string> token_texts(const std::vector<Token>& tokens);

/// Normalized token texts, in order.
std::vector<std::string> normalized_texts(const std::vector<Token>& tokens);

}  // namespace kgqa

#endif  // KGQA_TEXT_HPP
