#include "otgforge/text.hpp"

namespace otgforge {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

// U+2019 RIGHT SINGLE QUOTATION MARK
constexpr std::string_view kCurlyApostrophe = "\xE2\x80\x99";

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  const std::size_t n = text.size();
  std::size_t i = 0;

  auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
  auto apostrophe_len = [&](std::size_t k) -> std::size_t {
    if (text[k] == '\'') return 1;
    if (text.substr(k, kCurlyApostrophe.size()) == kCurlyApostrophe) return kCurlyApostrophe.size();
    return 0;
  };
  auto word_run = [&](std::size_t k, std::string& out) {
    while (k < n && is_word_byte(byte(k)) && apostrophe_len(k) == 0) {
      out.push_back(lower(byte(k)));
      ++k;
    }
    return k;
  };

  while (i < n) {
    const unsigned char c = byte(i);
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (std::size_t apos = apostrophe_len(i); apos > 0) {
      std::string token = "'";
      std::size_t next = i + apos;
      if (next < n && is_word_byte(byte(next)) && apostrophe_len(next) == 0) {
        next = word_run(next, token);
      }
      tokens.push_back(std::move(token));
      i = next;
      continue;
    }
    if (is_word_byte(c)) {
      std::string token;
      i = word_run(i, token);
      tokens.push_back(std::move(token));
      continue;
    }
    if (c == '-') {
      std::size_t j = i;
      while (j < n && text[j] == '-') ++j;
      tokens.emplace_back(j - i, '-');
      i = j;
      continue;
    }
    tokens.emplace_back(1, static_cast<char>(c));
    ++i;
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace otgforge
