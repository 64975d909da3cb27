#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace otgforge {

// Reserved slot marker used by templates. Tokenization lowercases, so a natural
// token can never collide with it.
inline constexpr std::string_view kSlotToken = "REP";

// Splits text into lowercase tokens.
//
//  * runs of ASCII letters/digits (and any non-ASCII UTF-8 bytes) form a token;
//  * an apostrophe followed by word characters forms one suffix token ("'s");
//  * a run of hyphens forms one token ("--");
//  * every other punctuation character is its own token;
//  * whitespace separates tokens and is dropped.
//
// U+2019 (right single quotation mark) is treated as an apostrophe.
std::vector<std::string> tokenize(std::string_view text);

std::string join_tokens(std::span<const std::string> tokens);

}  // namespace otgforge
