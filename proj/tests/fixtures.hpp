#pragma once
// Deterministic synthetic data shared by unit and acceptance tests.

#include <random>
#include <string>
#include <vector>

#include "otgforge/lexicon.hpp"

namespace fixtures {

// Sentences built from a few carriers with lexicon terms injected at known
// positions; tags mark exactly the injected terms.
inline std::vector<otgforge::TaggedSentence> tagged_sentences(std::size_t n, std::uint64_t seed) {
  using otgforge::Tag;
  const std::vector<std::string> terms{"crv", "honda", "boring", "rust", "lemon", "clunker", "junk", "noisy",
                                       "ugly", "slow", "cheap", "pricey"};
  const std::vector<std::string> filler{"the", "my", "a", "car", "is", "was", "really", "so", "and", "they",
                                        "are", "with", "problem", "that", "we", "drove", "it", "today"};
  std::mt19937_64 gen(seed);
  std::vector<otgforge::TaggedSentence> out;
  for (std::size_t i = 0; i < n; ++i) {
    otgforge::TaggedSentence s;
    s.doc_id = "syn" + std::to_string(i);
    const std::size_t len = 5 + gen() % 8;
    for (std::size_t k = 0; k < len; ++k) {
      if (gen() % 4 == 0) {
        s.tokens.push_back(terms[gen() % terms.size()]);
        s.tags.push_back(Tag::kOtg);
      } else {
        s.tokens.push_back(filler[gen() % filler.size()]);
        s.tags.push_back(Tag::kO);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fixtures
