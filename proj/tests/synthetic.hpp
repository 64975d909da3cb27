#pragma once
// Synthetic two-domain hate speech data. Both domains share carrier
// sentences; hate documents fill the carrier slots with domain-specific
// offensive terms, non-hate documents fill them with neutral words. The weak
// corpus reuses the carriers (plus unrelated ones) with a third term set.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace synthetic {

struct Spec {
  std::size_t source_docs = 1000;
  std::size_t target_docs = 600;
  std::size_t weak_sentences = 2000;
  std::size_t terms_per_domain = 45;
  double source_hate_rate = 0.5;
  double target_hate_rate = 0.4;
  std::uint64_t seed = 0;
};

struct Dataset {
  std::filesystem::path source;
  std::filesystem::path target;
  std::filesystem::path weak;
  std::filesystem::path lexicon;
  std::vector<std::string> source_terms;
  std::vector<std::string> target_terms;
  std::vector<std::string> weak_terms;
};

Dataset write_dataset(const std::filesystem::path& dir, const Spec& spec);

}  // namespace synthetic
