#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "otgforge/classifiers.hpp"
#include "otgforge/corpus.hpp"
#include "otgforge/tagger.hpp"

namespace otgforge {

struct PipelineConfig {
  std::filesystem::path source_path;
  CorpusFormat source_format = CorpusFormat::kJsonl;
  std::filesystem::path target_path;
  CorpusFormat target_format = CorpusFormat::kJsonl;
  std::filesystem::path weak_path;
  CorpusFormat weak_format = CorpusFormat::kJsonl;
  std::filesystem::path lexicon_path;

  double target_sample_fraction = 0.1;
  // Seed of the unlabeled/test split of the target corpus. Fixed across run
  // seeds so that every run is scored on the same test documents.
  std::uint64_t sample_seed = 0;
  std::size_t k_hate = 10000;
  std::size_t k_nonhate = 10000;
  int hate_min_slots = 2;
  int nonhate_max_slots = 1;
  std::size_t weak_limit = 0;  // 0 keeps the whole weak corpus

  TaggerHyperparams tagger;
  ClassifierHyperparams classifier;

  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  double threshold = 0.5;
  std::filesystem::path output_dir = "otg_out";

  // k = 200 for both selections and at most 5,000 weak sentences.
  void apply_desk_scale();
  // Throws kConfig.
  void validate() const;

  // Sorted "key = value" lines of every field that affects results (the
  // output directory is excluded).
  std::string canonical() const;
  // SHA-256 of canonical(), hex.
  std::string hash() const;
};

// Flat "key = value" lines; "[section]" headers prefix later keys with
// "section.". '#' starts a comment. Relative paths resolve against
// `base_dir`. Throws kConfig on unknown keys or bad values.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

// Applies one dotted key (e.g. "augment.k_hate") to the config.
void set_config_value(PipelineConfig& config, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir = {});

// "3" -> {3}; "0..9" -> {0,...,9}; "1,4,7" -> {1,4,7}.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace otgforge
