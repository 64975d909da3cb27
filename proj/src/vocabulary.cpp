#include "otgforge/vocabulary.hpp"

#include "otgforge/error.hpp"

namespace otgforge {

Vocabulary::Vocabulary() {
  add("<pad>");
  add("<unk>");
}

Vocabulary Vocabulary::from_items(std::vector<std::string> items) {
  if (items.size() < 2 || items[0] != "<pad>" || items[1] != "<unk>") {
    throw Error(ErrorCode::kMalformedCheckpoint, "vocabulary must start with <pad>, <unk>");
  }
  Vocabulary vocab;
  for (std::size_t i = 2; i < items.size(); ++i) vocab.add(items[i]);
  if (vocab.size() != items.size()) {
    throw Error(ErrorCode::kMalformedCheckpoint, "vocabulary contains duplicate entries");
  }
  return vocab;
}

std::int32_t Vocabulary::add(std::string_view item) {
  auto [it, inserted] = index_.try_emplace(std::string(item), static_cast<std::int32_t>(items_.size()));
  if (inserted) items_.emplace_back(item);
  return it->second;
}

std::int32_t Vocabulary::lookup(std::string_view item) const {
  const auto it = index_.find(std::string(item));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view item) const {
  return index_.contains(std::string(item));
}

}  // namespace otgforge
