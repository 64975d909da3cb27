#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace otgforge {

// String -> dense index map with PAD at 0 and UNK at 1.
class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;

  Vocabulary();
  // Rebuilds from a stored item list whose first two entries are PAD and UNK.
  static Vocabulary from_items(std::vector<std::string> items);

  std::int32_t add(std::string_view item);
  std::int32_t lookup(std::string_view item) const;
  bool contains(std::string_view item) const;
  const std::string& item(std::int32_t index) const { return items_[static_cast<std::size_t>(index)]; }
  std::size_t size() const { return items_.size(); }
  const std::vector<std::string>& items() const { return items_; }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, std::int32_t> index_;
};

}  // namespace otgforge
