#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace otgforge {

// Versioned binary container shared by the tagger and the classifiers.
//
// Layout (all integers little-endian):
//   magic "OTGCKPT\0" | u32 version | str kind
//   u32 n_meta   { str key | str value }
//   u32 n_lists  { str name | u32 count { str item } }
//   u32 n_tensor { str name | u32 rank(=2) | u64 rows | u64 cols | f32[rows*cols] column-major }
// where str = u32 byte length followed by the bytes.
struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  struct Tensor {
    std::string name;
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    std::vector<float> data;
  };

  std::string kind;
  std::map<std::string, std::string> meta;
  std::map<std::string, std::vector<std::string>> lists;
  std::vector<Tensor> tensors;

  void add_tensor(const std::string& name, const Eigen::MatrixXd& value);
  // Throws kMalformedCheckpoint when missing or when the shape differs.
  Eigen::MatrixXd tensor(const std::string& name, Eigen::Index rows, Eigen::Index cols) const;
  const std::string& get_meta(const std::string& key) const;
  const std::vector<std::string>& get_list(const std::string& name) const;

  void write(const std::filesystem::path& path) const;
  static Checkpoint read(const std::filesystem::path& path);
};

}  // namespace otgforge
