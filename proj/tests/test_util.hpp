#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "otgforge/error.hpp"

namespace testutil {

inline std::filesystem::path tmp_dir(const std::string& name) {
  const auto dir = std::filesystem::path(OTGFORGE_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <class F>
otgforge::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const otgforge::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an otgforge::Error");
}

}  // namespace testutil
