#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmw::test {

inline std::filesystem::path fixture_dir() { return TMW_FIXTURE_DIR; }

inline std::string fixture(const std::string& name) {
  std::ifstream in(fixture_dir() / name, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Valid .tm fixtures (the round-trip corpus), sorted by name.
inline std::vector<std::filesystem::path> tm_corpus() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(fixture_dir())) {
    if (e.is_regular_file() && e.path().extension() == ".tm") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tmw_test_" + name);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace tmw::test
