#pragma once

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace test_support {

/// Fresh directory under the system temp path, removed first if present.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("muni_econ_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace test_support

#define CHECK_THROWS_KIND(expr, expected_kind)                         \
  do {                                                                 \
    bool thrown_ = false;                                              \
    try {                                                              \
      (void)(expr);                                                    \
    } catch (const muni::Error& e_) {                                  \
      thrown_ = true;                                                  \
      CHECK_MESSAGE(e_.kind() == (expected_kind), e_.what());          \
    }                                                                  \
    CHECK_MESSAGE(thrown_, "expected muni::Error from " #expr);        \
  } while (0)
