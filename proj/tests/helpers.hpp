#ifndef KGQA_TESTS_HELPERS_HPP
#define KGQA_TESTS_HELPERS_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kgqa/errors.hpp"

namespace kgqa_tests {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(KGQA_FIXTURES_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kgqa::IoFailure("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::ifstream open_fixture(const std::string& name) {
  std::ifstream in(fixture(name));
  if (!in) throw kgqa::IoFailure("cannot open fixture " + name);
  return in;
}

}  // namespace kgqa_tests

#endif  // KGQA_TESTS_HELPERS_HPP
