#ifndef KGQA_CONFIG_HPP
#define KGQA_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>

namespace kgqa {

/// File-backed engine settings. Relative paths resolve against the config
/// file's directory.
struct FileConfig {
  std::filesystem::path triples;
  std::filesystem::path embeddings;
  std::filesystem::path templates;
  std::optional<std::filesystem::path> ner_model;
  double alpha = 0.5;
  double threshold = 0.35;
  bool use_crf = false;
};

/// `key = value` lines; '#' comments and blank lines ignored. Unknown keys
/// are an error, as are missing required paths.
FileConfig load_config_file(const std::filesystem::path& path);

}  // namespace kgqa

#endif  // KGQA_CONFIG_HPP
