#include "kgqa/config.hpp"

#include <charconv>
#include <fstream>
#include <string>

#include "kgqa/errors.hpp"

namespace kgqa {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& value, const std::string& key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ParseFailure("config key '" + key + "': bad number '" + value + "'");
  }
  return out;
}

}  // namespace

FileConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open config file " + path.string());
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";
  const auto resolve = [&](const std::string& value) {
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
  };

  FileConfig config;
  bool saw_triples = false, saw_embeddings = false, saw_templates = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParseFailure("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseFailure("config line " + std::to_string(line_no) + ": empty key or value");
    }
    if (key == "triples") {
      config.triples = resolve(value);
      saw_triples = true;
    } else if (key == "embeddings") {
      config.embeddings = resolve(value);
      saw_embeddings = true;
    } else if (key == "templates") {
      config.templates = resolve(value);
      saw_templates = true;
    } else if (key == "ner_model") {
      config.ner_model = resolve(value);
    } else if (key == "alpha") {
      config.alpha = parse_double(value, key);
      if (config.alpha < 0.0 || config.alpha > 1.0) {
        throw ParseFailure("alpha must lie in [0, 1]");
      }
    } else if (key == "threshold") {
      config.threshold = parse_double(value, key);
      if (config.threshold < -1.0 || config.threshold > 1.0) {
        throw ParseFailure("threshold must lie in [-1, 1]");
      }
    } else if (key == "use_crf") {
      if (value == "true") {
        config.use_crf = true;
      } else if (value == "false") {
        config.use_crf = false;
      } else {
        throw ParseFailure("use_crf must be true or false");
      }
    } else {
      throw ParseFailure("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!saw_triples || !saw_embeddings || !saw_templates) {
    throw ParseFailure("config must set triples, embeddings, and templates");
  }
  return config;
}

}  // namespace kgqa
