#pragma once

// Shared helpers for the unit tests and the acceptance runner.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtbias/util/text.hpp"

namespace mtbias::testing {

namespace fs = std::filesystem;

inline fs::path test_data(const std::string& name) { return fs::path(MTBIAS_TEST_DATA_DIR) / name; }
inline fs::path sample_data(const std::string& name) { return fs::path(MTBIAS_SAMPLE_DATA_DIR) / name; }

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

/// Tab-separated fixture rows; '#' lines are comments. Fields are not trimmed.
inline std::vector<std::vector<std::string>> read_tsv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with("#") || line.empty()) continue;
    rows.push_back(text::split(line, '\t', false));
  }
  return rows;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "mtbias") {
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
      auto candidate = fs::temp_directory_path() / (tag + "-" + std::to_string(rd()));
      if (fs::create_directory(candidate)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create temp dir");
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

/// Relative paths of every regular file below `root`, sorted.
inline std::vector<std::string> list_files(const fs::path& root) {
  std::vector<std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).generic_string());
  std::sort(out.begin(), out.end());
  return out;
}

/// Empty when both trees hold the same files with the same bytes; otherwise
/// the first difference.
inline std::string compare_trees(const fs::path& a, const fs::path& b) {
  const auto fa = list_files(a);
  const auto fb = list_files(b);
  if (fa.empty()) return "no files under " + a.string();
  if (fa != fb) return "file lists differ between " + a.string() + " and " + b.string();
  for (const auto& rel : fa)
    if (read_file(a / rel) != read_file(b / rel)) return "contents differ: " + rel;
  return {};
}

}  // namespace mtbias::testing
