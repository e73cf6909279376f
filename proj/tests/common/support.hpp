#pragma once

// Test helpers: scratch directories, file IO, and small random fixtures.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <unistd.h>

#include "petrank/rng.hpp"
#include "petrank/types.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path source_dir() { return fs::path(PETRANK_SOURCE_DIR); }

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("petrank_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline petrank::MatrixXd random_matrix(petrank::Rng& rng, petrank::Index n, petrank::Index p) {
  petrank::MatrixXd x(n, p);
  for (petrank::Index i = 0; i < n; ++i) {
    for (petrank::Index j = 0; j < p; ++j) x(i, j) = 2.0 * petrank::uniform_unit(rng) - 1.0;
  }
  return x;
}

inline petrank::VectorXd random_vector(petrank::Rng& rng, petrank::Index n) {
  return random_matrix(rng, n, 1).col(0);
}

}  // namespace testsupport
