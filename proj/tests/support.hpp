#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "authentext/sparse.hpp"

namespace test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("authentext-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Random sparse matrix with roughly `density` nonzeros drawn from [-1, 1].
inline authentext::SparseMatrix random_sparse(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                              double density, bool non_negative = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> dense(rows * cols, 0.0);
  for (double& v : dense) {
    if (u(rng) < density) {
      v = non_negative ? u(rng) + 0.01 : 2.0 * u(rng) - 1.0;
      if (v == 0.0) v = 0.5;
    }
  }
  return authentext::SparseMatrix::from_dense(dense, rows, cols);
}

}  // namespace test
