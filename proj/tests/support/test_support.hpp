#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "mlkfhe/dataset.hpp"
#include "mlkfhe/logging.hpp"

namespace mlkfhe::testing {

inline std::filesystem::path data_dir() { return MLKFHE_TEST_DATA_DIR; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mlkfhe_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline LabelMatrix labels_from(std::initializer_list<std::initializer_list<int>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto q = static_cast<Eigen::Index>(rows.begin()->size());
  LabelMatrix out(n, q);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (int v : row) out(i, j++) = static_cast<std::uint8_t>(v);
    ++i;
  }
  return out;
}

/// Independent Bernoulli(p) label matrix from std::mt19937.
inline LabelMatrix random_labels(std::size_t n, std::size_t q, double p, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::bernoulli_distribution coin(p);
  LabelMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q));
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = coin(gen) ? 1 : 0;
  return out;
}

/// Random dataset with Gaussian features and independent labels, every label
/// column having at least one positive.
inline Dataset random_dataset(std::size_t n, std::size_t d, std::size_t q, std::uint32_t seed,
                              double p = 0.3) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(gen);
  LabelMatrix y = random_labels(n, q, p, seed + 1);
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    if (y.col(j).cast<int>().sum() == 0) y(static_cast<Eigen::Index>(j) % y.rows(), j) = 1;
  }
  return make_dataset(std::move(x), std::move(y));
}

/// Collects warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture() {
    previous_ = set_warning_sink([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~WarningCapture() { set_warning_sink(previous_); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  std::vector<std::string> messages;

 private:
  WarningSink previous_;
};

}  // namespace mlkfhe::testing
