#pragma once

// Scratch directories and small on-disk datasets for command-level tests.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "rebal/csv.hpp"
#include "rebal/dataset.hpp"

namespace workspace {

namespace fs = std::filesystem;

/// Empty directory named after the running test.
inline fs::path scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::path(::testing::TempDir()) / "rebal-tests" / (std::string(info->test_suite_name()) + "." + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// One feature: majority packed around 0, minority split into two groups at
/// -10 and +10. The minority mean sits inside the majority, so a Gaussian
/// generator fitted to the minority has most draws rejected by a 1NN filter.
inline rebal::Dataset split_minority(std::uint64_t seed = 5, std::size_t majority = 200, std::size_t minority = 40) {
  rebal::Dataset d;
  d.feature_names = {"x"};
  d.class_names = {"common", "rare"};
  d.samples = rebal::Matrix(0, 1);
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t i = 0; i < majority + minority; ++i) {
    const bool rare = i >= majority;
    const double v = rare ? ((i % 2) ? 10.0 : -10.0) + 0.1 * n(g) : 0.5 * n(g);
    d.samples.append_row(std::span<const double>(&v, 1));
    d.labels.push_back(rare ? 1 : 0);
  }
  return d;
}

inline fs::path write_dataset(const fs::path& dir, const std::string& name, const rebal::Dataset& d) {
  const fs::path p = dir / name;
  rebal::save_csv(p, d, "class");
  return p;
}

}  // namespace workspace
