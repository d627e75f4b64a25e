#pragma once

#include <cstdint>
#include <string>

#include "netgeom/matrix.hpp"

namespace netgeom {

// Row-major sample container: x is n x dim_in, y is n x dim_out.
// meta carries a short provenance tag that report writers embed verbatim.
struct Dataset {
  Matrix x;
  Matrix y;
  std::string meta;

  int size() const { return x.rows; }
  int dim_in() const { return x.cols; }
  int dim_out() const { return y.cols; }
};

// Targets y = 10 + 1.22 x^2 + eps, eps ~ Normal(0, sigma^2).
// Inputs are the n midpoints of a uniform partition of the open interval
// (lo, hi); the grid is deterministic, only targets carry noise.
Dataset gen_quadratic(int n, double lo = -8.0, double hi = 8.0,
                      double sigma = 10.0, std::uint64_t seed = 0);

// Same grid; targets add 1.22 (x+4)^3 on the x < 0 branch only:
//   y = 10 + 1.22 x^2 + 1.22 (x+4)^3 + eps   for x < 0
//   y = 10 + 1.22 x^2 + eps                   for x >= 0
Dataset gen_cubic_mix(int n, double lo = -8.0, double hi = 8.0,
                      double sigma = 10.0, std::uint64_t seed = 0);

// Clean evaluation grid for test MSE. fn selects the target function:
// "quadratic" or "cubic_mix".
Dataset test_grid(int n, double lo = -2.0, double hi = 2.0,
                  const std::string& fn = "quadratic");

// IDX readers (big-endian, magic 0x00000803 images / 0x00000801 labels).
// Pixels scale to [0,1] as 784-dim rows; labels expand to one-hot 10-dim.
// Throws DataError on bad magic, truncation, or count mismatch.
Dataset mnist_load(const std::string& images_path,
                   const std::string& labels_path);

// IDX writers used for fixtures and the synthetic corpus. pixels holds
// n*rows*cols bytes row-major; labels holds n class ids.
void write_idx_images(const std::string& path,
                      const std::vector<std::uint8_t>& pixels, int n,
                      int rows, int cols);
void write_idx_labels(const std::string& path,
                      const std::vector<std::uint8_t>& labels);

// Deterministic 28x28 digit-like corpus in IDX layout, for environments
// without the real MNIST files. Each class has a fixed stroke template;
// per-sample jitter and pixel noise come from the seed. Classes cycle so
// any prefix of the file is near-balanced.
void write_synth_digits_idx(const std::string& images_path,
                            const std::string& labels_path, int n,
                            std::uint64_t seed);

// Replaces one-hot targets by uniformly random one-hot rows (seeded).
// Throws DataError when the targets are not one-hot (for single-column
// targets that means every value is exactly 1).
Dataset randomize_labels(const Dataset& ds, std::uint64_t seed);

// CSV cache: header row "x0,..,y0,..", x columns then y columns, %.17g.
void write_dataset_csv(const std::string& path, const Dataset& ds);
Dataset read_dataset_csv(const std::string& path);

// FNV-1a over dims and the raw little-endian bytes of x then y.
std::uint64_t dataset_checksum(const Dataset& ds);

}  // namespace netgeom
