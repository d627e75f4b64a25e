#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "netgeom/dataset.hpp"
#include "netgeom/errors.hpp"

using namespace netgeom;

namespace {

double clean_quadratic(double x) { return 10.0 + 1.22 * x * x; }

double clean_cubic_mix(double x) {
  double y = clean_quadratic(x);
  if (x < 0.0) y += 1.22 * (x + 4.0) * (x + 4.0) * (x + 4.0);
  return y;
}

std::filesystem::path tmp_dir() {
  auto d = std::filesystem::temp_directory_path() / "netgeom_data_test";
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("quadratic generator hits hand values on chosen grids") {
  // Midpoints of a 2-cell partition of (-1,3) land exactly on 0 and 2.
  auto ds = gen_quadratic(2, -1.0, 3.0, 0.0, 7);
  CHECK(ds.x(0, 0) == doctest::Approx(0.0));
  CHECK(ds.y(0, 0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(ds.x(1, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ds.y(1, 0) == doctest::Approx(14.88).epsilon(1e-12));
}

TEST_CASE("default grid is midpoints of (-8,8) and excludes endpoints") {
  auto ds = gen_quadratic(100, -8.0, 8.0, 0.0, 1);
  REQUIRE(ds.size() == 100);
  REQUIRE(ds.dim_in() == 1);
  REQUIRE(ds.dim_out() == 1);
  CHECK(ds.x(0, 0) == doctest::Approx(-7.92).epsilon(1e-12));
  CHECK(ds.x(99, 0) == doctest::Approx(7.92).epsilon(1e-12));
  CHECK(ds.x(62, 0) == doctest::Approx(2.0).epsilon(1e-12));
  for (int i = 0; i + 1 < 100; ++i) {
    CHECK(ds.x(i + 1, 0) - ds.x(i, 0) == doctest::Approx(0.16).epsilon(1e-12));
  }
  for (int i = 0; i < 100; ++i) {
    CHECK(ds.y(i, 0) ==
          doctest::Approx(clean_quadratic(ds.x(i, 0))).epsilon(1e-12));
  }
}

TEST_CASE("noise draw has the configured scale and is seed-stable") {
  auto noisy = gen_quadratic(100, -8.0, 8.0, 10.0, 42);
  auto clean = gen_quadratic(100, -8.0, 8.0, 0.0, 42);
  double mean = 0.0;
  for (int i = 0; i < 100; ++i) mean += noisy.y(i, 0) - clean.y(i, 0);
  mean /= 100.0;
  double var = 0.0;
  for (int i = 0; i < 100; ++i) {
    double d = noisy.y(i, 0) - clean.y(i, 0) - mean;
    var += d * d;
  }
  double sd = std::sqrt(var / 99.0);
  CHECK(sd > 8.0);
  CHECK(sd < 12.0);

  auto again = gen_quadratic(100, -8.0, 8.0, 10.0, 42);
  CHECK(dataset_checksum(again) == dataset_checksum(noisy));
  auto other = gen_quadratic(100, -8.0, 8.0, 10.0, 43);
  CHECK(dataset_checksum(other) != dataset_checksum(noisy));
}

TEST_CASE("cubic mix matches the branch formulas") {
  // x = -4 sits at the first midpoint of (-5,-1); the cubic term vanishes.
  auto left = gen_cubic_mix(2, -5.0, -1.0, 0.0, 3);
  CHECK(left.x(0, 0) == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(left.y(0, 0) == doctest::Approx(29.52).epsilon(1e-12));

  auto right = gen_cubic_mix(2, 0.0, 4.0, 0.0, 3);
  CHECK(right.x(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(right.y(0, 0) == doctest::Approx(11.22).epsilon(1e-12));

  // x = 0 takes the x >= 0 branch.
  auto mid = gen_cubic_mix(2, -1.0, 3.0, 0.0, 3);
  CHECK(mid.x(0, 0) == doctest::Approx(0.0));
  CHECK(mid.y(0, 0) == doctest::Approx(10.0).epsilon(1e-12));

  // The cubic term applies strictly left of zero; spot-check an interior
  // grid point against the hand formula.
  auto ds = gen_cubic_mix(100, -8.0, 8.0, 0.0, 3);
  CHECK(ds.x(49, 0) == doctest::Approx(-0.08).epsilon(1e-12));
  CHECK(ds.y(49, 0) ==
        doctest::Approx(clean_cubic_mix(-0.08)).epsilon(1e-12));
  for (int i = 0; i < 100; ++i) {
    CHECK(ds.y(i, 0) ==
          doctest::Approx(clean_cubic_mix(ds.x(i, 0))).epsilon(1e-12));
  }
}

TEST_CASE("test grid is clean and selects the target function") {
  auto g5 = test_grid(5, -2.0, 2.0, "quadratic");
  REQUIRE(g5.size() == 5);
  double want[5] = {-1.6, -0.8, 0.0, 0.8, 1.6};
  for (int i = 0; i < 5; ++i) {
    CHECK(g5.x(i, 0) == doctest::Approx(want[i]).epsilon(1e-12));
    CHECK(g5.y(i, 0) == doctest::Approx(clean_quadratic(want[i])).epsilon(1e-12));
  }

  auto at1 = test_grid(2, 0.0, 4.0, "quadratic");
  CHECK(at1.x(0, 0) == doctest::Approx(1.0));
  CHECK(at1.y(0, 0) == doctest::Approx(11.22).epsilon(1e-12));

  auto cm = test_grid(10, -2.0, 2.0, "cubic_mix");
  for (int i = 0; i < 10; ++i) {
    CHECK(cm.y(i, 0) ==
          doctest::Approx(clean_cubic_mix(cm.x(i, 0))).epsilon(1e-12));
  }

  CHECK_THROWS_AS(test_grid(4, -2.0, 2.0, "nope"), ConfigError);
}

TEST_CASE("generator preconditions") {
  CHECK_THROWS_AS(gen_quadratic(1, 0.0, 1.0, 10.0, 0), ConfigError);
  CHECK_THROWS_AS(gen_quadratic(10, 2.0, 2.0, 10.0, 0), ConfigError);
  CHECK_THROWS_AS(gen_quadratic(10, 2.0, 1.0, 10.0, 0), ConfigError);
  CHECK_THROWS_AS(gen_cubic_mix(10, -8.0, 8.0, -1.0, 0), ConfigError);
}

TEST_CASE("idx fixture round trip: shapes, scaling, one-hot") {
  auto dir = tmp_dir();
  auto imgs = (dir / "fix-images-idx3-ubyte").string();
  auto labs = (dir / "fix-labels-idx1-ubyte").string();

  std::vector<std::uint8_t> pixels(2 * 28 * 28, 0);
  pixels[0] = 255;            // image 0, pixel (0,0)
  pixels[784 + 30] = 128;     // image 1, pixel (1,2)
  write_idx_images(imgs, pixels, 2, 28, 28);
  write_idx_labels(labs, {3, 7});

  auto ds = mnist_load(imgs, labs);
  REQUIRE(ds.x.rows == 2);
  REQUIRE(ds.x.cols == 784);
  REQUIRE(ds.y.rows == 2);
  REQUIRE(ds.y.cols == 10);
  CHECK(ds.x(0, 0) == doctest::Approx(1.0));
  CHECK(ds.x(0, 1) == doctest::Approx(0.0));
  CHECK(ds.x(1, 30) == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
  for (int k = 0; k < 10; ++k) {
    CHECK(ds.y(0, k) == (k == 3 ? 1.0 : 0.0));
    CHECK(ds.y(1, k) == (k == 7 ? 1.0 : 0.0));
  }
}

TEST_CASE("idx loader rejects malformed files") {
  auto dir = tmp_dir();
  auto imgs = (dir / "bad-images").string();
  auto labs = (dir / "bad-labels").string();

  {  // empty files
    std::ofstream(imgs).close();
    std::ofstream(labs).close();
    CHECK_THROWS_AS(mnist_load(imgs, labs), DataError);
  }
  {  // wrong magic in images
    std::vector<std::uint8_t> px(28 * 28, 0);
    write_idx_images(imgs, px, 1, 28, 28);
    write_idx_labels(labs, {1});
    std::fstream f(imgs, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(3);
    char c = 0x42;
    f.write(&c, 1);
    f.close();
    CHECK_THROWS_AS(mnist_load(imgs, labs), DataError);
  }
  {  // count mismatch between files
    std::vector<std::uint8_t> px(2 * 28 * 28, 0);
    write_idx_images(imgs, px, 2, 28, 28);
    write_idx_labels(labs, {1, 2, 3});
    CHECK_THROWS_AS(mnist_load(imgs, labs), DataError);
  }
  {  // truncated pixel payload
    std::vector<std::uint8_t> px(2 * 28 * 28, 0);
    write_idx_images(imgs, px, 2, 28, 28);
    write_idx_labels(labs, {1, 2});
    std::filesystem::resize_file(imgs, 16 + 28 * 28 + 100);
    CHECK_THROWS_AS(mnist_load(imgs, labs), DataError);
  }
  {  // label outside 0..9
    std::vector<std::uint8_t> px(28 * 28, 0);
    write_idx_images(imgs, px, 1, 28, 28);
    write_idx_labels(labs, {10});
    CHECK_THROWS_AS(mnist_load(imgs, labs), DataError);
  }
  CHECK_THROWS_AS(mnist_load((dir / "absent").string(), labs), DataError);
}

TEST_CASE("synthetic digit corpus is loadable, balanced, deterministic") {
  auto dir = tmp_dir();
  auto imgs = (dir / "synth-images-idx3-ubyte").string();
  auto labs = (dir / "synth-labels-idx1-ubyte").string();
  write_synth_digits_idx(imgs, labs, 200, 11);
  auto ds = mnist_load(imgs, labs);
  REQUIRE(ds.x.rows == 200);
  REQUIRE(ds.x.cols == 784);
  REQUIRE(ds.y.cols == 10);

  int counts[10] = {0};
  for (int i = 0; i < 200; ++i) {
    for (int k = 0; k < 10; ++k) {
      if (ds.y(i, k) == 1.0) ++counts[k];
    }
  }
  for (int k = 0; k < 10; ++k) CHECK(counts[k] == 20);

  for (int i = 0; i < ds.x.rows; ++i) {
    for (int j = 0; j < ds.x.cols; ++j) {
      CHECK(ds.x(i, j) >= 0.0);
      CHECK(ds.x(i, j) <= 1.0);
    }
  }

  // Same class pairs should sit closer than cross-class pairs on average,
  // otherwise the corpus is unlearnable noise.
  auto dist2 = [&](int a, int b) {
    double s = 0.0;
    for (int j = 0; j < 784; ++j) {
      double d = ds.x(a, j) - ds.x(b, j);
      s += d * d;
    }
    return s;
  };
  // Classes cycle i % 10, so rows i and i+10 share a class and rows i, i+1
  // do not.
  double same = 0.0, cross = 0.0;
  int pairs = 0;
  for (int i = 0; i + 10 < 200; i += 7) {
    same += dist2(i, i + 10);
    cross += dist2(i, i + 1);
    ++pairs;
  }
  CHECK(same / pairs < cross / pairs);

  write_synth_digits_idx(imgs, labs, 200, 11);
  auto ds2 = mnist_load(imgs, labs);
  CHECK(dataset_checksum(ds2) == dataset_checksum(ds));
}

TEST_CASE("label randomization: rate, determinism, degenerate cases") {
  auto dir = tmp_dir();
  auto imgs = (dir / "rl-images").string();
  auto labs = (dir / "rl-labels").string();
  write_synth_digits_idx(imgs, labs, 10000, 5);
  auto ds = mnist_load(imgs, labs);

  auto rnd = randomize_labels(ds, 99);
  REQUIRE(rnd.y.rows == ds.y.rows);
  REQUIRE(rnd.y.cols == 10);
  int agree = 0;
  for (int i = 0; i < rnd.y.rows; ++i) {
    int a = -1, b = -1, ones = 0;
    for (int k = 0; k < 10; ++k) {
      if (rnd.y(i, k) == 1.0) {
        a = k;
        ++ones;
      } else {
        CHECK(rnd.y(i, k) == 0.0);
      }
      if (ds.y(i, k) == 1.0) b = k;
    }
    CHECK(ones == 1);
    if (a == b) ++agree;
  }
  double rate = static_cast<double>(agree) / rnd.y.rows;
  CHECK(rate > 0.07);
  CHECK(rate < 0.13);

  auto rnd2 = randomize_labels(ds, 99);
  CHECK(dataset_checksum(rnd2) == dataset_checksum(rnd));

  // Inputs are untouched.
  CHECK(rnd.x.a == ds.x.a);

  // Single-column targets pass through unchanged.
  Dataset one;
  one.x = Matrix(3, 1);
  one.y = Matrix(3, 1);
  one.y(0, 0) = 1.0;
  one.y(1, 0) = 1.0;
  one.y(2, 0) = 1.0;
  auto same = randomize_labels(one, 4);
  CHECK(same.y.a == one.y.a);

  // Regression targets are rejected.
  auto reg = gen_quadratic(10, -8.0, 8.0, 10.0, 0);
  CHECK_THROWS_AS(randomize_labels(reg, 1), DataError);
}

TEST_CASE("csv cache round trips exact doubles") {
  auto dir = tmp_dir();
  auto path = (dir / "cache.csv").string();
  auto ds = gen_cubic_mix(37, -8.0, 8.0, 10.0, 21);
  ds.meta = "cubic_mix";
  write_dataset_csv(path, ds);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x0,y0");

  auto back = read_dataset_csv(path);
  REQUIRE(back.x.rows == ds.x.rows);
  REQUIRE(back.y.cols == ds.y.cols);
  CHECK(back.x.a == ds.x.a);
  CHECK(back.y.a == ds.y.a);

  // Multi-column: header lists x block then y block.
  Dataset wide;
  wide.x = Matrix(2, 3);
  wide.y = Matrix(2, 2);
  for (int j = 0; j < 3; ++j) wide.x(1, j) = 0.1 * (j + 1) / 3.0;
  wide.y(0, 1) = -1.25e-7;
  auto wpath = (dir / "wide.csv").string();
  write_dataset_csv(wpath, wide);
  std::ifstream win(wpath);
  std::getline(win, header);
  CHECK(header == "x0,x1,x2,y0,y1");
  auto wback = read_dataset_csv(wpath);
  CHECK(wback.x.a == wide.x.a);
  CHECK(wback.y.a == wide.y.a);

  CHECK_THROWS_AS(read_dataset_csv((dir / "absent.csv").string()), DataError);
}
