#include "netgeom/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "netgeom/errors.hpp"
#include "netgeom/rng.hpp"

namespace netgeom {

namespace {

void check_grid_args(int n, double lo, double hi, double sigma) {
  if (n < 2) {
    throw ConfigError("dataset: n must be >= 2, got " + std::to_string(n));
  }
  if (!(lo < hi)) {
    throw ConfigError("dataset: interval requires lo < hi");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("dataset: sigma must be a finite value >= 0");
  }
}

double quadratic_fn(double x) { return 10.0 + 1.22 * x * x; }

double cubic_mix_fn(double x) {
  double y = quadratic_fn(x);
  if (x < 0.0) {
    double t = x + 4.0;
    y += 1.22 * t * t * t;
  }
  return y;
}

// Midpoints of the n-cell uniform partition of (lo, hi): both endpoints
// stay outside the sample.
Dataset grid_dataset(int n, double lo, double hi, double sigma,
                     std::uint64_t seed, double (*fn)(double),
                     const char* tag) {
  check_grid_args(n, lo, hi, sigma);
  Dataset ds;
  ds.x = Matrix(n, 1);
  ds.y = Matrix(n, 1);
  ds.meta = tag;
  double step = (hi - lo) / n;
  SplitMix64 rng = named_stream(seed, "data");
  for (int i = 0; i < n; ++i) {
    double x = lo + (i + 0.5) * step;
    ds.x(i, 0) = x;
    double eps = sigma > 0.0 ? sigma * rng.next_normal() : 0.0;
    ds.y(i, 0) = fn(x) + eps;
  }
  return ds;
}

std::uint32_t read_u32_be(std::istream& in, const std::string& path,
                          const char* what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) {
    throw DataError("idx: truncated " + std::string(what) + " in " + path);
  }
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_u32_be(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

// Seven-segment strokes for the synthetic corpus. Segments live on a
// 28x28 canvas: horizontals at rows 4/14/24 spanning cols 8..19, verticals
// at cols 8/19 spanning the upper or lower half.
struct Segment {
  int r0, c0, r1, c1;
};

const Segment kSegments[7] = {
    {4, 8, 4, 19},    // A top
    {4, 19, 14, 19},  // B upper right
    {14, 19, 24, 19}, // C lower right
    {24, 8, 24, 19},  // D bottom
    {14, 8, 24, 8},   // E lower left
    {4, 8, 14, 8},    // F upper left
    {14, 8, 14, 19},  // G middle
};

const int kDigitSegments[10] = {
    0b0111111,  // 0: ABCDEF
    0b0000110,  // 1: BC
    0b1011011,  // 2: ABDEG
    0b1001111,  // 3: ABCDG
    0b1100110,  // 4: BCFG
    0b1101101,  // 5: ACDFG
    0b1111101,  // 6: ACDEFG
    0b0000111,  // 7: ABC
    0b1111111,  // 8: all
    0b1101111,  // 9: ABCDFG
};

}  // namespace

Dataset gen_quadratic(int n, double lo, double hi, double sigma,
                      std::uint64_t seed) {
  return grid_dataset(n, lo, hi, sigma, seed, quadratic_fn, "quadratic");
}

Dataset gen_cubic_mix(int n, double lo, double hi, double sigma,
                      std::uint64_t seed) {
  return grid_dataset(n, lo, hi, sigma, seed, cubic_mix_fn, "cubic_mix");
}

Dataset test_grid(int n, double lo, double hi, const std::string& fn) {
  double (*f)(double) = nullptr;
  if (fn == "quadratic") {
    f = quadratic_fn;
  } else if (fn == "cubic_mix") {
    f = cubic_mix_fn;
  } else {
    throw ConfigError("test_grid: unknown fn '" + fn +
                      "' (expected quadratic or cubic_mix)");
  }
  Dataset ds = grid_dataset(n, lo, hi, 0.0, 0, f, "test_grid");
  ds.meta += ":" + fn;
  return ds;
}

Dataset mnist_load(const std::string& images_path,
                   const std::string& labels_path) {
  std::ifstream imgs(images_path, std::ios::binary);
  if (!imgs) throw DataError("idx: cannot open " + images_path);
  std::ifstream labs(labels_path, std::ios::binary);
  if (!labs) throw DataError("idx: cannot open " + labels_path);

  std::uint32_t magic = read_u32_be(imgs, images_path, "image magic");
  if (magic != kImagesMagic) {
    throw DataError("idx: bad image magic in " + images_path);
  }
  std::uint32_t n = read_u32_be(imgs, images_path, "image count");
  std::uint32_t rows = read_u32_be(imgs, images_path, "row count");
  std::uint32_t cols = read_u32_be(imgs, images_path, "col count");
  if (rows == 0 || cols == 0) {
    throw DataError("idx: zero image dimensions in " + images_path);
  }

  std::uint32_t lmagic = read_u32_be(labs, labels_path, "label magic");
  if (lmagic != kLabelsMagic) {
    throw DataError("idx: bad label magic in " + labels_path);
  }
  std::uint32_t ln = read_u32_be(labs, labels_path, "label count");
  if (ln != n) {
    throw DataError("idx: image/label count mismatch (" + std::to_string(n) +
                    " vs " + std::to_string(ln) + ")");
  }

  const std::size_t pix = std::size_t(rows) * cols;
  std::vector<unsigned char> buf(pix);
  std::vector<unsigned char> lbuf(n);
  labs.read(reinterpret_cast<char*>(lbuf.data()), std::streamsize(n));
  if (std::size_t(labs.gcount()) != n) {
    throw DataError("idx: truncated labels in " + labels_path);
  }

  Dataset ds;
  ds.x = Matrix(int(n), int(pix));
  ds.y = Matrix(int(n), 10);
  ds.meta = "idx:" + images_path;
  for (std::uint32_t i = 0; i < n; ++i) {
    imgs.read(reinterpret_cast<char*>(buf.data()), std::streamsize(pix));
    if (std::size_t(imgs.gcount()) != pix) {
      throw DataError("idx: truncated pixels in " + images_path);
    }
    double* row = &ds.x(int(i), 0);
    for (std::size_t j = 0; j < pix; ++j) row[j] = buf[j] / 255.0;
    if (lbuf[i] > 9) {
      throw DataError("idx: label " + std::to_string(int(lbuf[i])) +
                      " out of range in " + labels_path);
    }
    ds.y(int(i), int(lbuf[i])) = 1.0;
  }
  return ds;
}

void write_idx_images(const std::string& path,
                      const std::vector<std::uint8_t>& pixels, int n, int rows,
                      int cols) {
  if (n < 0 || rows <= 0 || cols <= 0 ||
      pixels.size() != std::size_t(n) * rows * cols) {
    throw ConfigError("idx: pixel buffer does not match n*rows*cols");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("idx: cannot write " + path);
  write_u32_be(out, kImagesMagic);
  write_u32_be(out, std::uint32_t(n));
  write_u32_be(out, std::uint32_t(rows));
  write_u32_be(out, std::uint32_t(cols));
  out.write(reinterpret_cast<const char*>(pixels.data()),
            std::streamsize(pixels.size()));
  if (!out) throw DataError("idx: short write to " + path);
}

void write_idx_labels(const std::string& path,
                      const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("idx: cannot write " + path);
  write_u32_be(out, kLabelsMagic);
  write_u32_be(out, std::uint32_t(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            std::streamsize(labels.size()));
  if (!out) throw DataError("idx: short write to " + path);
}

void write_synth_digits_idx(const std::string& images_path,
                            const std::string& labels_path, int n,
                            std::uint64_t seed) {
  if (n <= 0) throw ConfigError("synth digits: n must be positive");
  std::vector<std::uint8_t> pixels(std::size_t(n) * 28 * 28, 0);
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(n));
  SplitMix64 rng = named_stream(seed, "synth");

  for (int i = 0; i < n; ++i) {
    int digit = i % 10;
    labels[std::size_t(i)] = std::uint8_t(digit);
    int dy = int(rng.next_below(5)) - 2;
    int dx = int(rng.next_below(5)) - 2;
    int ink = 180 + int(rng.next_below(76));
    std::uint8_t* img = &pixels[std::size_t(i) * 28 * 28];

    int mask = kDigitSegments[digit];
    for (int s = 0; s < 7; ++s) {
      if (!(mask & (1 << s))) continue;
      const Segment& seg = kSegments[s];
      // Strokes are axis-aligned, two pixels thick.
      if (seg.r0 == seg.r1) {
        for (int c = seg.c0; c <= seg.c1; ++c) {
          for (int t = 0; t < 2; ++t) {
            int r = seg.r0 + t + dy, cc = c + dx;
            if (r >= 0 && r < 28 && cc >= 0 && cc < 28) {
              img[r * 28 + cc] = std::uint8_t(ink);
            }
          }
        }
      } else {
        for (int r = seg.r0; r <= seg.r1; ++r) {
          for (int t = 0; t < 2; ++t) {
            int rr = r + dy, cc = seg.c0 + t + dx;
            if (rr >= 0 && rr < 28 && cc >= 0 && cc < 28) {
              img[rr * 28 + cc] = std::uint8_t(ink);
            }
          }
        }
      }
    }
    // Sparse background speckle keeps the task nontrivial without
    // overwhelming the strokes.
    for (int s = 0; s < 16; ++s) {
      int p = int(rng.next_below(28 * 28));
      if (img[p] == 0) img[p] = std::uint8_t(1 + rng.next_below(40));
    }
  }
  write_idx_images(images_path, pixels, n, 28, 28);
  write_idx_labels(labels_path, labels);
}

Dataset randomize_labels(const Dataset& ds, std::uint64_t seed) {
  if (ds.y.cols == 1) {
    // One class: the only valid one-hot row is [1], so there is nothing
    // to shuffle, but arbitrary regression targets are still rejected.
    for (int i = 0; i < ds.y.rows; ++i) {
      if (ds.y(i, 0) != 1.0) {
        throw DataError("randomize_labels: targets are not one-hot at row " +
                        std::to_string(i));
      }
    }
    return ds;
  }
  for (int i = 0; i < ds.y.rows; ++i) {
    int ones = 0;
    for (int k = 0; k < ds.y.cols; ++k) {
      double v = ds.y(i, k);
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        throw DataError("randomize_labels: targets are not one-hot at row " +
                        std::to_string(i));
      }
    }
    if (ones != 1) {
      throw DataError("randomize_labels: targets are not one-hot at row " +
                      std::to_string(i));
    }
  }
  Dataset out = ds;
  out.meta += ":randomized";
  SplitMix64 rng = named_stream(seed, "labels");
  for (int i = 0; i < out.y.rows; ++i) {
    for (int k = 0; k < out.y.cols; ++k) out.y(i, k) = 0.0;
    out.y(i, int(rng.next_below(std::uint64_t(out.y.cols)))) = 1.0;
  }
  return out;
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("csv: cannot write " + path);
  for (int j = 0; j < ds.x.cols; ++j) {
    std::fprintf(f, "%sx%d", j ? "," : "", j);
  }
  for (int j = 0; j < ds.y.cols; ++j) std::fprintf(f, ",y%d", j);
  std::fputc('\n', f);
  for (int i = 0; i < ds.x.rows; ++i) {
    for (int j = 0; j < ds.x.cols; ++j) {
      std::fprintf(f, "%s%.17g", j ? "," : "", ds.x(i, j));
    }
    for (int j = 0; j < ds.y.cols; ++j) std::fprintf(f, ",%.17g", ds.y(i, j));
    std::fputc('\n', f);
  }
  std::fclose(f);
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw DataError("csv: empty file " + path);

  int dx = 0, dy = 0;
  {
    std::stringstream hs(header);
    std::string tok;
    while (std::getline(hs, tok, ',')) {
      if (!tok.empty() && tok[0] == 'x') {
        ++dx;
      } else if (!tok.empty() && tok[0] == 'y') {
        ++dy;
      } else {
        throw DataError("csv: unexpected header column '" + tok + "' in " +
                        path);
      }
    }
  }
  if (dx == 0 || dy == 0) {
    throw DataError("csv: header must list x and y columns in " + path);
  }

  std::vector<double> xs, ys;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string tok;
    int col = 0;
    while (std::getline(ls, tok, ',')) {
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str()) {
        throw DataError("csv: bad number '" + tok + "' in " + path);
      }
      if (col < dx) {
        xs.push_back(v);
      } else {
        ys.push_back(v);
      }
      ++col;
    }
    if (col != dx + dy) {
      throw DataError("csv: row " + std::to_string(rows) + " has " +
                      std::to_string(col) + " fields, expected " +
                      std::to_string(dx + dy) + " in " + path);
    }
    ++rows;
  }

  Dataset ds;
  ds.x = Matrix(rows, dx);
  ds.y = Matrix(rows, dy);
  ds.meta = "csv:" + path;
  std::memcpy(ds.x.a.data(), xs.data(), xs.size() * sizeof(double));
  std::memcpy(ds.y.a.data(), ys.data(), ys.size() * sizeof(double));
  return ds;
}

std::uint64_t dataset_checksum(const Dataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t nbytes) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < nbytes; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  std::int64_t dims[4] = {ds.x.rows, ds.x.cols, ds.y.rows, ds.y.cols};
  mix(dims, sizeof(dims));
  mix(ds.x.a.data(), ds.x.a.size() * sizeof(double));
  mix(ds.y.a.data(), ds.y.a.size() * sizeof(double));
  return h;
}

}  // namespace netgeom
