#include "netgeom/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "netgeom/errors.hpp"

namespace netgeom {

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_sym(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

constexpr char kHistoryHeader[] =
    "epoch,train_loss,test_loss,sigma_product,probe_sigma_max_mean,nu,lr";

}  // namespace

std::string base64_encode(const void* data, std::size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::string out;
  out.reserve((n + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= n; i += 3) {
    unsigned v = (unsigned(p[i]) << 16) | (unsigned(p[i + 1]) << 8) | p[i + 2];
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back(kAlphabet[v & 63]);
  }
  if (i + 1 == n) {
    unsigned v = unsigned(p[i]) << 16;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (i + 2 == n) {
    unsigned v = (unsigned(p[i]) << 16) | (unsigned(p[i + 1]) << 8);
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& s) {
  if (s.size() % 4 != 0) {
    throw DataError("base64: length must be a multiple of 4");
  }
  std::vector<unsigned char> out;
  out.reserve(s.size() / 4 * 3);
  for (std::size_t i = 0; i < s.size(); i += 4) {
    int pad = 0;
    int sym[4];
    for (int k = 0; k < 4; ++k) {
      char c = s[i + k];
      if (c == '=') {
        // Padding is only valid in the last one or two positions of the
        // final quartet.
        if (i + 4 != s.size() || k < 2) {
          throw DataError("base64: misplaced padding");
        }
        ++pad;
        sym[k] = 0;
      } else if (pad > 0) {
        throw DataError("base64: data after padding");
      } else {
        sym[k] = decode_sym(c);
        if (sym[k] < 0) {
          throw DataError(std::string("base64: bad character '") + c + "'");
        }
      }
    }
    unsigned v = (unsigned(sym[0]) << 18) | (unsigned(sym[1]) << 12) |
                 (unsigned(sym[2]) << 6) | unsigned(sym[3]);
    out.push_back((unsigned char)((v >> 16) & 0xff));
    if (pad < 2) out.push_back((unsigned char)((v >> 8) & 0xff));
    if (pad < 1) out.push_back((unsigned char)(v & 0xff));
  }
  return out;
}

void write_history_csv(const std::string& path,
                       const std::vector<HistoryRow>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("history: cannot write " + path);
  std::fprintf(f, "%s\n", kHistoryHeader);
  for (const auto& r : rows) {
    std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.epoch,
                 r.train_loss, r.test_loss, r.sigma_product,
                 r.probe_sigma_max_mean, r.nu, r.lr);
  }
  std::fclose(f);
}

std::vector<HistoryRow> read_history_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("history: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kHistoryHeader) {
    throw DataError("history: unexpected header in " + path);
  }
  std::vector<HistoryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string tok;
    double v[7];
    for (int k = 0; k < 7; ++k) {
      if (!std::getline(ls, tok, ',')) {
        throw DataError("history: short row in " + path);
      }
      char* end = nullptr;
      v[k] = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str()) {
        throw DataError("history: bad number '" + tok + "' in " + path);
      }
    }
    HistoryRow r;
    r.epoch = int(v[0]);
    r.train_loss = v[1];
    r.test_loss = v[2];
    r.sigma_product = v[3];
    r.probe_sigma_max_mean = v[4];
    r.probe_sigma_max_max = v[4];  // the CSV carries the mean column only
    r.nu = v[5];
    r.lr = v[6];
    rows.push_back(r);
  }
  return rows;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("io: cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("io: cannot write " + path);
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) throw DataError("io: short write to " + path);
}

}  // namespace netgeom
