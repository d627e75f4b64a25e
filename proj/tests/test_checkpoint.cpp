#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "netgeom/checkpoint.hpp"
#include "netgeom/dataset.hpp"
#include "netgeom/errors.hpp"
#include "netgeom/io.hpp"
#include "netgeom/train.hpp"

using namespace netgeom;

namespace {

std::filesystem::path tmp_dir() {
  auto d = std::filesystem::temp_directory_path() / "netgeom_ckpt_test";
  std::filesystem::create_directories(d);
  return d;
}

std::vector<LayerSpec> mixed_arch() {
  DenseSpec in;
  in.in = 2;
  in.out = 5;
  in.act = ActivationKind::Tanh;
  GenSkipSpec skip;
  skip.width = 5;
  skip.out = 5;
  skip.act = ActivationKind::ReLU;
  skip.nu = Schedule::linear(1.0, 0.1, 10);
  skip.inner_layers = 2;
  skip.gl = true;
  GenSkipSpec learned;
  learned.width = 4;
  learned.out = 3;
  learned.act = ActivationKind::Softplus;
  learned.proj = ProjKind::Learned;
  learned.gl = false;
  learned.bias = true;
  GenDropoutSpec gd;
  gd.width = 6;
  gd.out = 4;
  gd.act = ActivationKind::ReLU;
  gd.drop_prob = 0.25;
  DenseSpec out;
  out.out = 2;
  out.act = ActivationKind::Identity;
  return {in, skip, learned, gd, out};
}

}  // namespace

TEST_CASE("base64 matches the RFC 4648 vectors") {
  auto enc = [](const std::string& s) {
    return base64_encode(s.data(), s.size());
  };
  CHECK(enc("") == "");
  CHECK(enc("f") == "Zg==");
  CHECK(enc("fo") == "Zm8=");
  CHECK(enc("foo") == "Zm9v");
  CHECK(enc("foob") == "Zm9vYg==");
  CHECK(enc("fooba") == "Zm9vYmE=");
  CHECK(enc("foobar") == "Zm9vYmFy");

  for (const std::string s :
       {"", "f", "fo", "foo", "foob", "fooba", "foobar"}) {
    auto round = base64_decode(enc(s));
    CHECK(std::string(round.begin(), round.end()) == s);
  }

  // All byte values survive.
  std::vector<unsigned char> all(256);
  for (int i = 0; i < 256; ++i) all[size_t(i)] = (unsigned char)i;
  auto dec = base64_decode(base64_encode(all.data(), all.size()));
  CHECK(dec == all);

  CHECK_THROWS_AS(base64_decode("Zg="), DataError);   // bad length
  CHECK_THROWS_AS(base64_decode("Z!=="), DataError);  // bad alphabet
  CHECK_THROWS_AS(base64_decode("=AAA"), DataError);  // misplaced padding
}

TEST_CASE("history csv emits the fixed column order and round trips") {
  auto path = (tmp_dir() / "history.csv").string();
  std::vector<HistoryRow> rows(2);
  rows[0].epoch = 1;
  rows[0].train_loss = 1.0 / 3.0;
  rows[0].test_loss = std::nan("");
  rows[0].sigma_product = 1.25e-300;
  rows[0].probe_sigma_max_mean = 4.0;
  rows[0].probe_sigma_max_max = 5.0;
  rows[0].nu = 0.55;
  rows[0].lr = 1e-5;
  rows[1] = rows[0];
  rows[1].epoch = 2;
  rows[1].train_loss = 0.1 + 0.2;  // not representable exactly; %.17g must keep it
  write_history_csv(path, rows);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "epoch,train_loss,test_loss,sigma_product,probe_sigma_max_mean,nu,lr");

  auto back = read_history_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].epoch == 1);
  CHECK(back[0].train_loss == rows[0].train_loss);
  CHECK(std::isnan(back[0].test_loss));
  CHECK(back[0].sigma_product == rows[0].sigma_product);
  CHECK(back[0].probe_sigma_max_mean == rows[0].probe_sigma_max_mean);
  CHECK(back[0].nu == rows[0].nu);
  CHECK(back[0].lr == rows[0].lr);
  CHECK(back[1].train_loss == rows[1].train_loss);

  // Byte-identical rewrite, the determinism hook for experiment reruns.
  auto path2 = (tmp_dir() / "history2.csv").string();
  write_history_csv(path2, back);
  CHECK(read_text_file(path) == read_text_file(path2));

  CHECK_THROWS_AS(read_history_csv((tmp_dir() / "absent.csv").string()),
                  DataError);
}

TEST_CASE("checkpoint round trips weights bit-exactly") {
  auto path = (tmp_dir() / "net.ckpt.json").string();
  Network net = init_network(mixed_arch(), 31, InitScheme::Xavier);

  // Move off the raw init so the file carries trained state.
  auto data = gen_quadratic(12, -2.0, 2.0, 1.0, 8);
  Dataset wide;
  wide.x = Matrix(12, 2);
  wide.y = Matrix(12, 2);
  for (int i = 0; i < 12; ++i) {
    wide.x(i, 0) = data.x(i, 0);
    wide.x(i, 1) = -data.x(i, 0);
    wide.y(i, 0) = data.y(i, 0) * 0.01;
    wide.y(i, 1) = 0.5;
  }
  BregmanLoss loss = loss_from_name("squared", 2);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 4;
  cfg.lr = Schedule::constant(1e-3);
  cfg.seed = 5;
  train(net, wide, nullptr, loss, cfg);
  net.set_epoch(7);  // nontrivial nu values to preserve

  save_checkpoint(path, net, 31, InitScheme::Xavier, 3);
  auto loaded = load_checkpoint(path);

  CHECK(loaded.seed == 31);
  CHECK(loaded.scheme == InitScheme::Xavier);
  CHECK(loaded.epoch == 3);
  REQUIRE(loaded.net.blocks.size() == net.blocks.size());
  for (size_t i = 0; i < net.blocks.size(); ++i) {
    CHECK(loaded.net.blocks[i].name == net.blocks[i].name);
    CHECK(loaded.net.blocks[i].group == net.blocks[i].group);
    CHECK(loaded.net.blocks[i].w.a == net.blocks[i].w.a);
    CHECK(loaded.net.blocks[i].b == net.blocks[i].b);
  }
  CHECK(loaded.net.nu == net.nu);
  CHECK(loaded.net.input_dim == net.input_dim);
  CHECK(loaded.net.output_dim == net.output_dim);

  // Outputs agree bit for bit on a probe point.
  Vec x = {0.37, -1.4};
  CHECK(forward(loaded.net, x) == forward(net, x));

  // Saving the loaded net reproduces the file byte for byte.
  auto path2 = (tmp_dir() / "net2.ckpt.json").string();
  save_checkpoint(path2, loaded.net, loaded.seed, loaded.scheme, loaded.epoch);
  CHECK(read_text_file(path) == read_text_file(path2));

  // Schedules survive: nu refreshes identically after load.
  loaded.net.set_epoch(5);
  net.set_epoch(5);
  CHECK(loaded.net.nu == net.nu);
}

TEST_CASE("checkpoint loader rejects damaged files") {
  auto dir = tmp_dir();
  CHECK_THROWS_AS(load_checkpoint((dir / "missing.json").string()), DataError);

  auto bad = (dir / "bad.json").string();
  write_text_file(bad, "{not json");
  CHECK_THROWS_AS(load_checkpoint(bad), DataError);

  Network net = init_network(mixed_arch(), 31, InitScheme::He);
  auto path = (dir / "tamper.json").string();

  save_checkpoint(path, net, 31, InitScheme::He, 0);
  {
    // Unknown schema version.
    auto text = read_text_file(path);
    auto pos = text.find("\"schema_version\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 19, "\"schema_version\": 9");
    write_text_file(bad, text);
    CHECK_THROWS_AS(load_checkpoint(bad), ConfigError);
  }
  {
    // Wrong payload size for a block.
    auto text = read_text_file(path);
    auto pos = text.find("\"w\": \"");
    REQUIRE(pos != std::string::npos);
    // Drop 8 base64 chars = 6 bytes, corrupting the f64 payload length.
    text.erase(pos + 6, 8);
    write_text_file(bad, text);
    CHECK_THROWS_AS(load_checkpoint(bad), ConfigError);
  }
}
