#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "netgeom/bregman.hpp"
#include "netgeom/eig.hpp"
#include "netgeom/errors.hpp"
#include "netgeom/rng.hpp"
#include "support/oracles.hpp"

using namespace netgeom;

static Vec random_vec(int n, SplitMix64& rng, double scale = 1.0) {
  Vec v(n);
  for (auto& x : v) x = scale * rng.next_normal();
  return v;
}

static Vec random_simplex(int n, SplitMix64& rng) {
  Vec v(n);
  double s = 0.0;
  for (auto& x : v) {
    x = 0.05 + rng.next_unit();
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

TEST_CASE("squared loss is half squared distance") {
  BregmanLoss loss = loss_from_name("squared", 3);
  Vec z = {1.0, -2.0, 0.5}, y = {0.0, 1.0, 0.5};
  CHECK(loss.value(z, y) == doctest::Approx(0.5 * (1.0 + 9.0)).epsilon(1e-12));
  Vec g = loss.grad_z(z, y);
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(-3.0));
  CHECK(g[2] == doctest::Approx(0.0));
}

TEST_CASE("softmax cross entropy worked value: uniform logits vs one-hot") {
  BregmanLoss loss = loss_from_name("softmax_ce", 2);
  Vec z = {0.0, 0.0}, y = {1.0, 0.0};
  CHECK(loss.value(z, y) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("loss values are nonnegative and vanish iff induced mean matches y") {
  SplitMix64 rng(77);
  for (const char* name : {"squared", "softmax_ce", "bernoulli"}) {
    for (int rep = 0; rep < 40; ++rep) {
      int n = std::string(name) == "bernoulli" ? 1 : 3;
      BregmanLoss loss = loss_from_name(name, n);
      Vec z = random_vec(n, rng, 2.0);
      Vec y;
      if (std::string(name) == "squared") y = random_vec(n, rng, 2.0);
      else if (std::string(name) == "softmax_ce") y = random_simplex(n, rng);
      else y = {0.1 + 0.8 * rng.next_unit()};

      double v = loss.value(z, y);
      CHECK(v >= 0.0);

      // z matching the mean parameter y gives value ~0
      Vec zstar = loss.mean_to_natural(y);
      CHECK(loss.value(zstar, y) <= 1e-9);
      Vec mu = loss.induced_mean(zstar);
      for (int i = 0; i < n; ++i) CHECK(std::fabs(mu[i] - y[i]) < 1e-9);
    }
  }
}

TEST_CASE("grad_z equals induced mean minus y and matches finite differences") {
  SplitMix64 rng(123);
  int checked = 0;
  for (const char* name : {"squared", "softmax_ce", "bernoulli"}) {
    for (int rep = 0; rep < 40; ++rep) {
      int n = std::string(name) == "bernoulli" ? 2 : 4;
      BregmanLoss loss = loss_from_name(name, n);
      Vec z = random_vec(n, rng, 1.5);
      Vec y;
      if (std::string(name) == "squared") y = random_vec(n, rng, 1.5);
      else if (std::string(name) == "softmax_ce") y = random_simplex(n, rng);
      else { y = random_vec(n, rng); for (auto& t : y) t = 0.1 + 0.8 / (1 + std::exp(-t)); }

      Vec g = loss.grad_z(z, y);
      Vec mu = loss.induced_mean(z);
      for (int i = 0; i < n; ++i)
        CHECK(g[i] == doctest::Approx(mu[i] - y[i]).epsilon(1e-12));

      Vec fd = oracle::fd_grad([&](const Vec& zz) { return loss.value(zz, y); }, z);
      for (int i = 0; i < n; ++i) {
        double den = std::max(1.0, std::fabs(fd[i]));
        CHECK(std::fabs(g[i] - fd[i]) / den < 1e-6);
      }
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("hessian_psi matches finite differences of psi and is PSD") {
  SplitMix64 rng(321);
  for (const char* name : {"squared", "softmax_ce", "bernoulli"}) {
    for (int rep = 0; rep < 40; ++rep) {
      int n = std::string(name) == "bernoulli" ? 2 : 3;
      BregmanLoss loss = loss_from_name(name, n);
      Vec z = random_vec(n, rng, 1.5);

      Matrix h = loss.hessian_psi(z);
      Matrix fd = oracle::fd_hessian([&](const Vec& zz) { return loss.psi(zz); }, z);
      CHECK(oracle::rel_err(h, fd) < 1e-6);
      CHECK(psd_min_eig(h) >= -1e-9);
    }
  }
}

TEST_CASE("softmax hessian rows sum to zero") {
  SplitMix64 rng(11);
  BregmanLoss loss = loss_from_name("softmax_ce", 5);
  for (int rep = 0; rep < 20; ++rep) {
    Vec z = random_vec(5, rng, 2.0);
    Matrix h = loss.hessian_psi(z);
    for (int i = 0; i < 5; ++i) {
      double s = 0.0;
      for (int j = 0; j < 5; ++j) s += h(i, j);
      CHECK(std::fabs(s) < 1e-12);
    }
  }
}

TEST_CASE("conjugacy check is tiny for interior points") {
  SplitMix64 rng(17);
  BregmanLoss sq = loss_from_name("squared", 3);
  CHECK(sq.conjugacy_check({0.3, -1.2, 4.0}) < 1e-9);

  BregmanLoss sm = loss_from_name("softmax_ce", 4);
  for (int rep = 0; rep < 20; ++rep)
    CHECK(sm.conjugacy_check(random_simplex(4, rng)) < 1e-9);

  BregmanLoss be = loss_from_name("bernoulli", 1);
  for (int rep = 0; rep < 20; ++rep)
    CHECK(be.conjugacy_check({0.05 + 0.9 * rng.next_unit()}) < 1e-9);
}

TEST_CASE("simplex and shape violations raise errors") {
  BregmanLoss sm = loss_from_name("softmax_ce", 3);
  CHECK_THROWS_AS(sm.value({0, 0, 0}, {0.5, 0.6, 0.2}), DataError);    // sums to 1.3
  CHECK_THROWS_AS(sm.value({0, 0, 0}, {1.2, -0.2, 0.0}), DataError);   // negative entry
  CHECK_THROWS_AS(sm.value({0, 0}, {0.5, 0.5, 0.0}), DataError);       // z wrong size
  CHECK_THROWS_AS(sm.conjugacy_check({1.0, 0.0, 0.0}), DataError);     // boundary
  CHECK_THROWS_AS(loss_from_name("nope", 2), ConfigError);

  BregmanLoss be = loss_from_name("bernoulli", 1);
  CHECK_THROWS_AS(be.value({0.0}, {1.5}), DataError);
}

TEST_CASE("loss names round trip") {
  for (const char* name : {"squared", "softmax_ce", "bernoulli"}) {
    BregmanLoss loss = loss_from_name(name, 2);
    CHECK(loss_name(loss.kind) == name);
  }
}
