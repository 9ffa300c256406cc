#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qrc/oracles.hpp"
#include "qrc/quantum_core.hpp"
#include "qrc/tasks.hpp"

using namespace qrc;

TEST_SUITE("tasks") {

TEST_CASE("sine period") {
  const std::vector<double> expect{0, 0.70711, 1, 0.70711, 0, -0.70711, -1, -0.70711};
  const auto s = sine_period();
  REQUIRE(s.size() == 8);
  for (int k = 0; k < 8; ++k) CHECK(s[k] == doctest::Approx(expect[k]).epsilon(1e-5));
  CHECK(s[0] == 0.0);
  CHECK(s[4] == 0.0);
}

TEST_CASE("square period") {
  CHECK(square_period() == std::vector<double>{1, 1, 1, 1, -1, -1, -1, -1});
}

TEST_CASE("generated waveform sequence") {
  const auto ds = gen_sine_square(400, 1);
  REQUIRE(ds.points.size() == 3200);
  REQUIRE(ds.labels.size() == 3200);
  int squares = 0;
  for (int p = 0; p < 400; ++p) {
    const auto label = ds.labels[static_cast<std::size_t>(8 * p)];
    const auto ref = label == Waveform::Square ? square_period() : sine_period();
    for (int k = 0; k < 8; ++k) {
      CHECK(ds.labels[static_cast<std::size_t>(8 * p + k)] == label);
      CHECK(ds.points[static_cast<std::size_t>(8 * p + k)] == ref[k]);
    }
    squares += label == Waveform::Square;
  }
  CHECK(std::abs(squares / 400.0 - 0.5) <= 0.05);
  for (double v : ds.points) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("waveform generation is deterministic per seed") {
  const auto a = gen_sine_square(50, 7);
  const auto b = gen_sine_square(50, 7);
  const auto c = gen_sine_square(50, 8);
  CHECK(a.points == b.points);
  CHECK(a.labels == b.labels);
  CHECK(a.labels != c.labels);
}

TEST_CASE("train split covers whole periods") {
  for (int n : {4, 7, 400}) {
    for (double frac : {0.5, 0.3, 0.77}) {
      const auto ds = gen_sine_square(n, 1, frac);
      CHECK(ds.train_size() % 8 == 0);
      CHECK(ds.train_size() >= 8);
      CHECK(ds.train_size() < ds.points.size());
    }
  }
  CHECK(gen_sine_square(400, 1).train_size() == 1600);
}

TEST_CASE("waveform generation rejects invalid arguments") {
  CHECK_THROWS_AS(gen_sine_square(1, 1), InvalidArgument);
  CHECK_THROWS_AS(gen_sine_square(10, 1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(gen_sine_square(2, 1, 0.3), InvalidArgument);
}

TEST_CASE("Mackey-Glass without production decays exponentially") {
  MackeyGlassParams p;
  p.beta = 0.0;
  const auto s = gen_mackey_glass(100, 17.0, 1, p);
  for (std::size_t k = 0; k < s.values.size(); ++k)
    CHECK(std::abs(s.values[k] - oracle::pure_decay(p.burn_in + k * p.sample_stride, 1.2, p.gamma)) < 1e-6);
}

TEST_CASE("Mackey-Glass without production or decay is constant") {
  MackeyGlassParams p;
  p.beta = 0.0;
  p.gamma = 0.0;
  for (double tau : {1.0, 17.0, 30.0})
    for (double v : gen_mackey_glass(50, tau, 1, p).values) CHECK(v == 1.2);
}

TEST_CASE("Mackey-Glass chaotic series is bounded and aperiodic") {
  const auto s = gen_mackey_glass(2000, 17.0, 1);
  REQUIRE(s.values.size() == 2000);
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  CHECK(*lo > 0.2);
  CHECK(*hi < 1.6);
  for (std::size_t lag = 1; lag < 1000; ++lag) {
    double worst = 0;
    for (std::size_t k = 0; k + lag < s.values.size(); ++k)
      worst = std::max(worst, std::abs(s.values[k + lag] - s.values[k]));
    CHECK(worst > 1e-3);
  }
}

TEST_CASE("Mackey-Glass step refinement") {
  MackeyGlassParams fine;
  fine.dt_internal = 0.01;
  const auto a = gen_mackey_glass(500, 17.0, 1);
  const auto b = gen_mackey_glass(500, 17.0, 1, fine);
  double ss = 0;
  for (std::size_t k = 0; k < 500; ++k) ss += std::pow(a.values[k] - b.values[k], 2);
  CHECK(std::sqrt(ss / 500) < 1e-3);
  // fourth order: a factor 10 in step size buys far more than the bound
  CHECK(std::sqrt(ss / 500) < 1e-6);
}

TEST_CASE("Mackey-Glass rejects steps that do not divide the delay or stride") {
  MackeyGlassParams p;
  p.dt_internal = 0.3;
  CHECK_THROWS_AS(gen_mackey_glass(10, 17.0, 1, p), InvalidArgument);
  CHECK_THROWS_AS(gen_mackey_glass(0, 17.0, 1), InvalidArgument);
  CHECK_THROWS_AS(gen_mackey_glass(10, 0.0, 1), InvalidArgument);
}

TEST_CASE("encoding endpoints and midpoint") {
  EncodingMap m;
  CHECK(encode(-1.0, m) == 1.0);
  CHECK(encode(1.0, m) == 10.4);
  CHECK(encode(0.0, m) == doctest::Approx(5.7));
  CHECK(encode(-3.0, m) == 1.0);
  CHECK(encode(2.0, m) == 10.4);
}

TEST_CASE("encoding is monotone") {
  EncodingMap m{0.5, 7.0, 0.3, 1.4};
  double prev = -1;
  for (int i = 0; i <= 100; ++i) {
    const double a = encode(0.3 + 1.1 * i / 100.0, m);
    CHECK(a >= prev);
    prev = a;
  }
  CHECK(encode(0.3, m) == 0.5);
  CHECK(encode(1.4, m) == 7.0);
}

TEST_CASE("encoding rejects degenerate ranges") {
  CHECK_THROWS_AS(encode(0.0, EncodingMap{1, 2, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(encode(0.0, EncodingMap{2, 1, -1, 1}), InvalidArgument);
  CHECK_THROWS_AS(fit_encoding({0.5, 0.5}, 1, 2), InvalidArgument);
}

TEST_CASE("fitted encoding spans the training values") {
  const auto m = fit_encoding({0.4, 1.1, 0.9}, 1.0, 10.4);
  CHECK(m.data_min == 0.4);
  CHECK(m.data_max == 1.1);
}

TEST_CASE("dataset CSV layout") {
  std::ostringstream os;
  write_dataset_csv(os, gen_sine_square(2, 3));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "index,value,label");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 16);
  std::ostringstream mg;
  write_dataset_csv(mg, gen_mackey_glass(3, 17.0, 1));
  CHECK(mg.str().find("0,") != std::string::npos);
  CHECK(mg.str().substr(mg.str().size() - 2) == ",\n");
}

}  // TEST_SUITE
