#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pgn/graph.hpp"

using namespace pgn;

namespace {
const char* kGoldenConjugate = "0.61803398874989484820458683436563811772030917980576";
}

TEST_CASE("trajectory of a single vector", "[graph]") {
  MatrixA A(1, 1, {"0.5"});
  auto v = make_lattice_vector(A, {mpz_class(1)}, {mpz_class(1)}, 128);
  CHECK(v.first_norm == 1.0);
  CHECK(v.log_second == Catch::Approx(std::log(0.5)));
  CHECK(trajectory(A, v, 0.0) == Catch::Approx(0.0).margin(1e-15));
  auto vert = trajectory_vertex(A, v);
  CHECK(vert.x == Catch::Approx(0.5 * std::log(2.0)).margin(1e-12));        // 0.3466
  CHECK(vert.value == Catch::Approx(0.5 * std::log(0.5)).margin(1e-12));    // -0.3466
  // vertex value vanishes when |Aq-p| = |q|^{-n/m}
  auto w = make_lattice_vector(A, {mpz_class(2)}, {mpz_class(2)}, 128);     // residual 1, norm 2? no: 2*0.5-2 = -1
  CHECK(w.log_second == Catch::Approx(0.0).margin(1e-15));
  // here log|q| = log 2, log|Aq-p| = 0 -> vertex value (log 2 + 0)/2
  auto wv = trajectory_vertex(A, w);
  CHECK(wv.value == Catch::Approx(0.5 * std::log(2.0)).margin(1e-12));

  auto z = make_lattice_vector(A, {mpz_class(0)}, {mpz_class(1)}, 128);
  CHECK_THROWS_AS(trajectory(A, z, 1.0), Error);
}

TEST_CASE("combined graph starts at zero and orders components", "[graph]") {
  MatrixA A(1, 1, {kGoldenConjugate});
  auto g = combined_graph(A, 6.0, 0.25, Backend::exact);
  REQUIRE(g.grid.size() == 25);
  CHECK(g.values[0][0] == 0.0);
  CHECK(g.values[0][1] == 0.0);
  for (std::size_t i = 0; i < g.grid.size(); ++i)
    for (std::size_t j = 1; j < g.values[i].size(); ++j)
      CHECK(g.values[i][j] >= g.values[i][j - 1] - 1e-12);
}

TEST_CASE("golden ratio minima match the convergent oracle", "[graph][oracle]") {
  MatrixA A(1, 1, {kGoldenConjugate}, "golden");
  auto g = combined_graph(A, 12.0, 0.1, Backend::exact);
  REQUIRE(g.minima.size() >= 5);
  // Oracle: |F_k a - F_{k-1}| = phi^{-k} in exact integer arithmetic, so the
  // refined minima sit at ((log F_k) + (log F_k - k log phi))/2 with value
  // -(1/4) log 5 + o(1); adjacent minima abscissas differ by ~ log phi^2.
  double target = -0.25 * std::log(5.0);
  double log_phi = std::log((1 + std::sqrt(5.0)) / 2);
  for (auto& mrec : g.minima) {
    if (mrec.witness.first_norm >= 21) {  // F_8 onward the correction is < 5e-4
      CHECK(mrec.h1_at_r == Catch::Approx(target).margin(0.01));
      // abscissa identity: r_k = log F_k + (1/4) log 5 + o(1)
      CHECK(mrec.r == Catch::Approx(std::log(mrec.witness.first_norm) - target).margin(0.01));
    }
    // the deepest early minimum is the k=2 convergent at -log phi
    CHECK(mrec.h1_at_r >= -log_phi - 1e-6);
  }
  // one minimum per convergent: abscissas eventually spaced by log phi
  for (std::size_t i = 1; i < g.minima.size(); ++i) {
    double gap = g.minima[i].r - g.minima[i - 1].r;
    if (g.minima[i - 1].r >= 3.0) CHECK(gap == Catch::Approx(log_phi).margin(0.03));
  }
  // vertex identity for every recorded minimum
  for (auto& mrec : g.minima) {
    double lf = std::log(mrec.witness.first_norm);
    double want = (lf + mrec.witness.log_second) / 2.0;
    CHECK(mrec.h1_at_r == Catch::Approx(want).margin(1e-9));
  }
}

TEST_CASE("rational matrix graph: single minimum then slope -1", "[graph]") {
  MatrixA A(1, 1, {"0.5"});
  auto g = combined_graph(A, 5.0, 0.25, Backend::exact);
  REQUIRE(g.minima.size() == 1);
  CHECK(g.minima[0].r == Catch::Approx(0.5 * std::log(2.0)).margin(1e-9));
  // h_1 is eventually log 2 - q
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    if (g.grid[i] >= 1.5)
      CHECK(g.values[i][0] == Catch::Approx(std::log(2.0) - g.grid[i]).margin(1e-9));
  }
}

TEST_CASE("exact secant slopes stay within [-1/n, 1/m]", "[graph]") {
  Rng rng(3);
  for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 1}}) {
    std::vector<double> vals(static_cast<std::size_t>(m) * n);
    for (auto& v : vals) v = rng.next_entry();
    auto A = MatrixA::from_doubles(m, n, vals);
    auto g = combined_graph(A, 4.0, 0.25, Backend::exact);
    for (std::size_t i = 1; i < g.grid.size(); ++i)
      for (int j = 0; j < m + n; ++j) {
        double slope = (g.values[i][static_cast<std::size_t>(j)] - g.values[i - 1][static_cast<std::size_t>(j)]) / 0.25;
        CHECK(slope >= -1.0 / n - 1e-9);
        CHECK(slope <= 1.0 / m + 1e-9);
      }
  }
}

TEST_CASE("threaded graph evaluation is identical to sequential", "[graph]") {
  MatrixA A(1, 1, {kGoldenConjugate});
  auto a = combined_graph(A, 5.0, 0.25, Backend::exact);
  GraphOptions opts;
  opts.threads = 4;
  auto b = combined_graph(A, 5.0, 0.25, Backend::exact, opts);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
  REQUIRE(a.minima.size() == b.minima.size());
}
