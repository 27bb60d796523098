#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pgn/lattice.hpp"

using namespace pgn;

namespace {

// Independent oracle: direct box enumeration over q with a p-window around
// A q, greedy independent chain by K-norm. Only feasible for tiny log_Q.
std::vector<double> brute_minima(const MatrixA& A, double log_q) {
  int m = A.m(), n = A.n(), d = m + n;
  double Q = std::exp(log_q);
  double stretch = static_cast<double>(n) / m;
  struct Pt {
    std::vector<long long> q, p;
    double k;
  };
  for (double r = 1.0;; r *= 2) {
    long long B = static_cast<long long>(std::ceil(r * Q)) + 1;
    long long W = static_cast<long long>(std::ceil(r * std::pow(Q, -stretch))) + 1;
    std::vector<Pt> pts;
    std::vector<long long> q(static_cast<std::size_t>(n), -B);
    for (;;) {
      // p window centered at A q
      std::vector<double> aq(static_cast<std::size_t>(m), 0.0);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) aq[static_cast<std::size_t>(i)] += A.at(i, j) * static_cast<double>(q[static_cast<std::size_t>(j)]);
      std::vector<long long> p(static_cast<std::size_t>(m));
      std::vector<long long> plo(static_cast<std::size_t>(m)), phi(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        plo[static_cast<std::size_t>(i)] = static_cast<long long>(std::floor(aq[static_cast<std::size_t>(i)])) - W;
        phi[static_cast<std::size_t>(i)] = static_cast<long long>(std::ceil(aq[static_cast<std::size_t>(i)])) + W;
        p[static_cast<std::size_t>(i)] = plo[static_cast<std::size_t>(i)];
      }
      for (;;) {
        bool zero = true;
        for (auto v : q) zero = zero && v == 0;
        for (auto v : p) zero = zero && v == 0;
        if (!zero) {
          double nq = 0;
          for (auto v : q) nq = std::max(nq, std::fabs(static_cast<double>(v)));
          double nr = 0;
          for (int i = 0; i < m; ++i) nr = std::max(nr, std::fabs(aq[static_cast<std::size_t>(i)] - static_cast<double>(p[static_cast<std::size_t>(i)])));
          double k = std::max(nq / Q, nr * std::pow(Q, stretch));
          if (k <= r * (1 + 1e-12)) pts.push_back({q, p, k});
        }
        int ci = 0;
        while (ci < m && ++p[static_cast<std::size_t>(ci)] > phi[static_cast<std::size_t>(ci)]) {
          p[static_cast<std::size_t>(ci)] = plo[static_cast<std::size_t>(ci)];
          ++ci;
        }
        if (ci == m) break;
      }
      int cj = 0;
      while (cj < n && ++q[static_cast<std::size_t>(cj)] > B) {
        q[static_cast<std::size_t>(cj)] = -B;
        ++cj;
      }
      if (cj == n) break;
    }
    std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.k < b.k; });
    // greedy independent chain over the rationals
    std::vector<std::vector<mpq_class>> rows;
    std::vector<double> lambda;
    for (auto& pt : pts) {
      if (static_cast<int>(lambda.size()) == d) break;
      std::vector<mpq_class> w;
      for (auto v : pt.q) w.emplace_back(static_cast<long>(v));
      for (auto v : pt.p) w.emplace_back(static_cast<long>(v));
      for (auto& row : rows) {
        int piv = -1;
        for (int c = 0; c < d; ++c)
          if (row[static_cast<std::size_t>(c)] != 0) {
            piv = c;
            break;
          }
        if (w[static_cast<std::size_t>(piv)] == 0) continue;
        mpq_class f = w[static_cast<std::size_t>(piv)] / row[static_cast<std::size_t>(piv)];
        for (int c = 0; c < d; ++c) w[static_cast<std::size_t>(c)] -= f * row[static_cast<std::size_t>(c)];
      }
      bool nonzero = false;
      for (auto& v : w) nonzero = nonzero || v != 0;
      if (nonzero) {
        rows.push_back(w);
        lambda.push_back(std::log(pt.k));
      }
    }
    if (static_cast<int>(lambda.size()) == d && std::exp(lambda.back()) <= r) return lambda;
  }
}

const char* kGoldenConjugate = "0.61803398874989484820458683436563811772030917980576";

}  // namespace

TEST_CASE("unit box minima at Q=1", "[lattice]") {
  Rng rng(11);
  for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 2}}) {
    std::vector<double> vals(static_cast<std::size_t>(m) * n);
    for (auto& v : vals) v = rng.next_entry();
    auto A = MatrixA::from_doubles(m, n, vals);
    for (Backend b : {Backend::exact, Backend::reduced}) {
      auto sm = successive_minima(A, 0.0, b);
      REQUIRE(sm.log_lambda.size() == static_cast<std::size_t>(m + n));
      for (double lv : sm.log_lambda) CHECK(lv == 0.0);
      // witnesses recomputable and independent
      detail::RankTracker rank(m + n);
      for (auto& w : sm.witnesses) {
        detail::ZRow coord(w.q.begin(), w.q.end());
        coord.insert(coord.end(), w.p.begin(), w.p.end());
        CHECK(rank.try_add(coord));
      }
    }
  }
}

TEST_CASE("exact backend matches brute-force box enumeration", "[lattice][oracle]") {
  Rng rng(23);
  for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
    for (double log_q : {0.4, 0.9, 1.3}) {
      std::vector<double> vals(static_cast<std::size_t>(m) * n);
      for (auto& v : vals) v = rng.next_entry();
      auto A = MatrixA::from_doubles(m, n, vals);
      auto got = successive_minima_exact(A, log_q);
      auto want = brute_minima(A, log_q);
      REQUIRE(got.log_lambda.size() == want.size());
      for (std::size_t j = 0; j < want.size(); ++j)
        CHECK(got.log_lambda[j] == Catch::Approx(want[j]).margin(1e-9));
    }
  }
}

TEST_CASE("golden ratio conjugate: deepest minima stay near -(1/4) log 5", "[lattice]") {
  MatrixA A(1, 1, {kGoldenConjugate}, "golden");
  // vertex value of the k-th convergent trajectory; denominators F_k
  // |F_k a - F_{k-1}| = phi^{-k} exactly, so h_1(q*) -> -(1/4) log 5
  auto sm = successive_minima_exact(A, 6.0);
  CHECK(sm.log_lambda[0] > -0.45);
  CHECK(sm.log_lambda[0] < 0.0);
  // Minkowski: lambda_1 lambda_2 in [1/2, 1]
  double s = sm.log_lambda[0] + sm.log_lambda[1];
  CHECK(s <= 1e-9);
  CHECK(s >= -std::log(2.0) - 1e-9);
}

TEST_CASE("rational matrix gives an unbounded descent", "[lattice]") {
  MatrixA A(1, 1, {"0.5"});
  auto sm = successive_minima_exact(A, std::log(2.0));
  // (q, p) = (2, 1) lies on the line: K-norm = 2/Q = 1
  CHECK(sm.log_lambda[0] == Catch::Approx(0.0).margin(1e-12));
  auto sm2 = successive_minima_exact(A, 3.0);
  CHECK(sm2.log_lambda[0] == Catch::Approx(std::log(2.0) - 3.0).margin(1e-12));
  CHECK(sm2.witnesses[0].log_second == kNegInf);
}

TEST_CASE("minkowski product bound on random matrices", "[lattice]") {
  Rng rng(5);
  for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {1, 2}}) {
    std::vector<double> vals(static_cast<std::size_t>(m) * n);
    for (auto& v : vals) v = rng.next_entry();
    auto A = MatrixA::from_doubles(m, n, vals);
    int d = m + n;
    for (double log_q : {1.0, 3.0, 5.0}) {
      auto sm = successive_minima_exact(A, log_q);
      double s = 0;
      for (double lv : sm.log_lambda) s += lv;
      CHECK(s <= 1e-9);
      CHECK(s >= -std::log(std::tgamma(d + 1.0)) - 1e-9);
      // ordering
      for (std::size_t j = 1; j < sm.log_lambda.size(); ++j)
        CHECK(sm.log_lambda[j] >= sm.log_lambda[j - 1] - 1e-12);
    }
  }
}

TEST_CASE("reduced backend agrees within (m+n) log 2", "[lattice]") {
  MatrixA golden(1, 1, {kGoldenConjugate});
  for (double log_q = 0.5; log_q <= 10.0; log_q += 1.0) {
    auto ex = successive_minima_exact(golden, log_q);
    auto red = successive_minima_reduced(golden, log_q);
    for (std::size_t j = 0; j < ex.log_lambda.size(); ++j)
      CHECK(std::fabs(ex.log_lambda[j] - red.log_lambda[j]) <= 2 * M_LN2 + 1e-9);
  }
  Rng rng(17);
  std::vector<double> vals{rng.next_entry(), rng.next_entry()};
  auto A = MatrixA::from_doubles(2, 1, vals);
  for (double log_q = 1.0; log_q <= 8.0; log_q += 1.5) {
    auto ex = successive_minima_exact(A, log_q);
    auto red = successive_minima_reduced(A, log_q);
    for (std::size_t j = 1; j < red.log_lambda.size(); ++j)
      CHECK(red.log_lambda[j] >= red.log_lambda[j - 1] - 1e-12);
    for (std::size_t j = 0; j < ex.log_lambda.size(); ++j)
      CHECK(std::fabs(ex.log_lambda[j] - red.log_lambda[j]) <= 3 * M_LN2 + 1e-9);
    double s = 0;
    for (double lv : red.log_lambda) s += lv;
    CHECK(s <= 3 * (3 * M_LN2) + 1e-9);
    CHECK(s >= -std::log(6.0) - 3 * (3 * M_LN2) - 1e-9);
  }
}

TEST_CASE("reduced backend reaches large parameters", "[lattice]") {
  MatrixA golden(1, 1, {kGoldenConjugate});
  auto red = successive_minima_reduced(golden, 40.0);
  // golden ratio is badly approximable: h_1 stays within O(1) of 0
  CHECK(red.log_lambda[0] > -0.45 - 2 * M_LN2);
  CHECK(red.log_lambda[0] <= 0.0 + 2 * M_LN2);
}

TEST_CASE("budget guard trips on hopeless enumerations", "[lattice]") {
  MatrixA A(1, 1, {"0.5"});
  // the rational line forces lambda_2 ~ Q/2; a tiny budget must refuse
  LatticeOptions opts;
  opts.budget = 50;
  CHECK_THROWS_AS(successive_minima_exact(A, 8.0, opts), Error);
}
