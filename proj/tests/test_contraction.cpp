#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pgn/contraction.hpp"

using namespace pgn;

namespace {
std::vector<mpz_class> doubly_exponential(int k_max) {
  std::vector<mpz_class> t;
  for (int k = 1; k <= k_max; ++k) t.push_back(mpz_class(1) << (1 << k));
  return t;
}
}  // namespace

TEST_CASE("local rate case split", "[contraction]") {
  auto T = build_template(ApproxFn::power(2.0), doubly_exponential(5), 0.0, 1, 1);
  const auto& e = T.exc[0];
  CHECK(local_rate(T, 0.5 * (e.b + e.q)) == 0);  // mn - m on the descending leg
  CHECK(local_rate(T, 0.5 * (e.q + e.c)) == 1);  // mn on the ascent
  CHECK(local_rate(T, 0.5 * e.b) == 1);          // mn on the flat start

  std::vector<double> logs{10.0, 400.0, 20000.0};
  auto T23 = build_power_template(2, 3, 4.0, logs, 0.0);
  const auto& e23 = T23.exc[1];
  CHECK(local_rate(T23, 0.5 * (e23.b + e23.q)) == 4);  // mn - m = 6 - 2
  CHECK(local_rate(T23, 0.5 * (e23.q + e23.c)) == 6);
}

TEST_CASE("average rate closed forms on the first excursion", "[contraction]") {
  auto T = build_template(ApproxFn::power(2.0), doubly_exponential(5), 0.0, 1, 1);
  auto P = contraction_profile(T);
  const auto& e = T.exc[0];
  // up to b_1 the rate is identically mn
  CHECK(average_rate(P, e.b) == Catch::Approx(1.0).margin(1e-12));
  // at q_1: (1 * b_1 + 0 * (q_1 - b_1)) / q_1 = u_1 = 2/3
  CHECK(average_rate(P, e.q) == Catch::Approx(2.0 / 3.0).margin(1e-12));
  // at c_1: b_1 + (c_1 - q_1) over c_1 = 1.5 L / 2 L = 0.75
  CHECK(average_rate(P, e.c) == Catch::Approx(0.75).margin(1e-12));
  CHECK_THROWS_AS(average_rate(P, T.support_end() + 1.0), Error);
}

TEST_CASE("integral representation matches quadrature of the local rate", "[contraction][oracle]") {
  std::vector<double> logs{8.0, 300.0, 15000.0, 1.2e6};
  auto T = build_power_template(2, 1, 3.0, logs, 0.4);
  auto P = contraction_profile(T);
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    double a = rng.next_unit() * T.support_end();
    double b = rng.next_unit() * T.support_end();
    if (a > b) std::swap(a, b);
    if (b - a < 1e-6) continue;
    // midpoint quadrature of the piecewise constant rate, aligned to breakpoints
    double integral = 0;
    std::vector<double> cuts{a, b};
    for (double bp : P.breakpoints)
      if (bp > a && bp < b) cuts.push_back(bp);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      integral += local_rate(T, 0.5 * (cuts[i] + cuts[i + 1])) * (cuts[i + 1] - cuts[i]);
    double via_profile = average_rate(P, b) * b - (a > 0 ? average_rate(P, a) * a : 0.0);
    CHECK(via_profile == Catch::Approx(integral).margin(1e-9 * std::max(1.0, b)));
  }
}

TEST_CASE("u_k sequence closed forms", "[contraction]") {
  auto T = build_template(ApproxFn::power(2.0), doubly_exponential(10), 0.0, 1, 1);
  auto uk = u_k_sequence(T);
  REQUIRE(uk.u.size() == 10);
  for (double u : uk.u) CHECK(u == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(uk.closed_form.value() == Catch::Approx(2.0 / 3.0).margin(1e-15));

  // (m, n, tau) = (2, 1, 3): limit 3/8
  auto T21 = build_power_template(2, 1, 3.0, {8.0, 300.0, 15000.0}, 0.0);
  auto uk21 = u_k_sequence(T21);
  CHECK(uk21.closed_form.value() == Catch::Approx(3.0 / 8.0).margin(1e-15));
  for (double u : uk21.u) CHECK(u == Catch::Approx(3.0 / 8.0).margin(1e-12));

  // tau -> infinity drives u to 0
  auto inf = u_k_sequence(T, kPosInf);
  CHECK(inf.closed_form.value() == 0.0);
}

TEST_CASE("averages stay within [mn - m, mn]", "[contraction]") {
  std::vector<double> logs{8.0, 300.0, 15000.0, 1.2e6};
  auto T = build_power_template(1, 2, 4.0, logs, 0.2);
  auto P = contraction_profile(T);
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    double Q = 1e-6 + rng.next_unit() * (T.support_end() - 1e-6);
    double a = average_rate(P, Q);
    CHECK(a >= T.m * T.n - T.m - 1e-12);
    CHECK(a <= T.m * T.n + 1e-12);
  }
}

TEST_CASE("limit estimates approach the closed forms under steep lacunarity", "[contraction]") {
  // growth ratios 30, 40, 50, 60: the flat blocks dominate
  std::vector<double> logs{5.0};
  for (double r : {30.0, 40.0, 50.0, 60.0}) logs.push_back(logs.back() * r);
  auto T = build_power_template(1, 1, 2.0, logs, 0.0);
  auto est = limit_estimates(T);
  CHECK(est.closed_form_liminf == Catch::Approx(2.0 / 3.0).margin(1e-15));
  CHECK(est.closed_form_limsup == 1.0);
  CHECK(est.final_liminf_gap < 0.02);
  CHECK(est.final_limsup_gap < 0.02);
  // the q_k averages are local minima, the b_k averages local maxima
  for (std::size_t k = 0; k < T.exc.size(); ++k)
    CHECK(est.liminf_seq[k] < est.limsup_seq[k]);

  CHECK_THROWS_AS(limit_estimates(build_power_template(1, 1, 2.0, {5.0, 150.0}, 0.0)), Error);
}

TEST_CASE("slope partitions behind the rate values", "[contraction]") {
  for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 1}, {2, 3}, {3, 2}}) {
    auto flat = slope_partition(m, n, IntervalKind::flat);
    CHECK(flat.cardinality == m * n);
    auto desc = slope_partition(m, n, IntervalKind::descent);
    CHECK(desc.cardinality == m * n - m);
    auto asc = slope_partition(m, n, IntervalKind::ascent);
    CHECK(asc.cardinality == m * n);
    // S+ and S- partition {1, ..., m+n}
    std::vector<int> all = desc.s_plus;
    all.insert(all.end(), desc.s_minus.begin(), desc.s_minus.end());
    std::sort(all.begin(), all.end());
    CHECK(static_cast<int>(all.size()) == m + n);
    for (int i = 0; i < m + n; ++i) CHECK(all[static_cast<std::size_t>(i)] == i + 1);
  }
}
