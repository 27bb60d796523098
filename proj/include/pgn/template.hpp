#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pgn/approx_fn.hpp"
#include "pgn/errors.hpp"
#include "pgn/numeric.hpp"

namespace pgn {

// Piecewise linear template determined by excursion minima. The first
// component dips to (q_k, f1_k) with slope -1/n then 1/m and is zero between
// excursions; every other component is -f_1/(m+n-1). Excursions are derived
// from a lacunary integer sequence t_k and a depth parameter Delta:
//   q_k = (log t_k - log Phi(t_k)) * mn/(m+n)
//   f_1(q_k) = log t_k - q_k/n - log Delta
//   b_k = q_k + n f_1(q_k),   c_k = q_k - m f_1(q_k)
struct ClassCTemplate {
  int m = 0, n = 0;
  double log_delta = 0;
  std::vector<mpz_class> t_seq;  // empty when built directly from logs
  struct Excursion {
    double log_t = 0;
    double phi_log = 0;  // log Phi(t_k) used in the construction
    double q = 0;
    double f1 = 0;  // f_1(q_k) < 0
    double b = 0;
    double c = 0;
    bool touches_next = false;  // c_k == b_{k+1} exactly (boundary case)
  };
  std::vector<Excursion> exc;
  std::vector<double> lacunarity;  // log t_{k+1} / log t_k per joint
  std::optional<double> tau;       // analytic lower order of the generating Phi, when known

  double support_end() const { return exc.empty() ? 0.0 : exc.back().c; }
};

namespace detail {

inline void derive_excursions(ClassCTemplate& T) {
  int m = T.m, n = T.n;
  double h = static_cast<double>(m) * n / (m + n);
  for (std::size_t k = 0; k < T.exc.size(); ++k) {
    auto& e = T.exc[k];
    e.q = (e.log_t - e.phi_log) * h;
    e.f1 = e.log_t - e.q / n - T.log_delta;
    if (!(e.f1 < 0))
      fail(ErrorCode::non_negative_minimum,
           "excursion " + std::to_string(k + 1) + " has f1 = " + fmt12(e.f1) +
               " >= 0 (needs Phi below the critical power or Delta > 1)",
           static_cast<long long>(k + 1));
    e.b = e.q + n * e.f1;
    e.c = e.q - m * e.f1;
    if (!(e.b > 0))
      fail(ErrorCode::invalid_param, "excursion " + std::to_string(k + 1) + " starts before 0");
  }
  for (std::size_t k = 0; k + 1 < T.exc.size(); ++k) {
    double c = T.exc[k].c, b = T.exc[k + 1].b;
    double tol = 1e-12 * std::max({1.0, std::fabs(c), std::fabs(b)});
    if (c > b + tol)
      fail(ErrorCode::overlapping_excursions,
           "excursion " + std::to_string(k + 1) + " ends at " + fmt12(c) +
               " after the next begins at " + fmt12(b),
           static_cast<long long>(k + 1));
    T.exc[k].touches_next = c >= b - tol;
    T.lacunarity.push_back(T.exc[k + 1].log_t / T.exc[k].log_t);
  }
}

}  // namespace detail

inline ClassCTemplate build_template(const ApproxFn& phi, const std::vector<mpz_class>& t_seq,
                                     double log_delta, int m, int n) {
  if (m < 1 || n < 1) fail(ErrorCode::invalid_param, "need m, n >= 1");
  if (log_delta < 0) fail(ErrorCode::invalid_param, "need log Delta >= 0");
  if (t_seq.empty()) fail(ErrorCode::invalid_param, "empty excursion sequence");
  ClassCTemplate T;
  T.m = m;
  T.n = n;
  T.log_delta = log_delta;
  T.t_seq = t_seq;
  T.tau = phi.analytic_tau();
  mpz_class prev = 1;
  for (auto& t : t_seq) {
    if (t < 2 || t <= prev) fail(ErrorCode::invalid_param, "t sequence must be strictly increasing with t_k >= 2");
    ClassCTemplate::Excursion e;
    e.log_t = log_mpz(t);
    e.phi_log = phi.log_phi(t);
    T.exc.push_back(e);
    prev = t;
  }
  detail::derive_excursions(T);
  return T;
}

// Power-law variant driven directly by log t_k; lets demonstrations use
// sequences too steep to materialize as integers.
inline ClassCTemplate build_power_template(int m, int n, double tau,
                                           const std::vector<double>& log_t_seq,
                                           double log_delta) {
  if (m < 1 || n < 1) fail(ErrorCode::invalid_param, "need m, n >= 1");
  if (!(tau > 0)) fail(ErrorCode::invalid_param, "need tau > 0");
  if (log_t_seq.empty()) fail(ErrorCode::invalid_param, "empty excursion sequence");
  ClassCTemplate T;
  T.m = m;
  T.n = n;
  T.log_delta = log_delta;
  T.tau = tau;
  double prev = 0;
  for (double lt : log_t_seq) {
    if (!(lt > prev) || !(lt >= std::log(2.0) - 1e-12))
      fail(ErrorCode::invalid_param, "log t sequence must be strictly increasing with t_k >= 2");
    ClassCTemplate::Excursion e;
    e.log_t = lt;
    e.phi_log = -tau * lt;
    T.exc.push_back(e);
    prev = lt;
  }
  detail::derive_excursions(T);
  return T;
}

// Component values (f_1, ..., f_{m+n}) at abscissa q >= 0.
inline std::vector<double> eval_template(const ClassCTemplate& T, double q) {
  if (q < 0) fail(ErrorCode::invalid_param, "need q >= 0");
  double f1 = 0;
  // find the excursion whose [b, c] contains q
  auto it = std::upper_bound(T.exc.begin(), T.exc.end(), q,
                             [](double v, const ClassCTemplate::Excursion& e) { return v < e.b; });
  if (it != T.exc.begin()) {
    const auto& e = *(it - 1);
    if (q <= e.c) f1 = q <= e.q ? -(q - e.b) / T.n : (q - e.c) / T.m;
  }
  std::vector<double> out(static_cast<std::size_t>(T.m + T.n), -f1 / (T.m + T.n - 1));
  out[0] = f1;
  return out;
}

struct TemplateCheck {
  std::string what;
  bool ok = true;
};

struct TemplateReport {
  bool pass = true;
  std::vector<TemplateCheck> checks;

  void add(std::string what, bool ok) {
    pass = pass && ok;
    checks.push_back({std::move(what), ok});
  }
};

// Structural validation: ordering, strict separation, slope sets, the
// reconstruction identity q_k = (b_k m + c_k n)/(m+n), and sum-zero at
// random abscissas. Report-only.
inline TemplateReport validate_template(const ClassCTemplate& T, int random_checks = 1000,
                                        std::uint64_t seed = 1) {
  TemplateReport rep;
  rep.add("nonempty (the all-zero template is excluded)", !T.exc.empty());
  if (T.exc.empty()) return rep;
  int m = T.m, n = T.n;
  for (std::size_t k = 0; k < T.exc.size(); ++k) {
    const auto& e = T.exc[k];
    std::string tag = "excursion " + std::to_string(k + 1);
    rep.add(tag + ": b < q < c", e.b < e.q && e.q < e.c);
    rep.add(tag + ": f1 < 0", e.f1 < 0);
    double recon = (e.b * m + e.c * n) / (m + n);
    rep.add(tag + ": q = (b m + c n)/(m+n)", std::fabs(recon - e.q) <= 1e-9 * std::max(1.0, std::fabs(e.q)));
    // slopes recovered from the breakpoint representation
    double down = (e.f1 - 0.0) / (e.q - e.b);
    double up = (0.0 - e.f1) / (e.c - e.q);
    rep.add(tag + ": descent slope -1/n", std::fabs(down + 1.0 / n) <= 1e-9);
    rep.add(tag + ": ascent slope 1/m", std::fabs(up - 1.0 / m) <= 1e-9);
    if (k + 1 < T.exc.size())
      rep.add(tag + ": strict separation c_k < b_{k+1}",
              e.c < T.exc[k + 1].b && !e.touches_next);
  }
  Rng rng(seed);
  double hi = T.support_end() * 1.1 + 1.0;
  double worst = 0;
  for (int i = 0; i < random_checks; ++i) {
    double q = rng.next_unit() * hi;
    auto f = eval_template(T, q);
    double s = 0;
    for (double v : f) s += v;
    worst = std::max(worst, std::fabs(s));
  }
  rep.add("sum of components vanishes (worst |sum| = " + fmt12(worst) + ")", worst <= 1e-12 * std::max(1.0, hi));
  return rep;
}

}  // namespace pgn
