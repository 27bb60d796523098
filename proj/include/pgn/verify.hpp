#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pgn/approx_fn.hpp"
#include "pgn/contraction.hpp"
#include "pgn/graph.hpp"
#include "pgn/template.hpp"

namespace pgn {

// Constant chain tying the sup-distance T between a graph and a template to
// the matching box for their minima:
//   C1 = T + 2T max(m,n)/(m+n),  C2 = 4mnT/(m+n),  C = max(C1, max(C2, T)).
struct DlConstants {
  double c1 = 0, c2 = 0, c3 = 0, c = 0;
};

inline DlConstants dl_constants(double T, int m, int n) {
  DlConstants k;
  k.c1 = T + 2.0 * T * std::max(m, n) / (m + n);
  k.c2 = 4.0 * m * n * T / (m + n);
  k.c3 = std::max(k.c2, T);
  k.c = std::max(k.c1, k.c3);
  return k;
}

struct ProximityReport {
  double t_measured = 0;
  DlConstants constants;
  struct MinimumMatch {
    int k = 0;           // 1-based excursion index
    double q_k = 0, f1_k = 0;
    int candidates_in_box = 0;
    bool matched = false;  // exactly one graph minimum in the C-box
    double r = 0, h1_at_r = 0;
    double box_distance = 0;
  };
  std::vector<MinimumMatch> per_minimum;
  struct Stray {
    double r = 0, h1 = 0;
    bool above_floor = true;  // h1 >= -C
  };
  std::vector<Stray> strays;
  bool dl_consistent = false;
};

// Matches each template minimum against the graph's refined h_1 minima
// inside the box implied by the measured sup-distance.
inline ProximityReport proximity(const CombinedGraph& g, const ClassCTemplate& T) {
  if (g.m != T.m || g.n != T.n) fail(ErrorCode::grid_mismatch, "dimension mismatch");
  if (g.grid.empty() || g.grid.back() < T.support_end() - 1e-9)
    fail(ErrorCode::grid_mismatch, "graph grid does not cover the template support");
  ProximityReport rep;
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    auto f = eval_template(T, g.grid[i]);
    for (std::size_t j = 0; j < f.size(); ++j)
      rep.t_measured = std::max(rep.t_measured, std::fabs(f[j] - g.values[i][j]));
  }
  rep.constants = dl_constants(rep.t_measured, T.m, T.n);
  double C = rep.constants.c;

  std::vector<bool> used(g.minima.size(), false);
  bool all_matched = true;
  for (std::size_t k = 0; k < T.exc.size(); ++k) {
    ProximityReport::MinimumMatch mm;
    mm.k = static_cast<int>(k) + 1;
    mm.q_k = T.exc[k].q;
    mm.f1_k = T.exc[k].f1;
    int found = -1;
    for (std::size_t i = 0; i < g.minima.size(); ++i) {
      double dr = std::fabs(g.minima[i].r - mm.q_k);
      double dh = std::fabs(g.minima[i].h1_at_r - mm.f1_k);
      if (dr <= C && dh <= C) {
        ++mm.candidates_in_box;
        found = static_cast<int>(i);
      }
    }
    if (mm.candidates_in_box == 1) {
      mm.matched = true;
      used[static_cast<std::size_t>(found)] = true;
      mm.r = g.minima[static_cast<std::size_t>(found)].r;
      mm.h1_at_r = g.minima[static_cast<std::size_t>(found)].h1_at_r;
      mm.box_distance = std::max(std::fabs(mm.r - mm.q_k), std::fabs(mm.h1_at_r - mm.f1_k));
    } else {
      all_matched = false;
    }
    rep.per_minimum.push_back(mm);
  }
  bool strays_ok = true;
  for (std::size_t i = 0; i < g.minima.size(); ++i) {
    if (used[i]) continue;
    ProximityReport::Stray s;
    s.r = g.minima[i].r;
    s.h1 = g.minima[i].h1_at_r;
    s.above_floor = s.h1 >= -C - 1e-12;
    strays_ok = strays_ok && s.above_floor;
    rep.strays.push_back(s);
  }
  rep.dl_consistent = all_matched && strays_ok;
  return rep;
}

// Samples a template in the shape of a combined graph (overlay/self-test aid).
inline CombinedGraph template_as_graph(const ClassCTemplate& T, double q_max, double step) {
  CombinedGraph g;
  g.m = T.m;
  g.n = T.n;
  g.backend = Backend::exact;
  int count = static_cast<int>(std::floor(q_max / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    double q = i * step;
    g.grid.push_back(q);
    auto f = eval_template(T, q);
    std::sort(f.begin(), f.end());
    g.values.push_back(f);
  }
  for (auto& e : T.exc) {
    CombinedGraph::Minimum mrec;
    mrec.r = e.q;
    mrec.h1_at_r = e.f1;
    g.minima.push_back(mrec);
  }
  g.slope_tol = 0;
  return g;
}

// One-dimensional continued-fraction witness: a real alpha in (0, 1) whose
// convergents realize |q alpha - p| within a bounded factor of Phi(q) at the
// hinted denominators (partial quotient 1/(q Phi(q)) there, 1 elsewhere).
struct CfWitness {
  MatrixA A;  // 1x1
  struct Surgical {
    mpz_class q, p;
    mpz_class quotient;  // the partial quotient applied after this convergent
  };
  std::vector<Surgical> surgical;
  std::vector<std::pair<mpz_class, mpz_class>> convergents;  // (p_k, q_k)
};

inline CfWitness cf_witness(const ApproxFn& phi, const std::vector<mpz_class>& t_hints, double q_max) {
  for (std::size_t i = 0; i + 1 < t_hints.size(); ++i)
    if (t_hints[i] >= t_hints[i + 1]) fail(ErrorCode::invalid_param, "hints must increase");
  if (!t_hints.empty() && t_hints.front() < 1) fail(ErrorCode::invalid_param, "hints must be positive");

  mpz_class p_prev = 1, p_cur = 0;  // p_{-1}, p_0 for alpha = [0; a_1, a_2, ...]
  mpz_class q_prev = 0, q_cur = 1;
  std::vector<std::pair<mpz_class, mpz_class>> conv;
  CfWitness out{MatrixA(), {}, {}};

  // denominators must exceed the graph reach with margin so the tail is benign
  mpf_class reach = exp_mpf(q_max + 6.0, 256);
  mpz_class q_stop = round_to_mpz(reach);

  std::size_t hint_i = 0;
  int guard = 0;
  while (q_cur < q_stop) {
    if (++guard > 100000) fail(ErrorCode::hint_infeasible, "convergent recurrence did not reach the target range");
    mpz_class a = 1;
    if (hint_i < t_hints.size() && q_cur >= t_hints[hint_i]) {
      // surgical quotient: a = floor(1 / (q Phi(q)))
      double want = -phi.log_phi(q_cur) - log_mpz(q_cur);
      if (want > 0.95 * 1024 * M_LN2) fail(ErrorCode::hint_infeasible, "surgical quotient out of range");
      if (want > 0) {
        mpf_class v = exp_mpf(want, static_cast<mp_bitcnt_t>(128 + want * 1.5));
        mpz_class fl;
        mpz_set_f(fl.get_mpz_t(), v.get_mpf_t());  // truncates toward zero
        a = fl < 1 ? 1 : fl;
      }
      out.surgical.push_back({q_cur, p_cur, a});
      ++hint_i;
    }
    mpz_class p_next = a * p_cur + p_prev;
    mpz_class q_next = a * q_cur + q_prev;
    p_prev = p_cur;
    p_cur = p_next;
    q_prev = q_cur;
    q_cur = q_next;
    conv.push_back({p_cur, q_cur});
  }
  if (hint_i < t_hints.size())
    fail(ErrorCode::hint_infeasible, "hints beyond the reachable denominator range");

  // alpha = p_K / q_K to enough decimals that truncation is far below every residual
  std::size_t digits = mpz_sizeinbase(q_cur.get_mpz_t(), 10) * 2 + 20;
  mp_bitcnt_t prec = static_cast<mp_bitcnt_t>(static_cast<double>(digits) * 3.33) + 64;
  mpf_class alpha(0, prec);
  alpha = mpf_class(p_cur, prec) / mpf_class(q_cur, prec);
  mp_exp_t expo = 0;
  std::string mant = alpha.get_str(expo, 10, digits);
  std::string text = "0.";
  for (mp_exp_t i = expo; i < 0; ++i) text += '0';
  text += mant;
  out.A = MatrixA(1, 1, {text}, "cf-witness");
  out.convergents = std::move(conv);
  return out;
}

// Certificate splitting the best approximations reached below Q_max into
// "hits" (strictly better than Phi) and the rest, with the measured floor
// constant of the non-hit set. Denominator 1 is skipped: every real is
// within 1/2 of an integer, so it carries no information.
struct BadCertificate {
  double q_max = 0;
  struct Hit {
    std::vector<mpz_class> q, p;
    double log_norm_q = 0;
    double log_residual = 0;  // -inf flags a rational degeneracy
    double log_phi_at_q = 0;
    double lower_ratio = 0;  // log residual - log Phi
    bool chi_ok = true;      // t > chi(t) when a table was supplied
  };
  std::vector<Hit> hits;
  struct Other {
    double log_norm_q = 0;
    double log_residual = 0;
    double floor_value = 0;  // log residual + (n/m) log norm
  };
  std::vector<Other> others;
  double floor_constant = 0;  // min over the non-hit set
  bool rational_degenerate = false;
  bool approximable_witnessed = false;  // some hit exists
  bool floor_finite = true;
};

inline BadCertificate bad_certificate(const MatrixA& A, const ApproxFn& phi, double q_max,
                                      const std::vector<std::pair<long long, long long>>& chi = {},
                                      double step = 0.1, const LatticeOptions& opts = {}) {
  BadCertificate cert;
  cert.q_max = q_max;
  double stretch = static_cast<double>(A.n()) / A.m();

  // walk the graph and collect the distinct lambda_1 witnesses
  std::vector<LatticeVector> best;
  auto seen = [&](const LatticeVector& w) {
    for (auto& b : best)
      if (b.q == w.q && b.p == w.p) return true;
    return false;
  };
  for (double q = 0; q <= q_max + 1e-9; q += step) {
    auto sm = successive_minima_exact(A, q / A.n(), opts);
    auto w = sm.witnesses[0];
    // canonical sign: leading nonzero coordinate of q positive
    mpz_class lead = 0;
    for (auto& x : w.q)
      if (x != 0) {
        lead = x;
        break;
      }
    if (lead < 0) {
      for (auto& x : w.q) x = -x;
      for (auto& x : w.p) x = -x;
    }
    if (detail::inf_norm(w.q) >= 2 && !seen(w)) best.push_back(w);
  }
  std::sort(best.begin(), best.end(),
            [](const LatticeVector& a, const LatticeVector& b) { return a.first_norm < b.first_norm; });

  cert.floor_constant = kPosInf;
  for (auto& w : best) {
    mpz_class norm_q = 0;
    for (auto& x : w.q) {
      mpz_class a = abs(x);
      if (a > norm_q) norm_q = a;
    }
    double lphi = phi.log_phi(norm_q);
    double lq = log_mpz(norm_q);
    if (w.log_second < lphi) {  // strict; equality counts as non-hit
      BadCertificate::Hit h;
      h.q = w.q;
      h.p = w.p;
      h.log_norm_q = lq;
      h.log_residual = w.log_second;
      h.log_phi_at_q = lphi;
      h.lower_ratio = w.log_second - lphi;
      if (w.log_second == kNegInf) cert.rational_degenerate = true;
      if (!chi.empty() && norm_q.fits_slong_p()) {
        long long t = norm_q.get_si();
        h.chi_ok = t > detail::chi_of(chi, t);
      }
      cert.hits.push_back(std::move(h));
    } else {
      BadCertificate::Other o;
      o.log_norm_q = lq;
      o.log_residual = w.log_second;
      o.floor_value = w.log_second + stretch * lq;
      cert.floor_constant = std::min(cert.floor_constant, o.floor_value);
      cert.others.push_back(std::move(o));
    }
  }
  cert.approximable_witnessed = !cert.hits.empty();
  cert.floor_finite = std::isfinite(cert.floor_constant);
  return cert;
}

// Partial sums of Phi(N)^m N^{max(1+m, n)} (log N)^{[n == m+1]} and a slope
// verdict on the tail.
struct BorelCantelli {
  std::vector<std::pair<long long, double>> partial_sums;  // checkpoints (N, S_N)
  double theta = 0;         // max(n+1, m+2)/m
  int log_factor = 0;       // 1 iff n == m+1
  double tail_slope = 0;    // d log a_N / d log N on the top quarter
  enum class Verdict { converging, diverging, inconclusive } verdict = Verdict::inconclusive;
};

inline BorelCantelli borel_cantelli_sum(const ApproxFn& phi, int m, int n, long long n_max) {
  if (n < 2) fail(ErrorCode::invalid_param, "column extension needs n >= 2");
  if (n_max < 10) fail(ErrorCode::invalid_param, "need N_max >= 10");
  BorelCantelli bc;
  bc.theta = static_cast<double>(std::max(n + 1, m + 2)) / m;
  bc.log_factor = (n == m + 1) ? 1 : 0;
  double power = std::max(1 + m, n);
  double sum = 0;
  long long checkpoint = 10;
  double slope_num = 0, slope_den = 0, mean_x = 0, mean_y = 0;
  std::vector<std::pair<double, double>> pts;
  for (long long N = 2; N <= n_max; ++N) {
    double la = m * phi.log_phi(N) + power * std::log(static_cast<double>(N)) +
                bc.log_factor * std::log(std::log(static_cast<double>(N)));
    sum += std::exp(la);
    if (N == checkpoint || N == n_max) {
      bc.partial_sums.push_back({N, sum});
      checkpoint *= 2;
    }
    if (N >= n_max / 4) pts.push_back({std::log(static_cast<double>(N)), la});
  }
  for (auto& [x, y] : pts) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= pts.size();
  mean_y /= pts.size();
  for (auto& [x, y] : pts) {
    slope_num += (x - mean_x) * (y - mean_y);
    slope_den += (x - mean_x) * (x - mean_x);
  }
  bc.tail_slope = slope_den > 0 ? slope_num / slope_den : 0;
  if (bc.tail_slope < -1.05)
    bc.verdict = BorelCantelli::Verdict::converging;
  else if (bc.tail_slope > -0.95)
    bc.verdict = BorelCantelli::Verdict::diverging;
  return bc;
}

// Repeating a scalar approximation across m rows preserves the max-norm
// residual; checked on random (a, q) pairs.
struct DiagonalEmbedReport {
  std::vector<double> column;  // (a, a, ..., a)
  double worst_gap = 0;
  long long checks = 0;
};

inline DiagonalEmbedReport diagonal_embed(double a, int m, long long q_count = 1000,
                                          long long q_cap = 10000, std::uint64_t seed = 2) {
  if (m < 1) fail(ErrorCode::invalid_param, "need m >= 1");
  DiagonalEmbedReport rep;
  rep.column.assign(static_cast<std::size_t>(m), a);
  Rng rng(seed);
  for (long long i = 0; i < q_count; ++i) {
    long long q = 1 + static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(q_cap)));
    double qa = q * a;
    // brute force over the corner candidates of the p-box
    double best = kPosInf;
    double fl = std::floor(qa), ce = std::ceil(qa);
    for (int mask = 0; mask < (1 << m); ++mask) {
      double worst_coord = 0;
      for (int j = 0; j < m; ++j) {
        double pj = (mask >> j) & 1 ? ce : fl;
        worst_coord = std::max(worst_coord, std::fabs(qa - pj));
      }
      best = std::min(best, worst_coord);
    }
    double scalar = std::min(qa - fl, ce - qa);
    rep.worst_gap = std::max(rep.worst_gap, std::fabs(best - scalar));
    ++rep.checks;
  }
  return rep;
}

}  // namespace pgn
