#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "pgn/errors.hpp"
#include "pgn/lll.hpp"
#include "pgn/matrix.hpp"
#include "pgn/numeric.hpp"

namespace pgn {

enum class Backend { exact, reduced };

inline const char* backend_name(Backend b) { return b == Backend::exact ? "exact" : "reduced"; }

// Successive minima of the parametric box [-Q,Q]^n x [-Q^{-n/m}, Q^{-n/m}]^m
// against the lattice {(q, Aq - p)}, reported in log space.
struct SuccessiveMinima {
  double log_Q = 0;
  std::vector<double> log_lambda;        // nondecreasing, size m+n
  std::vector<LatticeVector> witnesses;  // linearly independent, same order
  Backend backend = Backend::exact;
};

struct LatticeOptions {
  long long budget = 100'000'000;  // enumeration node budget
};

namespace detail {

inline mp_bitcnt_t working_prec(double log_q, int m, int n, double max_abs) {
  double stretch = std::max(1.0, static_cast<double>(n) / m);
  double bits = 160.0 + 1.4427 * std::max(0.0, log_q) * (1.0 + stretch) + std::log2(max_abs + 2.0);
  if (bits > 1 << 20) fail(ErrorCode::precision_loss, "log_Q out of supported range");
  return static_cast<mp_bitcnt_t>(bits);
}

struct ScaledLattice {
  int m = 0, n = 0, d = 0;
  double log_Q = 0;
  mp_bitcnt_t prec = 0;
  long shift = 0;          // integer grid is 2^shift per K-norm unit
  ZMat rows;               // d x d reduced integer rows
  ZMat coords;             // d rows of (q | p) integer coordinates
  std::vector<mpf_class> a_rows;  // parsed matrix entries
};

// Builds the scaled generator rows, runs LLL and carries the (q | p)
// coordinates of the reduced vectors along.
inline ScaledLattice build_scaled(const MatrixA& A, double log_q, std::optional<mp_bitcnt_t> prec_override = {}) {
  ScaledLattice L;
  L.m = A.m();
  L.n = A.n();
  L.d = L.m + L.n;
  L.log_Q = log_q;
  L.prec = prec_override ? *prec_override : working_prec(log_q, L.m, L.n, A.max_abs_entry());
  double stretch = static_cast<double>(L.n) / L.m;
  L.shift = 128 + static_cast<long>(std::ceil(1.4427 * std::max(0.0, log_q) * std::max(1.0, stretch)));
  L.a_rows = A.parsed(L.prec);

  mpf_class s_first = exp_mpf(L.shift * M_LN2 - log_q, L.prec);            // 2^shift / Q
  mpf_class s_second = exp_mpf(L.shift * M_LN2 + stretch * log_q, L.prec); // 2^shift * Q^{n/m}

  ZMat gen(L.d, ZRow(L.d, mpz_class(0)));
  ZMat coords(L.d, ZRow(L.d, mpz_class(0)));
  for (int j = 0; j < L.n; ++j) {
    gen[j][j] = round_to_mpz(s_first);
    for (int i = 0; i < L.m; ++i) {
      mpf_class v = L.a_rows[static_cast<std::size_t>(i) * L.n + j] * s_second;
      gen[j][L.n + i] = round_to_mpz(v);
    }
    coords[j][j] = 1;  // q = e_j, p = 0
  }
  for (int i = 0; i < L.m; ++i) {
    mpf_class v = -s_second;
    gen[L.n + i][L.n + i] = round_to_mpz(v);
    coords[L.n + i][L.n + i] = 1;  // q = 0, p = e_i
  }

  auto out = lll_reduce(std::move(gen));
  L.rows = std::move(out.basis);
  // coords of reduced rows: transform * generator coords
  L.coords.assign(L.d, ZRow(L.d, mpz_class(0)));
  for (int i = 0; i < L.d; ++i)
    for (int k = 0; k < L.d; ++k)
      if (out.transform[i][k] != 0)
        for (int c = 0; c < L.d; ++c) L.coords[i][c] += out.transform[i][k] * coords[k][c];
  return L;
}

inline std::vector<mpz_class> coord_q(const ScaledLattice& L, const ZRow& coord) {
  return {coord.begin(), coord.begin() + L.n};
}
inline std::vector<mpz_class> coord_p(const ScaledLattice& L, const ZRow& coord) {
  return {coord.begin() + L.n, coord.end()};
}

// log K-norm of the point with integer coordinates (q | p).
inline double log_knorm(const ScaledLattice& L, const ZRow& coord, double* log_first = nullptr,
                        double* log_second = nullptr) {
  mpz_class mq = 0;
  for (int j = 0; j < L.n; ++j) {
    mpz_class a = abs(coord[j]);
    if (a > mq) mq = a;
  }
  double lf = mq == 0 ? kNegInf : log_mpz(mq);
  double ls = log_residual_norm(L.a_rows, L.m, L.n, coord_q(L, coord), coord_p(L, coord), L.prec);
  if (log_first) *log_first = lf;
  if (log_second) *log_second = ls;
  double stretch = static_cast<double>(L.n) / L.m;
  return std::max(lf - L.log_Q, ls + stretch * L.log_Q);
}

// Exact-rational rank tracker for the greedy independence chain.
class RankTracker {
 public:
  explicit RankTracker(int dim) : dim_(dim) {}

  bool try_add(const ZRow& v) {
    std::vector<mpq_class> w(v.begin(), v.end());
    for (auto& [col, row] : pivots_) {
      if (w[static_cast<std::size_t>(col)] == 0) continue;
      mpq_class f = w[static_cast<std::size_t>(col)] / row[static_cast<std::size_t>(col)];
      for (int c = 0; c < dim_; ++c) w[static_cast<std::size_t>(c)] -= f * row[static_cast<std::size_t>(c)];
    }
    int piv = -1;
    for (int c = 0; c < dim_; ++c)
      if (w[static_cast<std::size_t>(c)] != 0) {
        piv = c;
        break;
      }
    if (piv < 0) return false;
    pivots_.emplace_back(piv, std::move(w));
    return true;
  }

  int rank() const { return static_cast<int>(pivots_.size()); }

 private:
  int dim_;
  std::vector<std::pair<int, std::vector<mpq_class>>> pivots_;
};

struct PoolEntry {
  ZRow coord;       // (q | p)
  double log_k = 0;
  double log_first = 0;
  double log_second = 0;
};

inline bool pool_less(const PoolEntry& a, const PoolEntry& b) {
  if (a.log_k != b.log_k) return a.log_k < b.log_k;
  if (a.log_first != b.log_first) return a.log_first < b.log_first;
  return a.coord < b.coord;
}

// Floating Gram-Schmidt of the reduced rows, normalized by a common power of
// two so long double stays in range.
struct FloatGso {
  int d = 0;
  long e0 = 0;
  std::vector<std::vector<long double>> b;    // normalized rows
  std::vector<std::vector<long double>> mu;   // mu[i][j], j < i
  std::vector<long double> bstar_sq;          // squared GSO norms
};

inline FloatGso float_gso(const ScaledLattice& L) {
  FloatGso g;
  g.d = L.d;
  long emax = 0;
  for (auto& row : L.rows)
    for (auto& x : row)
      if (x != 0) emax = std::max(emax, static_cast<long>(mpz_sizeinbase(x.get_mpz_t(), 2)));
  g.e0 = emax;
  g.b.assign(L.d, std::vector<long double>(L.d, 0));
  for (int i = 0; i < L.d; ++i)
    for (int j = 0; j < L.d; ++j) {
      long e = 0;
      double m = mpz_get_d_2exp(&e, L.rows[i][j].get_mpz_t());
      g.b[i][j] = static_cast<long double>(m) * powl(2.0L, static_cast<long double>(e - g.e0));
    }
  g.mu.assign(L.d, std::vector<long double>(L.d, 0));
  g.bstar_sq.assign(L.d, 0);
  std::vector<std::vector<long double>> bstar = g.b;
  for (int i = 0; i < L.d; ++i) {
    for (int j = 0; j < i; ++j) {
      long double num = 0;
      for (int c = 0; c < L.d; ++c) num += g.b[i][c] * bstar[j][c];
      g.mu[i][j] = num / g.bstar_sq[j];
      for (int c = 0; c < L.d; ++c) bstar[i][c] -= g.mu[i][j] * bstar[j][c];
    }
    long double s = 0;
    for (int c = 0; c < L.d; ++c) s += bstar[i][c] * bstar[i][c];
    g.bstar_sq[i] = s;
    if (!(s > 0)) fail(ErrorCode::precision_loss, "degenerate float GSO");
  }
  return g;
}

// All lattice points with K-norm <= exp(log_r), as coefficient vectors over
// the reduced rows. Complete up to the floating safety margin; every reported
// point is verified against the exact K-norm. The innermost coefficient is
// resolved by minimizing the (convex) K-norm along the line rather than by
// scanning, which keeps degenerate lattices from exploding.
class Enumerator {
 public:
  Enumerator(const ScaledLattice& L, const FloatGso& g, long long* budget)
      : L_(L), g_(g), budget_(budget) {}

  std::vector<PoolEntry> run(double log_r) {
    pool_.clear();
    double stretch = static_cast<double>(L_.n) / L_.m;
    scale_second_ = std::exp((1.0 + stretch) * L_.log_Q);
    log_r_ = log_r;
    // Euclidean radius in normalized scaled coordinates, with margin.
    long double log2_R = (log_r + 0.5 * std::log(static_cast<double>(L_.d))) / M_LN2 +
                         static_cast<long double>(L_.shift - g_.e0);
    R_sq_ = powl(2.0L, 2 * log2_R) * (1.0L + 1e-9L);
    x_.assign(L_.d, 0);
    partial_.assign(L_.d + 1, 0);
    centers_.assign(L_.d, 0);
    descend(L_.d - 1, true);
    return std::move(pool_);
  }

 private:
  void charge(long long nodes = 1) {
    if (budget_ && (*budget_ -= nodes) < 0) fail(ErrorCode::budget_exceeded, "enumeration budget exhausted");
  }

  // level i > 0: integer range for x_i from the Euclidean bound
  void descend(int i, bool all_zero_above) {
    charge();
    if (i == 0) {
      leaf(all_zero_above);
      return;
    }
    long double center = 0;
    for (int j = i + 1; j < L_.d; ++j) center -= x_[j] * g_.mu[j][i];
    long double remain = R_sq_ - partial_[i + 1];
    if (remain < 0) return;
    long double halfw = sqrtl(remain / g_.bstar_sq[i]);
    long long lo = static_cast<long long>(ceill(center - halfw - 1e-9L));
    long long hi = static_cast<long long>(floorl(center + halfw + 1e-9L));
    if (all_zero_above) lo = std::max(lo, 0LL);  // canonical sign: leading coefficient nonnegative
    for (long long v = lo; v <= hi; ++v) {
      x_[i] = v;
      long double dv = v - center;
      partial_[i] = partial_[i + 1] + dv * dv * g_.bstar_sq[i];
      if (partial_[i] > R_sq_) continue;
      descend(i - 1, all_zero_above && v == 0);
    }
    x_[i] = 0;
  }

  double proxy(const std::vector<double>& base_q, const std::vector<double>& dir_q,
               const std::vector<double>& base_r, const std::vector<double>& dir_r,
               long long x1) const {
    double xd = static_cast<double>(x1);
    double mq = 0;
    for (std::size_t j = 0; j < base_q.size(); ++j) mq = std::max(mq, std::fabs(base_q[j] + xd * dir_q[j]));
    double mr = 0;
    for (std::size_t j = 0; j < base_r.size(); ++j) mr = std::max(mr, std::fabs(base_r[j] + xd * dir_r[j]));
    return std::max(mq, mr * scale_second_);
  }

  void leaf(bool all_zero_above) {
    // exact coordinates of the tail point and of the direction row 0
    ZRow v0(L_.d, mpz_class(0));
    for (int j = 1; j < L_.d; ++j)
      if (x_[j] != 0)
        for (int c = 0; c < L_.d; ++c) v0[c] += static_cast<long>(x_[j]) * L_.coords[j][c];
    const ZRow& dir = L_.coords[0];

    std::vector<long long> candidates;
    if (all_zero_above) {
      candidates.push_back(1);  // the line through the origin contributes only +-b_1
    } else {
      long double center = 0;
      for (int j = 1; j < L_.d; ++j) center -= x_[j] * g_.mu[j][0];
      long double remain = R_sq_ - partial_[1];
      if (remain < 0) return;
      long double halfw = sqrtl(remain / g_.bstar_sq[0]);
      long long lo = static_cast<long long>(ceill(center - halfw - 1e-9L));
      long long hi = static_cast<long long>(floorl(center + halfw + 1e-9L));
      if (lo > hi) return;
      if (hi - lo <= 16) {
        for (long long v = lo; v <= hi; ++v) candidates.push_back(v);
      } else {
        // K-norm along the line is convex piecewise linear: ternary search,
        // then a window wide enough for any independence chain need.
        std::vector<double> bq(L_.n), dq(L_.n), br(L_.m), dr(L_.m);
        for (int j = 0; j < L_.n; ++j) {
          bq[j] = v0[j].get_d();
          dq[j] = dir[j].get_d();
        }
        auto res0 = residual_d(v0), res1 = residual_d(dir);
        br = res0;
        dr = res1;
        long long a = lo, b = hi;
        while (b - a > 2) {
          charge();
          long long m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
          if (proxy(bq, dq, br, dr, m1) <= proxy(bq, dq, br, dr, m2))
            b = m2;
          else
            a = m1;
        }
        long long best = a;
        double bestv = proxy(bq, dq, br, dr, a);
        for (long long v = a + 1; v <= b; ++v) {
          double pv = proxy(bq, dq, br, dr, v);
          if (pv < bestv) {
            bestv = pv;
            best = v;
          }
        }
        long long w = L_.d + 2;
        for (long long v = std::max(lo, best - w); v <= std::min(hi, best + w); ++v) candidates.push_back(v);
      }
    }

    for (long long v : candidates) {
      charge();
      x_[0] = v;
      // primitive coefficient vectors only; a chain never needs k*w when w is shorter
      mpz_class gcd = 0;
      for (int j = 0; j < L_.d; ++j) {
        mpz_class a = abs(to_mpz(x_[j]));
        mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), a.get_mpz_t());
      }
      if (gcd != 1) continue;
      PoolEntry e;
      e.coord = v0;
      if (v != 0)
        for (int c = 0; c < L_.d; ++c) e.coord[c] += static_cast<long>(v) * dir[c];
      e.log_k = log_knorm(L_, e.coord, &e.log_first, &e.log_second);
      if (e.log_k <= log_r_ + 1e-9) pool_.push_back(std::move(e));
    }
    x_[0] = 0;
  }

  std::vector<double> residual_d(const ZRow& coord) const {
    std::vector<double> out(L_.m);
    for (int i = 0; i < L_.m; ++i) {
      mpf_class acc(0, L_.prec);
      for (int j = 0; j < L_.n; ++j) acc += L_.a_rows[static_cast<std::size_t>(i) * L_.n + j] * mpf_class(coord[j], L_.prec);
      acc -= mpf_class(coord[L_.n + i], L_.prec);
      out[i] = acc.get_d();
    }
    return out;
  }

  const ScaledLattice& L_;
  const FloatGso& g_;
  long long* budget_;
  double log_r_ = 0;
  double scale_second_ = 1;
  long double R_sq_ = 0;
  std::vector<long long> x_;
  std::vector<long double> partial_;
  std::vector<long double> centers_;
  std::vector<PoolEntry> pool_;
};

inline LatticeVector to_witness(const ScaledLattice& L, const PoolEntry& e) {
  LatticeVector w;
  w.q = coord_q(L, e.coord);
  w.p = coord_p(L, e.coord);
  w.first_norm = e.log_first == kNegInf ? 0.0 : std::exp(e.log_first);
  // recompute the norm exactly rather than exponentiating the log
  mpz_class mq = 0;
  for (auto& x : w.q) {
    mpz_class a = abs(x);
    if (a > mq) mq = a;
  }
  w.first_norm = mq.get_d();
  w.log_second = e.log_second;
  return w;
}

inline SuccessiveMinima canonical_unit_minima(const MatrixA& A) {
  SuccessiveMinima out;
  out.log_Q = 0;
  mp_bitcnt_t prec = working_prec(0, A.m(), A.n(), A.max_abs_entry());
  auto a_rows = A.parsed(prec);
  for (int i = 0; i < A.m(); ++i) {
    std::vector<mpz_class> q(static_cast<std::size_t>(A.n()), mpz_class(0));
    std::vector<mpz_class> p(static_cast<std::size_t>(A.m()), mpz_class(0));
    p[static_cast<std::size_t>(i)] = 1;
    out.log_lambda.push_back(0.0);
    out.witnesses.push_back(make_lattice_vector(A, std::move(q), std::move(p), prec));
  }
  for (int j = 0; j < A.n(); ++j) {
    std::vector<mpz_class> q(static_cast<std::size_t>(A.n()), mpz_class(0));
    std::vector<mpz_class> p(static_cast<std::size_t>(A.m()), mpz_class(0));
    q[static_cast<std::size_t>(j)] = 1;
    for (int i = 0; i < A.m(); ++i) {
      mpf_class v = a_rows[static_cast<std::size_t>(i) * A.n() + j];
      p[static_cast<std::size_t>(i)] = round_to_mpz(v);
    }
    out.log_lambda.push_back(0.0);
    out.witnesses.push_back(make_lattice_vector(A, std::move(q), std::move(p), prec));
  }
  return out;
}

}  // namespace detail

// Exact successive minima by complete enumeration over an LLL-preprocessed
// basis, radius doubling until m+n independent points fit.
inline SuccessiveMinima successive_minima_exact(const MatrixA& A, double log_q,
                                                const LatticeOptions& opts = {}) {
  if (log_q < 0) fail(ErrorCode::invalid_param, "need log_Q >= 0");
  if (log_q == 0) {
    auto out = detail::canonical_unit_minima(A);
    out.backend = Backend::exact;
    return out;
  }
  auto L = detail::build_scaled(A, log_q);
  auto gso = detail::float_gso(L);
  long long budget = opts.budget;
  detail::Enumerator en(L, gso, &budget);

  double log_r = 0;
  for (int round = 0; round < 64; ++round) {
    // upfront node estimate for this radius
    long double est = 1;
    for (int i = 0; i < L.d; ++i) {
      long double halfw =
          powl(2.0L, (log_r + 0.5 * std::log(static_cast<double>(L.d))) / M_LN2 +
                         static_cast<long double>(L.shift - gso.e0)) /
          sqrtl(gso.bstar_sq[i]);
      est *= std::min<long double>(2 * halfw + 1, 1e30L);
      // the innermost line is resolved in O(log) steps, not scanned
      if (i == 0 && 2 * halfw + 1 > 16) est /= std::max<long double>(1, (2 * halfw + 1) / 64);
    }
    if (est > static_cast<long double>(budget))
      fail(ErrorCode::budget_exceeded, "estimated enumeration count exceeds budget at log radius " + fmt12(log_r));

    auto pool = en.run(log_r);
    std::sort(pool.begin(), pool.end(), detail::pool_less);
    detail::RankTracker rank(L.d);
    SuccessiveMinima out;
    out.log_Q = log_q;
    out.backend = Backend::exact;
    for (auto& e : pool) {
      if (rank.rank() == L.d) break;
      if (rank.try_add(e.coord)) {
        out.log_lambda.push_back(e.log_k);
        out.witnesses.push_back(detail::to_witness(L, e));
      }
    }
    if (rank.rank() == L.d) return out;
    log_r += M_LN2;
  }
  fail(ErrorCode::budget_exceeded, "radius doubling did not terminate");
}

// Approximate successive minima from the reduced basis alone. Guarantee:
// |log lambda~_j - log lambda_j| <= (m+n) log 2.
inline SuccessiveMinima successive_minima_reduced(const MatrixA& A, double log_q,
                                                  const LatticeOptions& opts = {}) {
  (void)opts;
  if (log_q < 0) fail(ErrorCode::invalid_param, "need log_Q >= 0");
  if (log_q == 0) {
    auto out = detail::canonical_unit_minima(A);
    out.backend = Backend::reduced;
    return out;
  }
  auto L = detail::build_scaled(A, log_q);
  std::vector<detail::PoolEntry> entries(static_cast<std::size_t>(L.d));
  for (int i = 0; i < L.d; ++i) {
    entries[static_cast<std::size_t>(i)].coord = L.coords[static_cast<std::size_t>(i)];
    entries[static_cast<std::size_t>(i)].log_k = detail::log_knorm(
        L, L.coords[static_cast<std::size_t>(i)], &entries[static_cast<std::size_t>(i)].log_first,
        &entries[static_cast<std::size_t>(i)].log_second);
  }
  std::sort(entries.begin(), entries.end(), detail::pool_less);
  SuccessiveMinima out;
  out.log_Q = log_q;
  out.backend = Backend::reduced;
  for (auto& e : entries) {
    out.log_lambda.push_back(e.log_k);
    out.witnesses.push_back(detail::to_witness(L, e));
  }
  return out;
}

inline SuccessiveMinima successive_minima(const MatrixA& A, double log_q, Backend backend,
                                          const LatticeOptions& opts = {}) {
  return backend == Backend::exact ? successive_minima_exact(A, log_q, opts)
                                   : successive_minima_reduced(A, log_q, opts);
}

}  // namespace pgn
