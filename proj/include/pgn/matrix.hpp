#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pgn/errors.hpp"
#include "pgn/numeric.hpp"

namespace pgn {

// Real m x n matrix with entries kept as decimal text and re-parseable at any
// working precision. Residuals A q - p cancel catastrophically for good
// approximations, so the double mirror is only for coarse work.
class MatrixA {
 public:
  static constexpr int kDefaultDimCap = 6;

  MatrixA() = default;

  MatrixA(int m, int n, std::vector<std::string> entries, std::string tag = {},
          int dim_cap = kDefaultDimCap)
      : m_(m), n_(n), text_(std::move(entries)), tag_(std::move(tag)) {
    if (m_ < 1 || n_ < 1) fail(ErrorCode::invalid_param, "need m, n >= 1");
    if (m_ + n_ > dim_cap) fail(ErrorCode::invalid_param, "m+n exceeds dimension cap");
    if (text_.size() != static_cast<std::size_t>(m_) * n_)
      fail(ErrorCode::invalid_param, "entry count does not match m*n");
    mirror_.reserve(text_.size());
    for (auto& s : text_) {
      double d = mpf_class(parse_decimal(s, 64)).get_d();
      if (!std::isfinite(d)) fail(ErrorCode::invalid_param, "non-finite entry");
      mirror_.push_back(d);
    }
  }

  static MatrixA from_doubles(int m, int n, const std::vector<double>& vals, std::string tag = {}) {
    std::vector<std::string> text;
    text.reserve(vals.size());
    for (double v : vals) text.push_back(fmt17(v));
    return MatrixA(m, n, std::move(text), std::move(tag));
  }

  int m() const { return m_; }
  int n() const { return n_; }
  int dim() const { return m_ + n_; }
  const std::string& tag() const { return tag_; }
  void set_tag(std::string t) { tag_ = std::move(t); }
  const std::vector<std::string>& entry_text() const { return text_; }

  double at(int i, int j) const { return mirror_[static_cast<std::size_t>(i) * n_ + j]; }

  // Row-major parse of all entries at `prec` bits.
  std::vector<mpf_class> parsed(mp_bitcnt_t prec) const {
    std::vector<mpf_class> out;
    out.reserve(text_.size());
    for (auto& s : text_) out.push_back(parse_decimal(s, prec));
    return out;
  }

  double max_abs_entry() const {
    double mx = 0;
    for (double v : mirror_) mx = std::max(mx, std::fabs(v));
    return mx;
  }

 private:
  int m_ = 0, n_ = 0;
  std::vector<std::string> text_;   // row-major
  std::vector<double> mirror_;
  std::string tag_;
};

// One nonzero point of the lattice {(q, Aq - p)}.
struct LatticeVector {
  std::vector<mpz_class> q;  // length n
  std::vector<mpz_class> p;  // length m
  double first_norm = 0;     // max-norm of q
  double log_second = 0;     // log max-norm of Aq - p; -inf when the residual is exactly 0
};

namespace detail {

inline double inf_norm(const std::vector<mpz_class>& v) {
  mpz_class mx = 0;
  for (auto& x : v) {
    mpz_class a = abs(x);
    if (a > mx) mx = a;
  }
  return mx.get_d();
}

// log max-norm of A q - p at precision `prec`; -inf for an exact zero residual.
inline double log_residual_norm(const std::vector<mpf_class>& a_rows, int m, int n,
                                const std::vector<mpz_class>& q, const std::vector<mpz_class>& p,
                                mp_bitcnt_t prec) {
  mpf_class best(0, prec);
  for (int i = 0; i < m; ++i) {
    mpf_class acc(0, prec);
    for (int j = 0; j < n; ++j) {
      mpf_class term(a_rows[static_cast<std::size_t>(i) * n + j], prec);
      term *= mpf_class(q[static_cast<std::size_t>(j)], prec);
      acc += term;
    }
    acc -= mpf_class(p[static_cast<std::size_t>(i)], prec);
    acc = abs(acc);
    if (acc > best) best = acc;
  }
  return log_mpf(best);
}

}  // namespace detail

inline LatticeVector make_lattice_vector(const MatrixA& A, std::vector<mpz_class> q,
                                         std::vector<mpz_class> p, mp_bitcnt_t prec) {
  bool all_zero = true;
  for (auto& x : q) all_zero = all_zero && x == 0;
  for (auto& x : p) all_zero = all_zero && x == 0;
  if (all_zero) fail(ErrorCode::invalid_param, "zero lattice vector");
  LatticeVector v;
  v.first_norm = detail::inf_norm(q);
  v.log_second = detail::log_residual_norm(A.parsed(prec), A.m(), A.n(), q, p, prec);
  v.q = std::move(q);
  v.p = std::move(p);
  return v;
}

}  // namespace pgn
