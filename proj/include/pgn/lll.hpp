#pragma once

#include <gmpxx.h>

#include <vector>

#include "pgn/errors.hpp"

namespace pgn::detail {

using ZRow = std::vector<mpz_class>;
using ZMat = std::vector<ZRow>;

inline mpz_class dot(const ZRow& a, const ZRow& b) {
  mpz_class s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline mpz_class exact_div(const mpz_class& num, const mpz_class& den) {
  mpz_class q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (r != 0) throw std::logic_error("lll: inexact integral division");
  return q;
}

// All-integer LLL (de Weger form, delta = 3/4) on row vectors. `transform`
// receives the same row operations starting from the identity, so
// basis_out = transform * basis_in exactly.
class IntegerLll {
 public:
  IntegerLll(ZMat basis, ZMat transform) : b_(std::move(basis)), u_(std::move(transform)) {
    k_count_ = b_.size();
    d_.assign(k_count_ + 1, mpz_class(0));
    d_[0] = 1;
    lam_.assign(k_count_ + 1, std::vector<mpz_class>(k_count_ + 1, mpz_class(0)));
    for (std::size_t i = 1; i <= k_count_; ++i) {
      for (std::size_t j = 1; j <= i; ++j) {
        mpz_class u = dot(b_[i - 1], b_[j - 1]);
        for (std::size_t k = 1; k < j; ++k) u = exact_div(d_[k] * u - lam_[i][k] * lam_[j][k], d_[k - 1]);
        if (j < i)
          lam_[i][j] = u;
        else
          d_[i] = u;
      }
      if (d_[i] == 0) fail(ErrorCode::invalid_param, "lll: dependent input basis");
    }
  }

  void reduce() {
    std::size_t k = 2;
    while (k <= k_count_) {
      size_reduce(k, k - 1);
      // Lovasz with delta = 3/4:  d_k d_{k-2} < (3/4) d_{k-1}^2 - lam^2
      if (4 * (d_[k] * d_[k - 2]) < 3 * d_[k - 1] * d_[k - 1] - 4 * lam_[k][k - 1] * lam_[k][k - 1]) {
        swap_rows(k);
        k = k > 2 ? k - 1 : 2;
      } else {
        for (std::size_t l = k >= 2 ? k - 2 : 0; l >= 1; --l) size_reduce(k, l);
        ++k;
      }
    }
  }

  ZMat& basis() { return b_; }
  ZMat& transform() { return u_; }

 private:
  void size_reduce(std::size_t k, std::size_t l) {
    // |lam| <= d_l / 2 afterwards
    mpz_class two_lam = 2 * lam_[k][l];
    if (two_lam > d_[l] || two_lam < -d_[l]) {
      // nearest integer to lam / d
      mpz_class q;
      mpz_class num = two_lam + d_[l];
      mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), mpz_class(2 * d_[l]).get_mpz_t());
      for (std::size_t i = 0; i < b_[k - 1].size(); ++i) b_[k - 1][i] -= q * b_[l - 1][i];
      for (std::size_t i = 0; i < u_[k - 1].size(); ++i) u_[k - 1][i] -= q * u_[l - 1][i];
      for (std::size_t j = 1; j < l; ++j) lam_[k][j] -= q * lam_[l][j];
      lam_[k][l] -= q * d_[l];
    }
  }

  void swap_rows(std::size_t k) {
    std::swap(b_[k - 1], b_[k - 2]);
    std::swap(u_[k - 1], u_[k - 2]);
    for (std::size_t j = 1; j + 1 < k; ++j) std::swap(lam_[k][j], lam_[k - 1][j]);
    mpz_class lam = lam_[k][k - 1];
    mpz_class bnew = exact_div(d_[k - 2] * d_[k] + lam * lam, d_[k - 1]);
    for (std::size_t i = k + 1; i <= k_count_; ++i) {
      mpz_class t = lam_[i][k];
      lam_[i][k] = exact_div(d_[k] * lam_[i][k - 1] - lam * t, d_[k - 1]);
      lam_[i][k - 1] = exact_div(bnew * t + lam * lam_[i][k], d_[k]);
    }
    d_[k - 1] = bnew;
  }

  ZMat b_, u_;
  std::vector<mpz_class> d_;
  std::vector<std::vector<mpz_class>> lam_;
  std::size_t k_count_ = 0;
};

struct LllOut {
  ZMat basis;
  ZMat transform;
};

inline LllOut lll_reduce(ZMat basis) {
  std::size_t n = basis.size();
  ZMat id(n, ZRow(n, mpz_class(0)));
  for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
  IntegerLll lll(std::move(basis), std::move(id));
  lll.reduce();
  return {std::move(lll.basis()), std::move(lll.transform())};
}

}  // namespace pgn::detail
