#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "pgn/errors.hpp"
#include "pgn/numeric.hpp"

namespace pgn {

// An approximation function t -> (0, infinity) on the positive integers.
// All evaluation is in log space; values like e^{-t} underflow long before
// the interesting range is reached.
class ApproxFn {
 public:
  enum class Kind { power, piecewise_dyadic, exp_decay, scaled, table };

  static ApproxFn power(double tau) {
    if (!(tau > 0)) fail(ErrorCode::invalid_param, "power kind needs tau > 0");
    ApproxFn f(Kind::power);
    f.param_ = tau;
    f.analytic_tau_ = tau;
    f.analytic_omega_ = tau;
    return f;
  }

  // 2^N t^{-exponent} on each dyadic block [2^N, 2^{N+1}). The lower order is
  // exponent-1, attained exactly at the left block endpoints.
  static ApproxFn piecewise_dyadic(double exponent) {
    if (!(exponent > 1)) fail(ErrorCode::invalid_param, "piecewise_dyadic needs exponent > 1");
    ApproxFn f(Kind::piecewise_dyadic);
    f.param_ = exponent;
    f.analytic_tau_ = exponent - 1;
    return f;
  }

  static ApproxFn exp_decay(double rate) {
    if (!(rate > 0)) fail(ErrorCode::invalid_param, "exp_decay needs rate > 0");
    ApproxFn f(Kind::exp_decay);
    f.param_ = rate;
    f.analytic_tau_ = kPosInf;
    f.analytic_omega_ = kPosInf;
    return f;
  }

  static ApproxFn scaled(ApproxFn base, double divisor) {
    if (!(divisor > 1)) fail(ErrorCode::invalid_param, "scaled kind needs divisor > 1");
    ApproxFn f(Kind::scaled);
    f.param_ = divisor;
    f.analytic_tau_ = base.analytic_tau_;   // dividing by a constant keeps both orders
    f.analytic_omega_ = base.analytic_omega_;
    f.base_ = std::make_shared<ApproxFn>(std::move(base));
    return f;
  }

  static ApproxFn table(std::vector<std::pair<long long, double>> pairs) {
    ApproxFn f(Kind::table);
    long long prev = 0;
    for (auto& [t, v] : pairs) {
      if (t < 1 || t <= prev) fail(ErrorCode::invalid_param, "table keys must be strictly increasing positive integers");
      if (!(v > 0)) fail(ErrorCode::invalid_param, "table values must be positive");
      f.table_[t] = std::log(v);
      prev = t;
    }
    if (f.table_.empty()) fail(ErrorCode::invalid_param, "empty table");
    return f;
  }

  Kind kind() const { return kind_; }
  double param() const { return param_; }
  const ApproxFn& base() const { return *base_; }
  const std::map<long long, double>& table_entries() const { return table_; }
  std::optional<double> analytic_tau() const { return analytic_tau_; }
  std::optional<double> analytic_omega() const { return analytic_omega_; }

  void set_analytic_tau(double v) { analytic_tau_ = v; }
  void set_analytic_omega(double v) { analytic_omega_ = v; }

  // log Phi(t) for a positive integer t.
  double log_phi(const mpz_class& t) const {
    if (t < 1) fail(ErrorCode::invalid_param, "log_phi needs t >= 1");
    switch (kind_) {
      case Kind::power:
        return -param_ * log_mpz(t);
      case Kind::piecewise_dyadic: {
        // block index N = floor(log2 t), exact from the bit length
        double N = static_cast<double>(mpz_sizeinbase(t.get_mpz_t(), 2) - 1);
        return N * M_LN2 - param_ * log_mpz(t);
      }
      case Kind::exp_decay:
        return -param_ * t.get_d();
      case Kind::scaled:
        return base_->log_phi(t) - std::log(param_);
      case Kind::table: {
        if (!t.fits_slong_p()) fail(ErrorCode::table_miss, "key outside table range");
        auto it = table_.find(t.get_si());
        if (it == table_.end()) fail(ErrorCode::table_miss, "t=" + t.get_str() + " not in table", t.get_si());
        return it->second;
      }
    }
    fail(ErrorCode::invalid_param, "bad kind");
  }

  double log_phi(long long t) const { return log_phi(to_mpz(t)); }

  // -log Phi(t) / log t; needs t >= 2.
  double order_ratio(const mpz_class& t) const { return -log_phi(t) / log_mpz(t); }

 private:
  explicit ApproxFn(Kind k) : kind_(k) {}

  Kind kind_;
  double param_ = 0;
  std::shared_ptr<const ApproxFn> base_;
  std::map<long long, double> table_;
  std::optional<double> analytic_tau_;
  std::optional<double> analytic_omega_;
};

struct OrderEstimate {
  double tau_lower = 0;       // min of -log Phi(t)/log t over the grid
  double omega_upper = 0;     // max over the grid
  long long t_min = 0, t_max = 0;
  long long argmin_t = 0;
  std::optional<double> analytic_tau;   // reported alongside, never overwritten
  std::optional<double> analytic_omega;
};

namespace detail {

// Geometric integer grid anchored at t_min; endpoints always included.
inline std::vector<long long> geometric_grid(long long t_min, long long t_max, int samples) {
  std::vector<long long> grid;
  if (samples < 2) samples = 2;
  double h = (std::log(static_cast<double>(t_max)) - std::log(static_cast<double>(t_min))) / (samples - 1);
  long long prev = 0;
  for (int i = 0; i < samples; ++i) {
    long long t = static_cast<long long>(std::llround(std::exp(std::log(static_cast<double>(t_min)) + i * h)));
    t = std::clamp(t, t_min, t_max);
    if (t != prev) grid.push_back(t);
    prev = t;
  }
  if (grid.empty() || grid.back() != t_max) grid.push_back(t_max);
  return grid;
}

}  // namespace detail

inline OrderEstimate order_estimates(const ApproxFn& phi, long long t_min, long long t_max, int samples) {
  if (!(2 <= t_min && t_min < t_max)) fail(ErrorCode::invalid_param, "need 2 <= t_min < t_max");
  if (samples < 2) fail(ErrorCode::invalid_param, "need samples >= 2");
  std::vector<long long> grid;
  if (phi.kind() == ApproxFn::Kind::table) {
    // the table is the whole domain; sample its keys
    for (auto& [t, v] : phi.table_entries())
      if (t_min <= t && t <= t_max) grid.push_back(t);
  } else {
    grid = detail::geometric_grid(t_min, t_max, samples);
  }
  if (grid.size() < 2) fail(ErrorCode::window_too_small, "fewer than 2 sample points");
  OrderEstimate est;
  est.t_min = t_min;
  est.t_max = t_max;
  est.tau_lower = kPosInf;
  est.omega_upper = kNegInf;
  for (long long t : grid) {
    double r = phi.order_ratio(to_mpz(t));
    if (r < est.tau_lower) {
      est.tau_lower = r;
      est.argmin_t = t;
    }
    est.omega_upper = std::max(est.omega_upper, r);
  }
  est.analytic_tau = phi.analytic_tau();
  est.analytic_omega = phi.analytic_omega();
  return est;
}

struct DirichletVerdict {
  bool holds = true;
  long long fails_at = 0;  // smallest grid witness when !holds
};

// Phi(t) <= t^{-n/m} over a geometric test grid.
inline DirichletVerdict check_dirichlet_bound(const ApproxFn& phi, int m, int n,
                                              long long t_min, long long t_max,
                                              int samples = 2048) {
  if (m < 1 || n < 1) fail(ErrorCode::invalid_param, "need m, n >= 1");
  if (t_min < 1 || t_min > t_max) fail(ErrorCode::invalid_param, "bad window");
  DirichletVerdict v;
  double ratio = static_cast<double>(n) / m;
  for (long long t : detail::geometric_grid(std::max<long long>(1, t_min), t_max, samples)) {
    double bound = t == 1 ? 0.0 : -ratio * std::log(static_cast<double>(t));
    if (phi.log_phi(t) > bound + 1e-12) {
      v.holds = false;
      v.fails_at = t;
      return v;
    }
  }
  return v;
}

struct C1Result {
  double log_d_min = 0;                      // smallest admissible log d on the window
  std::pair<long long, long long> witness;   // pair attaining the distortion
  bool violated = false;                     // set iff a d_cap was given and exceeded
};

// Measures the best constant d for the bounded-distortion condition: over all
// integer pairs (t, t~) in the window with t/c <= t~ <= c t, the max of
// |log Phi(t~) - log Phi(t)|. A finite window measures, it cannot prove.
inline C1Result check_c1(const ApproxFn& phi, double c, long long t_min, long long t_max,
                         std::optional<double> d_cap = std::nullopt) {
  if (!(c > 1)) fail(ErrorCode::invalid_param, "need c > 1");
  if (!(1 <= t_min && t_min <= t_max)) fail(ErrorCode::invalid_param, "bad window");
  long long width = t_max - t_min + 1;
  if (width > (1LL << 26)) fail(ErrorCode::budget_exceeded, "window too wide for exhaustive scan");
  std::vector<double> lp(static_cast<std::size_t>(width));
  for (long long t = t_min; t <= t_max; ++t) lp[static_cast<std::size_t>(t - t_min)] = phi.log_phi(t);

  C1Result res;
  res.log_d_min = 0;
  res.witness = {t_min, t_min};
  // sliding [ceil(t/c), floor(ct)] window; both edges are nondecreasing in t
  std::deque<long long> qmax, qmin;  // indices into lp, decreasing / increasing by value
  long long right = t_min - 1;
  long long left = t_min;
  for (long long t = t_min; t <= t_max; ++t) {
    long long hi = std::min<long long>(t_max, static_cast<long long>(std::floor(c * static_cast<double>(t))));
    long long lo = std::max<long long>(t_min, static_cast<long long>(std::ceil(static_cast<double>(t) / c)));
    while (right < hi) {
      ++right;
      double v = lp[static_cast<std::size_t>(right - t_min)];
      while (!qmax.empty() && lp[static_cast<std::size_t>(qmax.back() - t_min)] <= v) qmax.pop_back();
      qmax.push_back(right);
      while (!qmin.empty() && lp[static_cast<std::size_t>(qmin.back() - t_min)] >= v) qmin.pop_back();
      qmin.push_back(right);
    }
    while (left < lo) {
      if (!qmax.empty() && qmax.front() < lo) qmax.pop_front();
      if (!qmin.empty() && qmin.front() < lo) qmin.pop_front();
      ++left;
    }
    if (!qmax.empty() && qmax.front() < lo) qmax.pop_front();
    if (!qmin.empty() && qmin.front() < lo) qmin.pop_front();
    double here = lp[static_cast<std::size_t>(t - t_min)];
    if (!qmax.empty()) {
      double d = lp[static_cast<std::size_t>(qmax.front() - t_min)] - here;
      if (d > res.log_d_min) {
        res.log_d_min = d;
        res.witness = {t, qmax.front()};
      }
    }
    if (!qmin.empty()) {
      double d = here - lp[static_cast<std::size_t>(qmin.front() - t_min)];
      if (d > res.log_d_min) {
        res.log_d_min = d;
        res.witness = {t, qmin.front()};
      }
    }
  }
  if (d_cap && res.log_d_min > std::log(*d_cap)) res.violated = true;
  return res;
}

// Once the bounded-distortion condition holds for one pair (c0, d0), it holds
// for every c > 1 with d = max(d0, c^{2 rho0}), rho0 = log d0 / log c0.
inline double c1_propagated_d(double c0, double d0, double c) {
  if (!(c0 > 1 && d0 >= 1 && c > 1)) fail(ErrorCode::invalid_param, "bad propagation inputs");
  double rho0 = std::log(d0) / std::log(c0);
  return std::max(d0, std::pow(c, 2 * rho0));
}

struct StarVerdict {
  bool holds = true;
  double violated_c = 0;
  long long violated_t = 0;
};

// Quasi power-growth check: log Phi(ceil(ct)) <= log_slack + rho log c + log Phi(t)
// on the sampled (c, t) pairs. log_slack defaults to log 4; slack 0 tests the
// strict power envelope, which is the form that separates the dyadic staircase
// from genuine power laws as c -> 1.
inline StarVerdict check_star(const ApproxFn& phi, double rho, long long t0,
                              const std::vector<double>& c_grid, long long t_max,
                              double log_slack = std::log(4.0), int samples = 512) {
  if (c_grid.empty()) fail(ErrorCode::invalid_param, "empty c grid");
  if (t0 < 1) fail(ErrorCode::invalid_param, "need t0 >= 1");
  StarVerdict v;
  for (double c : c_grid) {
    if (!(c > 1)) fail(ErrorCode::invalid_param, "c grid values must exceed 1");
    for (long long t : detail::geometric_grid(t0, t_max, samples)) {
      long long ct = static_cast<long long>(std::ceil(c * static_cast<double>(t)));
      if (phi.log_phi(ct) > log_slack + rho * std::log(c) + phi.log_phi(t) + 1e-12) {
        v.holds = false;
        v.violated_c = c;
        v.violated_t = t;
        return v;
      }
    }
  }
  return v;
}

// Advisory monotonicity scan (exhaustive when the window is small).
inline bool is_decreasing_on(const ApproxFn& phi, long long t_lo, long long t_hi,
                             long long max_checks = 1 << 22) {
  if (t_lo >= t_hi) return true;
  if (phi.kind() == ApproxFn::Kind::table) {
    double prev = kPosInf;
    for (auto& [t, v] : phi.table_entries()) {
      if (t < t_lo || t > t_hi) continue;
      if (v > prev + 1e-12) return false;
      prev = v;
    }
    return true;
  }
  long long width = t_hi - t_lo;
  long long stride = std::max<long long>(1, width / max_checks);
  double prev = phi.log_phi(t_lo);
  for (long long t = t_lo + stride; t <= t_hi; t += stride) {
    double cur = phi.log_phi(t);
    if (cur > prev + 1e-12) return false;
    prev = cur;
  }
  return true;
}

}  // namespace pgn
