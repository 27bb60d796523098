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

enum class FinderCase { ratio_split, doubling };

// Certificate for a lacunary sequence on which Phi is locally flat: for every
// k and every integer t~ in [t_k/c, c t_k], the distortion
// |log Phi(t~) - log Phi(t_k)| stays below log d.
struct SequenceCert {
  std::vector<long long> t_seq;
  double c = 0;
  FinderCase case_used = FinderCase::doubling;
  double log_d_achieved = 0;     // max measured distortion over all k
  double log_d_theoretical = 0;  // 2 omega log c (ratio split) or 4 tau log c (doubling)
  double tau_used = 0;
  double omega_used = 0;
  bool monotone = false;          // advisory scan of Phi on the window
  bool complete = false;          // k_target terms found below the cap
  std::vector<double> order_trace;       // -log Phi(t_k) / log t_k
  std::vector<double> lacunarity_trace;  // log t_{k+1} / log t_k
  struct Step {
    long long t = 0;
    long long ell = 0;       // search anchor that produced the term
    long long rejections = 0;  // doubling-case rejected candidates
    double delta = 0;        // ratio-split band width
  };
  std::vector<Step> steps;
  std::vector<std::string> notes;
};

struct FinderOptions {
  double slack = 0.05;              // case-split threshold on omega - tau
  double lacunarity_base = 1.0;     // floor log t_{k+1} / log t_k >= base + step * k
  double lacunarity_step = 0.1;     //   (grows without bound, so the finite prefix
                                    //    exhibits the required divergence; the floors
                                    //    compound, so even a mild step escalates fast)
  std::optional<double> tau_override;
  std::optional<double> omega_override;
  std::vector<std::pair<long long, long long>> chi_floor;  // step table, sorted: t_k must exceed chi(t_k)
  long long distortion_budget = 1'000'000'000;
  int order_samples = 400;
};

struct VerifyReport {
  bool pass = true;
  int worst_k = -1;
  long long worst_t = 0;
  double log_worst_distortion = 0;
};

namespace detail {

// Exhaustive distortion of Phi over the integer window [t/c, c t]. For table
// kinds the stored keys are the whole domain.
inline double measure_distortion(const ApproxFn& phi, long long t, double c, long long* budget,
                                 long long* worst_t = nullptr) {
  long long lo = static_cast<long long>(std::ceil(static_cast<double>(t) / c));
  long long hi = static_cast<long long>(std::floor(c * static_cast<double>(t)));
  double base = phi.log_phi(t);
  double worst = 0;
  if (worst_t) *worst_t = t;
  auto consider = [&](long long tt) {
    double d = std::fabs(phi.log_phi(tt) - base);
    if (d > worst) {
      worst = d;
      if (worst_t) *worst_t = tt;
    }
  };
  if (phi.kind() == ApproxFn::Kind::table) {
    for (auto& [key, v] : phi.table_entries())
      if (lo <= key && key <= hi) {
        if (budget && --*budget < 0) fail(ErrorCode::budget_exceeded, "distortion scan budget exhausted");
        consider(key);
      }
    return worst;
  }
  if (budget) {
    *budget -= (hi - lo + 1);
    if (*budget < 0) fail(ErrorCode::budget_exceeded, "distortion scan budget exhausted");
  }
  for (long long tt = lo; tt <= hi; ++tt) consider(tt);
  return worst;
}

inline long long chi_of(const std::vector<std::pair<long long, long long>>& table, long long t) {
  long long out = 0;
  for (auto& [key, val] : table) {
    if (key > t) break;
    out = val;
  }
  return out;
}

}  // namespace detail

inline VerifyReport verify_sequence(const ApproxFn& phi, const std::vector<long long>& t_seq,
                                    double c, double d, long long budget = 1'000'000'000) {
  if (!(c > 1) || !(d >= 1)) fail(ErrorCode::invalid_param, "need c > 1 and d >= 1");
  long long prev = 0;
  for (long long t : t_seq) {
    if (t <= prev) fail(ErrorCode::invalid_param, "t sequence must be increasing");
    prev = t;
  }
  VerifyReport rep;
  double log_d = std::log(d);
  for (std::size_t k = 0; k < t_seq.size(); ++k) {
    long long wt = 0;
    double dist = detail::measure_distortion(phi, t_seq[k], c, &budget, &wt);
    if (dist > rep.log_worst_distortion) {
      rep.log_worst_distortion = dist;
      rep.worst_k = static_cast<int>(k);
      rep.worst_t = wt;
    }
    if (dist > log_d + 1e-12) rep.pass = false;
  }
  return rep;
}

// Constructive search for a sequence t_k that is lacunary, has order ratios
// converging to tau, and carries a uniform local distortion bound. Two
// routes: when the upper order visibly exceeds the lower one, locate a
// ratio band and split [r_k, s_k] into ratio-c^2 blocks until one is flat
// enough (d = c^{2 omega}); otherwise a doubling walk accepts any anchor
// whose c^2-step loses less than c^{-4 tau} (d = c^{4 tau}).
// Reaching t_cap early is not an error: the certificate returns the terms
// found with complete = false.
inline SequenceCert find_sequence(const ApproxFn& phi, double c, int k_target, long long t_start,
                                  long long t_cap, const FinderOptions& opts = {}) {
  if (!(c > 1)) fail(ErrorCode::invalid_param, "need c > 1");
  if (k_target < 1 || t_start < 2 || t_cap <= t_start)
    fail(ErrorCode::invalid_param, "bad search window");

  SequenceCert cert;
  cert.c = c;

  double tau, omega;
  if (opts.tau_override)
    tau = *opts.tau_override;
  else if (phi.analytic_tau())
    tau = *phi.analytic_tau();
  else
    tau = order_estimates(phi, t_start, t_cap, opts.order_samples).tau_lower;
  if (opts.omega_override)
    omega = *opts.omega_override;
  else if (phi.analytic_omega())
    omega = *phi.analytic_omega();
  else
    omega = order_estimates(phi, t_start, t_cap, opts.order_samples).omega_upper;
  cert.tau_used = tau;
  cert.omega_used = omega;

  if (std::isinf(tau) || std::isinf(omega))
    fail(ErrorCode::case_undecidable,
         "unbounded order: the local flatness bound fails for every d on such functions");

  cert.monotone = is_decreasing_on(phi, t_start, t_cap);
  if (!cert.monotone) cert.notes.push_back("Phi is not decreasing on the window (advisory)");

  bool ratio_split = omega > tau + opts.slack;
  if (!ratio_split && !phi.analytic_omega() && !opts.omega_override)
    cert.notes.push_back("omega - tau within slack; falling back to the doubling walk");
  cert.case_used = ratio_split ? FinderCase::ratio_split : FinderCase::doubling;
  cert.log_d_theoretical = ratio_split ? 2 * omega * std::log(c) : 4 * tau * std::log(c);

  long long budget = opts.distortion_budget;
  double log_c = std::log(c);
  double delta0 = ratio_split ? (omega - tau) / 2 : 0;

  long long prev_t = 0;
  for (int k = 1; k <= k_target; ++k) {
    // growing lacunarity floor, plus disjointness of the scan windows
    double floor_log = prev_t == 0 ? std::log(static_cast<double>(t_start))
                                   : (opts.lacunarity_base + opts.lacunarity_step * k) *
                                         std::log(static_cast<double>(prev_t));
    double disjoint = prev_t == 0 ? 0.0 : std::log(static_cast<double>(prev_t)) + 2.01 * log_c;
    floor_log = std::max(floor_log, disjoint);
    if (floor_log > std::log(static_cast<double>(t_cap))) {
      cert.notes.push_back("cap reached before term " + std::to_string(k));
      return cert;
    }
    long long floor_t = std::max<long long>(t_start, static_cast<long long>(std::ceil(std::exp(floor_log))));
    while (detail::chi_of(opts.chi_floor, floor_t) >= floor_t)
      floor_t = detail::chi_of(opts.chi_floor, floor_t) + 1;

    SequenceCert::Step step;
    long long t_k = 0;

    if (!ratio_split) {
      // doubling walk: accept ell once Phi(c^2 ell) > c^{-4 tau} Phi(ell)
      long long ell = floor_t;
      long long rejections = 0;
      for (;;) {
        // the probe may look past the cap; only the accepted term must stay below it
        if (static_cast<double>(ell) * c > static_cast<double>(t_cap)) {
          cert.notes.push_back("cap reached during the doubling walk at term " + std::to_string(k));
          return cert;
        }
        long long ell2 = static_cast<long long>(std::ceil(c * c * static_cast<double>(ell)));
        if (phi.log_phi(ell2) > -4 * tau * log_c + phi.log_phi(ell) + 1e-12) {
          t_k = static_cast<long long>(std::llround(c * static_cast<double>(ell)));
          break;
        }
        ell = ell2;
        ++rejections;
      }
      step.ell = ell;
      step.rejections = rejections;
    } else {
      // ratio-band route
      double delta = delta0 * std::pow(2.0, -k);
      step.delta = delta;
      bool found = false;
      long long anchor = floor_t;
      for (int retry = 0; retry < 8 && !found; ++retry, anchor = std::min(t_cap, anchor * 2)) {
        // ell: first point with ratio above tau + delta
        long long ell = 0;
        for (double x = static_cast<double>(anchor); x <= static_cast<double>(t_cap); x *= 1.002) {
          long long t = static_cast<long long>(std::llround(x));
          if (phi.order_ratio(to_mpz(t)) > tau + delta) {
            ell = t;
            break;
          }
        }
        if (ell == 0) continue;
        // r: first point past ell whose ratio falls into (tau + delta/2, tau + delta)
        long long r = 0;
        for (double x = static_cast<double>(ell); x <= static_cast<double>(t_cap); x *= 1.002) {
          long long t = static_cast<long long>(std::llround(x));
          double ratio = phi.order_ratio(to_mpz(t));
          if (ratio > tau + delta / 2 && ratio < tau + delta) {
            r = t;
            break;
          }
        }
        if (r == 0) continue;
        // s = c^{2g} r: first power with ratio below tau + delta/3
        long long s = 0;
        int g = 0;
        for (double x = c * c * static_cast<double>(r); x <= static_cast<double>(t_cap); x *= c * c) {
          ++g;
          long long t = static_cast<long long>(std::llround(x));
          if (phi.order_ratio(to_mpz(t)) < tau + delta / 3) {
            s = t;
            break;
          }
        }
        if (s == 0) continue;
        // split [r, s] into ratio-c^2 blocks; take the first flat one
        double a = static_cast<double>(r);
        for (int i = 0; i < g; ++i, a *= c * c) {
          long long mid = static_cast<long long>(std::llround(c * a));
          double dist = detail::measure_distortion(phi, mid, c, &budget);
          if (dist <= cert.log_d_theoretical + 1e-12) {
            t_k = mid;
            step.ell = ell;
            found = true;
            break;
          }
        }
      }
      if (!found) {
        cert.notes.push_back("no flat block found below the cap at term " + std::to_string(k));
        return cert;
      }
    }

    step.t = t_k;
    cert.steps.push_back(step);
    cert.t_seq.push_back(t_k);
    cert.order_trace.push_back(phi.order_ratio(to_mpz(t_k)));
    if (prev_t != 0)
      cert.lacunarity_trace.push_back(std::log(static_cast<double>(t_k)) /
                                      std::log(static_cast<double>(prev_t)));
    double dist = detail::measure_distortion(phi, t_k, c, &budget);
    cert.log_d_achieved = std::max(cert.log_d_achieved, dist);
    prev_t = t_k;
  }
  cert.complete = true;
  return cert;
}

}  // namespace pgn
