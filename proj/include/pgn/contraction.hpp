#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "pgn/template.hpp"

namespace pgn {

// Piecewise constant local contraction rate of a template with excursions:
// mn - m on the descending legs (b_k, q_k), mn everywhere else. Stored by
// breakpoints so running averages are closed-form.
struct ContractionProfile {
  int m = 0, n = 0;
  std::vector<double> breakpoints;  // 0, b_1, q_1, c_1, b_2, ...
  std::vector<int> rate;            // per piece between consecutive breakpoints
  std::vector<double> cumulative;   // integral of the rate up to each breakpoint
};

inline ContractionProfile contraction_profile(const ClassCTemplate& T) {
  ContractionProfile P;
  P.m = T.m;
  P.n = T.n;
  int mn = T.m * T.n;
  P.breakpoints.push_back(0.0);
  for (auto& e : T.exc) {
    P.breakpoints.push_back(e.b);
    P.rate.push_back(mn);  // flat zone (or previous ascent tail) up to b_k
    P.breakpoints.push_back(e.q);
    P.rate.push_back(mn - T.m);  // descending leg
    P.breakpoints.push_back(e.c);
    P.rate.push_back(mn);  // ascending leg
  }
  P.cumulative.assign(P.breakpoints.size(), 0.0);
  for (std::size_t i = 1; i < P.breakpoints.size(); ++i)
    P.cumulative[i] = P.cumulative[i - 1] + P.rate[i - 1] * (P.breakpoints[i] - P.breakpoints[i - 1]);
  return P;
}

// Right-limit convention at breakpoints.
inline int local_rate(const ClassCTemplate& T, double q) {
  if (q < 0) fail(ErrorCode::invalid_param, "need q >= 0");
  int mn = T.m * T.n;
  auto it = std::upper_bound(T.exc.begin(), T.exc.end(), q,
                             [](double v, const ClassCTemplate::Excursion& e) { return v < e.b; });
  if (it == T.exc.begin()) return mn;
  const auto& e = *(it - 1);
  return (q >= e.b && q < e.q) ? mn - T.m : mn;
}

// Average rate (1/Q) int_0^Q delta; defined up to the last breakpoint only.
inline double average_rate(const ContractionProfile& P, double Q) {
  if (!(Q > 0)) fail(ErrorCode::invalid_param, "need Q > 0");
  if (Q > P.breakpoints.back() + 1e-9 * std::max(1.0, P.breakpoints.back()))
    fail(ErrorCode::out_of_range, "Q beyond the last derived breakpoint");
  auto it = std::upper_bound(P.breakpoints.begin(), P.breakpoints.end(), Q);
  std::size_t i = static_cast<std::size_t>(it - P.breakpoints.begin());
  if (i >= P.breakpoints.size()) i = P.breakpoints.size() - 1;
  double integral = P.cumulative[i - 1] + P.rate[std::min(i - 1, P.rate.size() - 1)] * (Q - P.breakpoints[i - 1]);
  return integral / Q;
}

inline double average_rate(const ClassCTemplate& T, double Q) {
  return average_rate(contraction_profile(T), Q);
}

struct LimitEstimates {
  std::vector<double> liminf_seq;   // running average at each q_k
  std::vector<double> limsup_seq;   // running average at each b_k
  double closed_form_liminf = 0;    // (n-1)m + (m+n)/(1+tau)
  double closed_form_limsup = 0;    // mn
  double tau_used = 0;
  double final_liminf_gap = 0;
  double final_limsup_gap = 0;
};

inline LimitEstimates limit_estimates(const ClassCTemplate& T,
                                      std::optional<double> tau_override = std::nullopt) {
  if (T.exc.size() < 3) fail(ErrorCode::invalid_param, "need at least 3 excursions");
  std::optional<double> tau = tau_override ? tau_override : T.tau;
  if (!tau) fail(ErrorCode::tau_unknown, "no analytic or supplied lower order");
  auto P = contraction_profile(T);
  LimitEstimates est;
  est.tau_used = *tau;
  for (auto& e : T.exc) {
    est.liminf_seq.push_back(average_rate(P, e.q));
    est.limsup_seq.push_back(average_rate(P, e.b));
  }
  double m = T.m, n = T.n;
  est.closed_form_liminf = std::isinf(*tau) ? (n - 1) * m : (n - 1) * m + (m + n) / (1 + *tau);
  est.closed_form_limsup = m * n;
  est.final_liminf_gap = std::fabs(est.liminf_seq.back() - est.closed_form_liminf);
  est.final_limsup_gap = std::fabs(est.limsup_seq.back() - est.closed_form_limsup);
  return est;
}

struct UkSequence {
  std::vector<double> u;               // b_k / q_k per excursion
  std::optional<double> closed_form;   // (m+n)/(m(tau+1)) when tau is known
};

inline UkSequence u_k_sequence(const ClassCTemplate& T, std::optional<double> tau_override = std::nullopt) {
  UkSequence out;
  for (auto& e : T.exc) out.u.push_back(e.b / e.q);
  std::optional<double> tau = tau_override ? tau_override : T.tau;
  if (tau) out.closed_form = std::isinf(*tau) ? 0.0 : (T.m + T.n) / (T.m * (*tau + 1));
  return out;
}

// The slope-pattern bookkeeping behind the rate values, exposed for
// inspection: partition of {1, ..., m+n} and the pair count
// #{(i+, i-) : i+ in S+, i- in S-, i+ < i-} on each interval type.
enum class IntervalKind { flat, descent, ascent };

struct SlopePartition {
  std::vector<std::vector<int>> equivalence;  // intervals of equivalence
  std::vector<int> s_plus;
  std::vector<int> s_minus;
  int cardinality = 0;
};

inline SlopePartition slope_partition(int m, int n, IntervalKind kind) {
  SlopePartition sp;
  int d = m + n;
  auto range = [](int lo, int hi) {
    std::vector<int> v;
    for (int i = lo; i <= hi; ++i) v.push_back(i);
    return v;
  };
  switch (kind) {
    case IntervalKind::flat:
      sp.equivalence = {range(1, d)};
      sp.s_minus = range(m + 1, d);
      sp.s_plus = range(1, m);
      break;
    case IntervalKind::descent:
      sp.equivalence = {range(1, 1), range(2, d)};
      sp.s_minus = {1};
      for (int i = m + 2; i <= d; ++i) sp.s_minus.push_back(i);
      sp.s_plus = range(2, m + 1);
      break;
    case IntervalKind::ascent:
      sp.equivalence = {range(1, d - 1), range(d, d)};
      sp.s_minus = range(m + 1, d);
      sp.s_plus = range(1, m);
      break;
  }
  for (int a : sp.s_plus)
    for (int b : sp.s_minus)
      if (a < b) ++sp.cardinality;
  return sp;
}

}  // namespace pgn
