#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pgn/errors.hpp"
#include "pgn/numeric.hpp"

namespace pgn {

// Closed-form dimension values and threshold constants for the sets of
// badly / exactly approximable matrices at lower order tau. tau = +inf is a
// first-class value (Liouville regime); (m+n)/(1+tau) then contributes 0.
struct DimReport {
  int m = 0, n = 0;
  double tau = 0;  // may be +inf
  double hausdorff_bad = 0;   // (n-1)m + (m+n)/(1+tau)
  double packing_bad = 0;     // mn
  std::optional<double> exact_lower_a;  // m(n-1) + (m+1)/(1+tau)
  std::optional<double> exact_lower_b;  // m(n-1), with packing dimension mn
  std::optional<double> remark_bound;   // m(n-1) + 2/(tau+1)
  double theta = 0;           // max(n+1, m+2)/m
  double resm_threshold = 0;  // (5+sqrt(17))/2, the m=1 entry
  double resm_limit = 0;      // (3+sqrt(5))/2
  struct Applicability {
    std::string bound;
    bool applies = false;
    std::string condition;
  };
  std::vector<Applicability> applicability;
};

inline DimReport dim_formulas(int m, int n, double tau, bool phi_decreasing) {
  if (m < 1 || n < 1) fail(ErrorCode::invalid_param, "need m, n >= 1");
  double critical = static_cast<double>(n) / m;
  if (!(tau >= critical - 1e-15)) fail(ErrorCode::invalid_param, "tau below n/m");
  DimReport r;
  r.m = m;
  r.n = n;
  r.tau = tau;
  double order_term = std::isinf(tau) ? 0.0 : (m + n) / (1.0 + tau);
  r.hausdorff_bad = (n - 1.0) * m + order_term;
  r.packing_bad = static_cast<double>(m) * n;
  r.theta = static_cast<double>(std::max(n + 1, m + 2)) / m;
  r.resm_threshold = (5.0 + std::sqrt(17.0)) / 2.0;
  r.resm_limit = (3.0 + std::sqrt(5.0)) / 2.0;

  bool a_ok = tau > r.theta && phi_decreasing;
  r.applicability.push_back({"exact_lower_a", a_ok, "tau > theta and Phi decreasing"});
  if (a_ok) r.exact_lower_a = m * (n - 1.0) + (std::isinf(tau) ? 0.0 : (m + 1) / (1.0 + tau));

  bool b_ok = tau > std::max(r.theta, r.resm_threshold);
  r.applicability.push_back({"exact_lower_b", b_ok, "tau > max(theta, (5+sqrt(17))/2)"});
  if (b_ok) r.exact_lower_b = m * (n - 1.0);

  bool rem_ok = tau > r.theta;
  r.applicability.push_back(
      {"remark_bound", rem_ok, "tau > theta and the quasi power-growth condition (not checked here)"});
  if (rem_ok) r.remark_bound = m * (n - 1.0) + (std::isinf(tau) ? 0.0 : 2.0 / (tau + 1.0));

  return r;
}

}  // namespace pgn
