#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>
#include <vector>

#include "pgn/lattice.hpp"

namespace pgn {

// Piecewise linear trajectory of one integer vector:
//   max( log|q| - x/n , log|Aq-p| + x/m ).
// Slope -1/n then 1/m, vertex where the two branches meet.
inline double trajectory(const MatrixA& A, const LatticeVector& v, double x) {
  if (detail::inf_norm(v.q) == 0) fail(ErrorCode::zero_first_block, "trajectory needs q != 0");
  double lf = std::log(v.first_norm);
  return std::max(lf - x / A.n(), v.log_second + x / A.m());
}

struct TrajectoryVertex {
  double x = 0;      // abscissa where the branches meet
  double value = 0;  // (m log|q| + n log|Aq-p|) / (m+n)
};

inline TrajectoryVertex trajectory_vertex(const MatrixA& A, const LatticeVector& v) {
  if (detail::inf_norm(v.q) == 0) fail(ErrorCode::zero_first_block, "trajectory needs q != 0");
  double m = A.m(), n = A.n();
  double lf = std::log(v.first_norm);
  TrajectoryVertex out;
  out.x = m * n / (m + n) * (lf - v.log_second);
  out.value = (m * lf + n * v.log_second) / (m + n);
  return out;
}

// Sampled successive-minima functions plus the refined local minima of h_1.
// The graph coordinate q drives the unit-covolume flow
// diag(e^{-q/n} I_n, e^{q/m} I_m): h_j(q) = log lambda_j at box parameter
// Q = e^{q/n}. This is the parametrization under which trajectories have
// slopes -1/n and 1/m and h_j(0) = 0.
struct CombinedGraph {
  int m = 0, n = 0;
  Backend backend = Backend::exact;
  std::vector<double> grid;
  std::vector<std::vector<double>> values;  // grid.size() x (m+n)

  struct Minimum {
    double r = 0;        // refined abscissa (trajectory vertex of the witness)
    double h1_at_r = 0;  // refined value
    LatticeVector witness;
  };
  std::vector<Minimum> minima;
  double slope_tol = 0;  // secant-slope slack implied by the backend error bound
};

struct GraphOptions {
  long long budget = 100'000'000;
  int threads = 1;
};

inline CombinedGraph combined_graph(const MatrixA& A, double q_max, double step, Backend backend,
                                    const GraphOptions& opts = {}) {
  if (!(step > 0 && step <= 0.25)) fail(ErrorCode::invalid_param, "need 0 < step <= 0.25");
  if (q_max < step) fail(ErrorCode::invalid_param, "need q_max >= step");
  CombinedGraph g;
  g.m = A.m();
  g.n = A.n();
  g.backend = backend;
  int count = static_cast<int>(std::floor(q_max / step + 1e-9)) + 1;
  g.grid.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g.grid[static_cast<std::size_t>(i)] = i * step;
  g.values.assign(static_cast<std::size_t>(count), {});
  std::vector<SuccessiveMinima> mins(static_cast<std::size_t>(count));

  LatticeOptions lat{opts.budget};
  double to_log_q = 1.0 / A.n();  // graph coordinate -> box parameter
  int threads = std::max(1, opts.threads);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) mins[static_cast<std::size_t>(i)] = successive_minima(A, g.grid[static_cast<std::size_t>(i)] * to_log_q, backend, lat);
  } else {
    std::exception_ptr err;
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::mutex err_mx;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (;;) {
          int i = next.fetch_add(1);
          if (i >= count) return;
          try {
            mins[static_cast<std::size_t>(i)] = successive_minima(A, g.grid[static_cast<std::size_t>(i)] * to_log_q, backend, lat);
          } catch (...) {
            std::lock_guard<std::mutex> lk(err_mx);
            if (!err) err = std::current_exception();
            return;
          }
        }
      });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }

  for (int i = 0; i < count; ++i) g.values[static_cast<std::size_t>(i)] = mins[static_cast<std::size_t>(i)].log_lambda;

  // grid local minima of h_1, refined through the witness vertex
  auto h1 = [&](int i) { return g.values[static_cast<std::size_t>(i)][0]; };
  for (int i = 1; i + 1 < count; ++i) {
    if (!(h1(i - 1) > h1(i) && h1(i) <= h1(i + 1))) continue;
    const auto& w = mins[static_cast<std::size_t>(i)].witnesses[0];
    if (detail::inf_norm(w.q) == 0 || w.log_second == kNegInf) continue;  // no finite vertex
    auto v = trajectory_vertex(A, w);
    CombinedGraph::Minimum mrec;
    mrec.r = v.x;
    mrec.h1_at_r = v.value;
    mrec.witness = w;
    bool dup = false;
    for (auto& prev : g.minima)
      if (prev.witness.q == mrec.witness.q && prev.witness.p == mrec.witness.p) dup = true;
    if (!dup) g.minima.push_back(std::move(mrec));
  }
  std::sort(g.minima.begin(), g.minima.end(),
            [](const CombinedGraph::Minimum& a, const CombinedGraph::Minimum& b) { return a.r < b.r; });

  double err_bound = backend == Backend::exact ? 1e-12 : (g.m + g.n) * M_LN2;
  g.slope_tol = 2.0 * err_bound / step;
  return g;
}

}  // namespace pgn
