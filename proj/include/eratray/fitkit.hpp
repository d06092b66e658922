#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eratray/rays.hpp"

namespace eratray {

// ln ln ln x; defined for x > e, positive for x > e^e.
double triple_log(double x);
double triple_exp(double x);

// Bracketed exponential pair counts per base: 4 up to 18, 3 up to 64,
// 2 up to 132. Larger bases need an explicit override.
int default_pair_count(u64 base);

// Per-term polynomial degrees of q_k: all zero except (0,0,1,1) for base 18
// and (0,0,1) for base 30.
std::vector<int> polynomial_degrees(u64 base, int n);

// The square system: n amplitude/decrement pairs fitted through m = 2n
// targets y_j = A / lnlnln(p_j), where p_1..p_m are consecutive ray
// elements starting at the anchor (the first element above e^e) and
// A = lnlnln(p_1), so y_1 = 1.
struct FitSystem {
  u64 base = 0;
  int n = 0;
  int m = 0;
  u64 anchor_index = 0;  // 1-based ray position of nodes[0]
  double anchor = 0.0;   // A
  std::vector<u64> nodes;
  std::vector<double> targets;
  std::vector<int> poly_degrees;
};

FitSystem build_fit_system(const Ray& ray, std::optional<int> override_n = {});
FitSystem build_fit_system(const PrimeTable& table, u64 base,
                           std::optional<int> override_n = {});

// Fitted coefficients, canonical order beta descending.
struct ExpSumModel {
  u64 base = 0;
  int n = 0;
  int m = 0;
  u64 anchor_index = 0;
  double anchor = 0.0;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<int> poly_degrees;

  double eta(double x) const;
};

struct SolverConfig {
  double residual_target = 1e-12;  // max-norm over the m equations
  int max_iterations = 400;
  int polish_iterations = 60;
  int grid_levels = 9;             // beta seeds from {2^0 .. 2^-(levels-1)}
  double dedup_rtol = 1e-6;
  double condition_limit = 1e15;
  int extrapolation_window = 1;    // predict up to j = m + window
};

struct FitSolution {
  ExpSumModel model;
  double residual_max = 0.0;
  int iterations = 0;
  std::string seed;  // provenance: "prony" or "grid:<levels>"
  double jacobian_condition = 0.0;
  // solution-shape flags, recorded but never asserted here
  bool positive = false;
  bool k_decreasing = false;       // alpha and beta both decrease in k
  bool alpha_beta_comonotone = false;
};

struct SolveReport {
  FitSystem system;
  std::vector<FitSolution> solutions;  // deduplicated, best first
  int seeds_tried = 0;

  const FitSolution& best() const { return solutions.front(); }
};

// Damped Gauss-Newton multistart over deterministic seeds (one Prony seed
// for pure-exponential systems plus the descending beta grid), followed by
// undamped Newton polishing. Throws NoConvergence when nothing meets the
// target, IllConditioned when the best candidate's Jacobian is unusable.
SolveReport solve_fit(const FitSystem& system, const SolverConfig& config = {});

// The continuous approximant: triple-exp of A / eta(x).
double eval_model(const ExpSumModel& model, double x);

// Nearest integer (half away from zero) of eval_model at node j;
// j may exceed m by at most the configured extrapolation window.
struct Prediction {
  u64 value = 0;
  bool extrapolated = false;
};
Prediction predict_element(const ExpSumModel& model, int j,
                           const SolverConfig& config = {});

// Relative error of the extrapolated element against ray truth, per base.
struct AccuracyRow {
  u64 base = 0;
  int n = 0;
  double residual = 0.0;
  int exact_nodes = 0;   // nodes reproduced exactly after rounding
  bool has_truth = false;
  u64 truth = 0;
  u64 predicted = 0;
  double delta = 0.0;    // |truth - predicted| / truth
};

struct AccuracyTable {
  std::vector<AccuracyRow> rows;
  std::map<int, double> mean_delta;      // per pair count, rows with truth
  std::map<int, std::size_t> rows_with_truth;
};

AccuracyTable accuracy_table(const PrimeTable& table,
                             const std::vector<u64>& bases,
                             const SolverConfig& config = {});

// Offset logarithmic integral: adaptive Gauss-Kronrod over [2, x],
// relative tolerance 1e-12.
double li_eval(double x);
// Unique x >= 2 with li(x) = y; Newton with derivative 1/ln x and a
// bisection fallback.
double li_invert(double y);

// Side-by-side error of the exponential-sum extrapolation and the
// inverse-li predictor. Rows come in both indexings: the anchored j = m+1
// extrapolation, and the last fitted node in natural ray indexing with the
// inverse-li fed by its predecessor.
struct PredictorComparison {
  u64 base = 0;
  bool anchored = false;
  u64 index = 0;  // anchored j or natural ray position
  u64 truth = 0;
  std::optional<double> expsum_prediction;
  std::optional<double> expsum_rel_error;
  double li_prediction = 0.0;
  double li_rel_error = 0.0;
  int word_digits = 15;  // floating word length used by the solver
};

std::vector<PredictorComparison> conjecture1_experiment(
    const PrimeTable& table, u64 base, const SolverConfig& config = {},
    int word_digits = 15);

}  // namespace eratray
