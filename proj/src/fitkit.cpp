#include "eratray/fitkit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace eratray {

double triple_log(double x) {
  if (!(x > std::exp(1.0)))
    raise(ErrorCode::DomainError, "triple_log needs x > e");
  return std::log(std::log(std::log(x)));
}

double triple_exp(double x) { return std::exp(std::exp(std::exp(x))); }

int default_pair_count(u64 base) {
  if (base <= 18) return 4;
  if (base <= 64) return 3;
  if (base <= 132) return 2;
  raise(ErrorCode::InvalidArgument,
        "no calibrated pair count beyond base 132; pass an override");
}

std::vector<int> polynomial_degrees(u64 base, int n) {
  std::vector<int> deg(n, 0);
  if (base == 18 && n >= 4) deg[2] = deg[3] = 1;
  if (base == 30 && n >= 3) deg[2] = 1;
  return deg;
}

FitSystem build_fit_system(const Ray& ray, std::optional<int> override_n) {
  const int n = override_n ? *override_n : default_pair_count(ray.base);
  if (n < 1) raise(ErrorCode::InvalidArgument, "pair count must be >= 1");
  const int m = 2 * n;

  const double anchor_threshold = std::exp(std::exp(1.0));
  std::size_t anchor_pos = 0;
  while (anchor_pos < ray.elements.size() &&
         static_cast<double>(ray.elements[anchor_pos]) <= anchor_threshold)
    ++anchor_pos;
  if (anchor_pos + m > ray.elements.size())
    raise(ErrorCode::OutOfRange,
          "ray of base " + std::to_string(ray.base) + " has " +
              std::to_string(ray.elements.size()) +
              " elements; fit needs anchor + " + std::to_string(m));

  FitSystem sys;
  sys.base = ray.base;
  sys.n = n;
  sys.m = m;
  sys.anchor_index = anchor_pos + 1;
  sys.nodes.assign(ray.elements.begin() + anchor_pos,
                   ray.elements.begin() + anchor_pos + m);
  sys.anchor = triple_log(static_cast<double>(sys.nodes[0]));
  sys.poly_degrees = polynomial_degrees(ray.base, n);
  sys.targets.reserve(m);
  for (u64 p : sys.nodes)
    sys.targets.push_back(sys.anchor / triple_log(static_cast<double>(p)));
  return sys;
}

FitSystem build_fit_system(const PrimeTable& table, u64 base,
                           std::optional<int> override_n) {
  const int n = override_n ? *override_n : default_pair_count(base);
  // anchor offset is at most 4 (base 1); extend generously within the table
  const Ray ray =
      extend_ray(table, base, RayLimit::depth(static_cast<u64>(2 * n + 6)));
  return build_fit_system(ray, override_n ? override_n
                                          : std::optional<int>(n));
}

double ExpSumModel::eta(double x) const {
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double q = poly_degrees[k] == 0 ? 1.0 : x;
    const double arg = std::clamp(-beta[k] * x, -700.0, 700.0);
    acc += alpha[k] * q * std::exp(arg);
  }
  return acc;
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

Vec residuals(const FitSystem& sys, const Vec& theta) {
  const int n = sys.n;
  Vec f(sys.m);
  for (int i = 0; i < sys.m; ++i) {
    const double j = i + 1.0;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double q = sys.poly_degrees[k] == 0 ? 1.0 : j;
      const double arg = std::clamp(-theta[n + k] * j, -700.0, 700.0);
      acc += theta[k] * q * std::exp(arg);
    }
    f[i] = acc - sys.targets[i];
  }
  return f;
}

Mat jacobian(const FitSystem& sys, const Vec& theta) {
  const int n = sys.n;
  Mat J(sys.m, 2 * n);
  for (int i = 0; i < sys.m; ++i) {
    const double j = i + 1.0;
    for (int k = 0; k < n; ++k) {
      const double q = sys.poly_degrees[k] == 0 ? 1.0 : j;
      const double arg = std::clamp(-theta[n + k] * j, -700.0, 700.0);
      const double e = std::exp(arg);
      J(i, k) = q * e;
      J(i, n + k) = -theta[k] * q * j * e;
    }
  }
  return J;
}

// Linear amplitudes for fixed decrements (the variable-projection half).
Vec project_alpha(const FitSystem& sys, const Vec& beta) {
  const int n = sys.n;
  Mat M(sys.m, n);
  Vec y(sys.m);
  for (int i = 0; i < sys.m; ++i) {
    const double j = i + 1.0;
    for (int k = 0; k < n; ++k) {
      const double q = sys.poly_degrees[k] == 0 ? 1.0 : j;
      M(i, k) = q * std::exp(std::clamp(-beta[k] * j, -700.0, 700.0));
    }
    y[i] = sys.targets[i];
  }
  return M.colPivHouseholderQr().solve(y);
}

struct LmOutcome {
  Vec theta;
  double residual_max = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

LmOutcome run_lm(const FitSystem& sys, Vec theta, const SolverConfig& config) {
  LmOutcome out;
  Vec f = residuals(sys, theta);
  double lambda = 1e-3;
  int iters = 0;
  for (; iters < config.max_iterations; ++iters) {
    const Mat J = jacobian(sys, theta);
    const Vec g = J.transpose() * f;
    const Mat H = J.transpose() * J;
    bool accepted = false;
    for (int tries = 0; tries < 50; ++tries) {
      Mat damped = H;
      damped.diagonal().array() += lambda;
      const Vec step = damped.ldlt().solve(-g);
      const Vec candidate = theta + step;
      const Vec f2 = residuals(sys, candidate);
      if (f2.allFinite() && f2.squaredNorm() < f.squaredNorm()) {
        theta = candidate;
        f = f2;
        lambda = std::max(lambda * 0.25, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 8.0;
      if (lambda > 1e14) break;
    }
    if (!accepted) break;
    if (f.cwiseAbs().maxCoeff() < 1e-9) break;  // hand over to Newton
  }

  // Undamped Newton on the square system for the last digits.
  for (int i = 0; i < config.polish_iterations; ++i) {
    const Mat J = jacobian(sys, theta);
    const Vec step = J.fullPivLu().solve(-residuals(sys, theta));
    if (!step.allFinite()) break;
    const Vec candidate = theta + step;
    const Vec f2 = residuals(sys, candidate);
    if (!f2.allFinite()) break;
    theta = candidate;
    if (step.cwiseAbs().maxCoeff() <
        1e-15 * std::max(1.0, theta.cwiseAbs().maxCoeff()))
      break;
  }

  out.theta = theta;
  out.residual_max = residuals(sys, theta).cwiseAbs().maxCoeff();
  out.iterations = iters;
  return out;
}

// Exponential interpolation seed: targets satisfying a linear recurrence of
// order n whose characteristic roots are e^{-beta_k}. Only sound when every
// polynomial degree is zero.
std::optional<Vec> prony_beta(const FitSystem& sys) {
  const int n = sys.n;
  Mat H(n, n);
  Vec rhs(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) H(i, k) = sys.targets[i + k];
    rhs[i] = sys.targets[i + n];
  }
  const Vec t = H.fullPivLu().solve(rhs);
  if (!t.allFinite()) return std::nullopt;

  // companion matrix of x^n - t_{n-1} x^{n-1} - ... - t_0
  Mat comp = Mat::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int k = 0; k < n; ++k) comp(k, n - 1) = t[k];

  const Eigen::EigenSolver<Mat> es(comp);
  if (es.info() != Eigen::Success) return std::nullopt;
  Vec beta(n);
  for (int k = 0; k < n; ++k) {
    const std::complex<double> root = es.eigenvalues()[k];
    if (std::abs(root.imag()) > 1e-9 * std::max(1.0, std::abs(root.real())))
      return std::nullopt;
    const double x = root.real();
    if (x <= 0.0 || x >= 1.0) return std::nullopt;
    beta[k] = -std::log(x);
  }
  std::sort(beta.data(), beta.data() + n, std::greater<double>());
  return beta;
}

// Canonical pair order: degree ascending, then beta descending, degrees
// traveling with their pair. Pure systems keep all-zero degrees; the
// polynomial systems keep the (0,..,1,..) shape.
void canonicalize(Vec& theta, std::vector<int>& degrees, int n) {
  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (degrees[a] != degrees[b]) return degrees[a] < degrees[b];
    return theta[n + a] > theta[n + b];
  });
  Vec sorted(2 * n);
  std::vector<int> sorted_deg(n);
  for (int k = 0; k < n; ++k) {
    sorted[k] = theta[order[k]];
    sorted[n + k] = theta[n + order[k]];
    sorted_deg[k] = degrees[order[k]];
  }
  theta = sorted;
  degrees = sorted_deg;
}

bool same_solution(const Vec& a, const Vec& b, double rtol) {
  for (int i = 0; i < a.size(); ++i) {
    const double scale = std::max({1e-9, std::abs(a[i]), std::abs(b[i])});
    if (std::abs(a[i] - b[i]) > rtol * scale) return false;
  }
  return true;
}

}  // namespace

SolveReport solve_fit(const FitSystem& system, const SolverConfig& config) {
  const int n = system.n;
  const bool pure = std::all_of(system.poly_degrees.begin(),
                                system.poly_degrees.end(),
                                [](int d) { return d == 0; });

  struct Seed {
    Vec beta;
    std::string name;
  };
  std::vector<Seed> seeds;
  if (pure) {
    if (auto beta = prony_beta(system)) seeds.push_back({*beta, "prony"});
  }
  // strictly descending combinations from the geometric grid
  {
    std::vector<double> grid(config.grid_levels);
    for (int i = 0; i < config.grid_levels; ++i)
      grid[i] = std::pow(2.0, -i);
    std::vector<int> idx(n);
    for (int k = 0; k < n; ++k) idx[k] = k;
    while (true) {
      Vec beta(n);
      std::string name = "grid:";
      for (int k = 0; k < n; ++k) {
        beta[k] = grid[idx[k]];
        name += (k ? "," : "") + std::to_string(idx[k]);
      }
      seeds.push_back({beta, name});
      int pos = n - 1;
      while (pos >= 0 && idx[pos] == config.grid_levels - (n - pos)) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int k = pos + 1; k < n; ++k) idx[k] = idx[k - 1] + 1;
    }
  }

  SolveReport report;
  report.system = system;
  report.seeds_tried = static_cast<int>(seeds.size());

  double best_residual = std::numeric_limits<double>::infinity();
  for (const Seed& seed : seeds) {
    Vec theta(2 * n);
    const Vec alpha = project_alpha(system, seed.beta);
    for (int k = 0; k < n; ++k) {
      theta[k] = alpha[k];
      theta[n + k] = seed.beta[k];
    }
    LmOutcome lm = run_lm(system, theta, config);
    best_residual = std::min(best_residual, lm.residual_max);
    if (!(lm.residual_max <= config.residual_target)) continue;
    if (!lm.theta.allFinite()) continue;

    const Mat J = jacobian(system, lm.theta);  // at the system-order theta
    std::vector<int> degrees = system.poly_degrees;
    canonicalize(lm.theta, degrees, n);
    bool duplicate = false;
    for (const FitSolution& s : report.solutions) {
      Vec existing(2 * n);
      for (int k = 0; k < n; ++k) {
        existing[k] = s.model.alpha[k];
        existing[n + k] = s.model.beta[k];
      }
      if (same_solution(existing, lm.theta, config.dedup_rtol)) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;

    FitSolution sol;
    sol.model.base = system.base;
    sol.model.n = n;
    sol.model.m = system.m;
    sol.model.anchor_index = system.anchor_index;
    sol.model.anchor = system.anchor;
    sol.model.poly_degrees = degrees;
    sol.model.alpha.assign(lm.theta.data(), lm.theta.data() + n);
    sol.model.beta.assign(lm.theta.data() + n, lm.theta.data() + 2 * n);
    sol.residual_max = lm.residual_max;
    sol.iterations = lm.iterations;
    sol.seed = seed.name;

    const Eigen::JacobiSVD<Mat> svd(J);
    const double smin = svd.singularValues().minCoeff();
    sol.jacobian_condition =
        smin > 0 ? svd.singularValues().maxCoeff() / smin
                 : std::numeric_limits<double>::infinity();

    sol.positive = true;
    for (double v : sol.model.alpha) sol.positive = sol.positive && v > 0;
    for (double v : sol.model.beta) sol.positive = sol.positive && v > 0;
    sol.k_decreasing = true;
    for (int k = 0; k + 1 < n; ++k) {
      if (!(sol.model.alpha[k] > sol.model.alpha[k + 1])) sol.k_decreasing = false;
      if (!(sol.model.beta[k] > sol.model.beta[k + 1])) sol.k_decreasing = false;
    }
    // larger amplitude together with larger decrement, across pairs
    sol.alpha_beta_comonotone = true;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if ((sol.model.alpha[a] - sol.model.alpha[b]) *
                (sol.model.beta[a] - sol.model.beta[b]) < 0)
          sol.alpha_beta_comonotone = false;

    report.solutions.push_back(std::move(sol));
  }

  if (report.solutions.empty())
    raise(ErrorCode::NoConvergence,
          "no solution met residual target " +
              std::to_string(config.residual_target) + "; best max-norm " +
              std::to_string(best_residual));

  std::sort(report.solutions.begin(), report.solutions.end(),
            [](const FitSolution& a, const FitSolution& b) {
              return a.residual_max < b.residual_max;
            });
  if (report.best().jacobian_condition > config.condition_limit)
    raise(ErrorCode::IllConditioned,
          "Jacobian condition " +
              std::to_string(report.best().jacobian_condition) +
              " above limit at the candidate solution");
  return report;
}

double eval_model(const ExpSumModel& model, double x) {
  const double e = model.eta(x);
  if (!(e > 0.0))
    raise(ErrorCode::DomainError, "eta(x) <= 0; approximant undefined");
  return triple_exp(model.anchor / e);
}

Prediction predict_element(const ExpSumModel& model, int j,
                           const SolverConfig& config) {
  if (j < 1 || j > model.m + config.extrapolation_window)
    raise(ErrorCode::DomainError,
          "node index outside [1, m + window] = [1, " +
              std::to_string(model.m + config.extrapolation_window) + "]");
  const double value = eval_model(model, static_cast<double>(j));
  Prediction p;
  p.value = static_cast<u64>(std::llround(value));
  p.extrapolated = j > model.m;
  return p;
}

AccuracyTable accuracy_table(const PrimeTable& table,
                             const std::vector<u64>& bases,
                             const SolverConfig& config) {
  AccuracyTable out;
  std::map<int, double> delta_sum;
  for (u64 base : bases) {
    const FitSystem sys = build_fit_system(table, base);
    const SolveReport report = solve_fit(sys, config);
    const ExpSumModel& model = report.best().model;

    AccuracyRow row;
    row.base = base;
    row.n = sys.n;
    row.residual = report.best().residual_max;
    for (int j = 1; j <= sys.m; ++j)
      if (predict_element(model, j, config).value == sys.nodes[j - 1])
        ++row.exact_nodes;

    // truth at anchored j = m + 1, i.e. ray position anchor_index + m
    const Ray deep = extend_ray(
        table, base, RayLimit::depth(sys.anchor_index + sys.m));
    if (deep.elements.size() >= sys.anchor_index + sys.m) {
      row.has_truth = true;
      row.truth = deep.elements[sys.anchor_index + sys.m - 1];
      row.predicted = predict_element(model, sys.m + 1, config).value;
      row.delta = std::abs(static_cast<double>(row.truth) -
                           static_cast<double>(row.predicted)) /
                  static_cast<double>(row.truth);
      delta_sum[sys.n] += row.delta;
      ++out.rows_with_truth[sys.n];
    }
    out.rows.push_back(row);
  }
  for (const auto& [n, count] : out.rows_with_truth)
    out.mean_delta[n] = delta_sum[n] / static_cast<double>(count);
  return out;
}

// --- logarithmic integral ---------------------------------------------------

namespace {

// Gauss-Kronrod 15-point pair on [-1, 1].
constexpr double kKronrodNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,
    0.741531185599394,  0.864864423359769,  0.949107912342759,
    0.991455371120813};
constexpr double kKronrodWeights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kGaussWeights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct Panel {
  double a, b;
};

double gk15(double a, double b, double& error) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double t = mid + half * kKronrodNodes[i];
    const double f = 1.0 / std::log(t);
    kron += kKronrodWeights[i] * f;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * f;
  }
  kron *= half;
  gauss *= half;
  error = std::abs(kron - gauss);
  return kron;
}

}  // namespace

double li_eval(double x) {
  if (!(x >= 2.0)) raise(ErrorCode::DomainError, "li domain is x >= 2");
  if (x == 2.0) return 0.0;

  constexpr double kRelTol = 1e-12;
  double total = 0.0;
  std::vector<Panel> stack{{2.0, x}};
  // single-panel estimate scales the absolute tolerance; an extra factor
  // of 10 absorbs its own error
  double scale_err = 0.0;
  const double rough = gk15(2.0, x, scale_err);
  const double tol_abs = std::max(std::abs(rough) * kRelTol * 0.1, 1e-15);

  int depth_guard = 0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    double err = 0.0;
    const double val = gk15(p.a, p.b, err);
    const double local_tol = tol_abs * (p.b - p.a) / (x - 2.0);
    if (err <= std::max(local_tol, 1e-16 * std::abs(val)) ||
        (p.b - p.a) < 1e-12 * x) {
      total += val;
    } else {
      if (++depth_guard > 1'000'000)
        raise(ErrorCode::ResourceLimit, "li quadrature failed to converge");
      const double mid = 0.5 * (p.a + p.b);
      stack.push_back({p.a, mid});
      stack.push_back({mid, p.b});
    }
  }
  return total;
}

double li_invert(double y) {
  if (!(y >= 0.0)) raise(ErrorCode::DomainError, "li_invert domain is y >= 0");
  if (y == 0.0) return 2.0;

  // starting guess from the inverse prime-counting shape y (ln y + ln ln y)
  double x;
  if (y < 6.0) {
    x = 10.0;
  } else {
    const double ln = std::log(y);
    x = y * (ln + std::log(ln));
  }
  double lo = 2.0, hi = std::max(x * 4.0, 16.0);
  while (li_eval(hi) < y) {
    lo = hi;
    hi *= 4.0;
  }
  x = std::clamp(x, lo, hi);

  for (int i = 0; i < 200; ++i) {
    const double f = li_eval(x) - y;
    if (f > 0)
      hi = std::min(hi, x);
    else
      lo = std::max(lo, x);
    const double step = f * std::log(x);
    double next = x - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-13 * std::max(1.0, std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

std::vector<PredictorComparison> conjecture1_experiment(
    const PrimeTable& table, u64 base, const SolverConfig& config,
    int word_digits) {
  const FitSystem sys = build_fit_system(table, base);
  const SolveReport report = solve_fit(sys, config);
  const ExpSumModel& model = report.best().model;

  std::vector<PredictorComparison> rows;

  // anchored extrapolation target j = m + 1
  const Ray deep =
      extend_ray(table, base, RayLimit::depth(sys.anchor_index + sys.m));
  if (deep.elements.size() >= sys.anchor_index + sys.m) {
    PredictorComparison row;
    row.base = base;
    row.anchored = true;
    row.index = static_cast<u64>(sys.m + 1);
    row.truth = deep.elements[sys.anchor_index + sys.m - 1];
    row.expsum_prediction = eval_model(model, sys.m + 1);
    row.expsum_rel_error =
        std::abs(*row.expsum_prediction - static_cast<double>(row.truth)) /
        static_cast<double>(row.truth);
    row.li_prediction = li_invert(static_cast<double>(sys.nodes.back()));
    row.li_rel_error =
        std::abs(row.li_prediction - static_cast<double>(row.truth)) /
        static_cast<double>(row.truth);
    row.word_digits = word_digits;
    rows.push_back(row);
  }

  // last fitted node in natural indexing, inverse-li fed by its predecessor
  {
    const u64 natural = sys.anchor_index + sys.m - 1;
    PredictorComparison row;
    row.base = base;
    row.anchored = false;
    row.index = natural;
    row.truth = sys.nodes.back();
    row.expsum_prediction = eval_model(model, sys.m);
    row.expsum_rel_error =
        std::abs(*row.expsum_prediction - static_cast<double>(row.truth)) /
        static_cast<double>(row.truth);
    row.li_prediction =
        li_invert(static_cast<double>(sys.nodes[sys.m - 2]));
    row.li_rel_error =
        std::abs(row.li_prediction - static_cast<double>(row.truth)) /
        static_cast<double>(row.truth);
    row.word_digits = word_digits;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace eratray
