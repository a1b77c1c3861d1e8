#ifndef SHB_PROBLEMS_HPP
#define SHB_PROBLEMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "shb/common.hpp"

namespace shb {

// One summand f_i of the finite-sum objective. value(x) >= lower_bound must
// hold everywhere; smoothness is the Lipschitz constant of the gradient when
// known in closed form.
struct Component {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lower_bound = 0.0;
  std::optional<double> smoothness{};
};

struct ProblemMetadata {
  Vector x_star;
  double f_star = 0.0;
  double l_max = 0.0;                  // max_i L_i
  std::optional<double> mu{};          // strong-convexity constant of f
  std::optional<double> l_full{};      // smoothness constant of f itself
  std::optional<double> sigma2{};      // optimal objective difference
  bool interpolated = false;
  bool approximate = false;            // reference solve hit its iteration cap
  double achieved_grad_norm = 0.0;
};

enum class ProblemFamily { custom, least_squares, logistic };

// f(x) = (1/n) sum_i f_i(x). Immutable after construction; safe to share
// across concurrently executing runs.
struct FiniteSumProblem {
  int dim = 0;
  std::vector<Component> components;
  std::optional<ProblemMetadata> metadata{};

  // Filled by the generators / loaders so the problem can be serialized and
  // re-derived; empty for hand-built component lists.
  ProblemFamily family = ProblemFamily::custom;
  Matrix data;     // row i holds a_i
  Vector targets;  // b (least squares) or labels y (logistic)

  int n() const { return static_cast<int>(components.size()); }
};

struct BatchEval {
  double value = 0.0;
  Vector gradient;
  double lower_bound = 0.0;
};

// Mini-batch gradient oracle: arithmetic means over the batch, accumulated in
// ascending index order so that a full batch reproduces full_objective
// bit-for-bit. Indices must be valid and ascending.
inline BatchEval evaluate_batch(const FiniteSumProblem& problem,
                                const std::vector<int>& batch,
                                const Vector& x) {
  BatchEval out;
  out.gradient = Vector::Zero(problem.dim);
  for (int i : batch) {
    const Component& comp = problem.components.at(static_cast<std::size_t>(i));
    const double v = comp.value(x);
    if (!std::isfinite(v)) {
      throw numerical_error("non-finite component value", i);
    }
    Vector g = comp.gradient(x);
    if (!g.allFinite()) {
      throw numerical_error("non-finite component gradient", i);
    }
    out.value += v;
    out.gradient += g;
    out.lower_bound += comp.lower_bound;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.value *= inv;
  out.gradient *= inv;
  out.lower_bound *= inv;
  return out;
}

// Exact mean of all component values; used for trajectory metrics, not inside
// the optimizer loop (unless B = n, where it coincides with evaluate_batch).
inline double full_objective(const FiniteSumProblem& problem, const Vector& x) {
  double acc = 0.0;
  for (int i = 0; i < problem.n(); ++i) {
    const double v = problem.components[static_cast<std::size_t>(i)].value(x);
    if (!std::isfinite(v)) {
      throw numerical_error("non-finite component value", i);
    }
    acc += v;
  }
  return acc / static_cast<double>(problem.n());
}

inline double mean_lower_bound(const FiniteSumProblem& problem) {
  double acc = 0.0;
  for (const Component& c : problem.components) acc += c.lower_bound;
  return acc / static_cast<double>(problem.n());
}

namespace detail {

// Thin Q factor (rows x cols, orthonormal columns) of a Gaussian matrix.
inline Matrix random_orthonormal(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  return q;
}

inline Vector random_gaussian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

// Numerically stable log(1 + exp(u)).
inline double softplus(double u) {
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

inline double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

inline void attach_least_squares_components(FiniteSumProblem& p) {
  const int n = static_cast<int>(p.data.rows());
  p.components.clear();
  p.components.reserve(static_cast<std::size_t>(n));
  const double scale = static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    Vector a = p.data.row(i).transpose();
    const double b = p.targets(i);
    Component c;
    c.value = [a, b, scale](const Vector& x) {
      const double r = a.dot(x) - b;
      return 0.5 * scale * r * r;
    };
    c.gradient = [a, b, scale](const Vector& x) {
      const double r = a.dot(x) - b;
      return Vector(scale * r * a);
    };
    c.lower_bound = 0.0;
    c.smoothness = scale * a.squaredNorm();
    p.components.push_back(std::move(c));
  }
}

inline void attach_logistic_components(FiniteSumProblem& p) {
  const int n = static_cast<int>(p.data.rows());
  p.components.clear();
  p.components.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vector a = p.data.row(i).transpose();
    const double y = p.targets(i);
    Component c;
    c.value = [a, y](const Vector& x) { return softplus(-y * a.dot(x)); };
    c.gradient = [a, y](const Vector& x) {
      return Vector(-y * sigmoid(-y * a.dot(x)) * a);
    };
    c.lower_bound = 0.0;
    c.smoothness = 0.25 * a.squaredNorm();
    p.components.push_back(std::move(c));
  }
}

}  // namespace detail

// Least squares f(x) = (1/2)||Ax - b||^2 written as a finite sum with
// f_i(x) = (n/2)(a_i^T x - b_i)^2 so the mean equals the classic objective.
// A = U S V^T with random orthogonal factors and log-uniformly spaced
// singular values, giving cond(A^T A) = cond_ata by construction. When
// consistent, b = A x_gen (interpolated, f* = 0); otherwise b is perturbed
// by Gaussian noise of scale noise_std.
inline FiniteSumProblem generate_least_squares(int n, int d, double cond_ata,
                                               bool consistent,
                                               std::uint64_t seed,
                                               double noise_std = 0.1) {
  if (n < 1 || d < 1) throw config_error("least squares requires n, d >= 1");
  if (cond_ata < 1.0) throw config_error("cond_ata must be >= 1");
  std::mt19937_64 rng(mix_seed(seed, 0));

  const int r = std::min(n, d);
  Matrix u = detail::random_orthonormal(n, r, rng);
  Matrix v = detail::random_orthonormal(d, r, rng);
  Vector sv(r);
  for (int j = 0; j < r; ++j) {
    const double frac = (r > 1) ? static_cast<double>(j) / (r - 1) : 0.0;
    sv(j) = std::pow(cond_ata, -0.5 * frac);  // sigma_0 = 1 down to cond^{-1/2}
  }

  FiniteSumProblem p;
  p.dim = d;
  p.family = ProblemFamily::least_squares;
  p.data = u * sv.asDiagonal() * v.transpose();

  Vector x_gen = detail::random_gaussian(d, rng);
  p.targets = p.data * x_gen;
  if (!consistent) p.targets += noise_std * detail::random_gaussian(n, rng);

  detail::attach_least_squares_components(p);

  // Minimum-norm solution through the constructed factorization.
  ProblemMetadata meta;
  meta.x_star = v * sv.cwiseInverse().asDiagonal() * (u.transpose() * p.targets);
  meta.f_star = 0.5 * (p.data * meta.x_star - p.targets).squaredNorm();
  double l_max = 0.0;
  for (const Component& c : p.components) l_max = std::max(l_max, *c.smoothness);
  meta.l_max = l_max;
  meta.l_full = sv(0) * sv(0);
  if (r == d) meta.mu = sv(r - 1) * sv(r - 1);
  meta.sigma2 = meta.f_star;  // lower bounds are zero, so sigma^2 = f(x*)
  meta.interpolated = meta.f_star <= 1e-12;
  p.metadata = std::move(meta);
  return p;
}

// Binary logistic regression f_i(x) = log(1 + exp(-y_i a_i^T x)) with
// l_i* = 0 and L_i = ||a_i||^2 / 4. Both modes push the classes one unit
// away from a random hyperplane; the non-separable mode then flips 5% of the
// labels, so the classes overlap and the optimal loss stays positive.
inline FiniteSumProblem generate_logistic(int n, int d, bool separable,
                                          std::uint64_t seed) {
  if (n < 1 || d < 1) throw config_error("logistic requires n, d >= 1");
  std::mt19937_64 rng(mix_seed(seed, 1));
  Vector w = detail::random_gaussian(d, rng);
  w.normalize();

  FiniteSumProblem p;
  p.dim = d;
  p.family = ProblemFamily::logistic;
  p.data.resize(n, d);
  p.targets.resize(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    Vector a = detail::random_gaussian(d, rng);
    double y = (a.dot(w) >= 0.0) ? 1.0 : -1.0;
    a += y * w;
    if (!separable && unif(rng) < 0.05) y = -y;
    p.data.row(i) = a.transpose();
    p.targets(i) = y;
  }
  detail::attach_logistic_components(p);
  return p;
}

// Reference quantities. Least-squares problems get the closed-form
// minimum-norm solve; everything else runs full-batch descent with the
// Polyak-type step min{(f - l*)/||g||^2, cap} until ||grad f|| <= tol. The
// cap keeps the quotient from exploding once f's own infimum exceeds the
// lower bound; without component smoothness constants it is found by
// halving on objective increase.
inline ProblemMetadata solve_reference(const FiniteSumProblem& problem,
                                       double grad_tol = 1e-12,
                                       long max_iterations = 1000000) {
  if (problem.family == ProblemFamily::least_squares && problem.data.size() > 0) {
    Eigen::JacobiSVD<Matrix> svd(problem.data,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    ProblemMetadata meta;
    meta.x_star = svd.solve(problem.targets);
    meta.f_star = 0.5 * (problem.data * meta.x_star - problem.targets).squaredNorm();
    double l_max = 0.0;
    for (const Component& c : problem.components)
      l_max = std::max(l_max, c.smoothness.value_or(0.0));
    meta.l_max = l_max;
    const auto& sv = svd.singularValues();
    meta.l_full = sv(0) * sv(0);
    if (svd.rank() == problem.dim) meta.mu = sv(sv.size() - 1) * sv(sv.size() - 1);
    meta.sigma2 = meta.f_star - mean_lower_bound(problem);
    meta.interpolated = meta.f_star <= 1e-12;
    return meta;
  }

  const double lb = mean_lower_bound(problem);
  bool have_smoothness = true;
  double l_mean = 0.0;
  double l_max = 0.0;
  for (const Component& c : problem.components) {
    if (!c.smoothness) {
      have_smoothness = false;
      break;
    }
    l_mean += *c.smoothness;
    l_max = std::max(l_max, *c.smoothness);
  }
  l_mean /= static_cast<double>(problem.n());
  double cap = have_smoothness ? 1.0 / l_mean : 1.0;

  Vector x = Vector::Zero(problem.dim);
  std::vector<int> all(static_cast<std::size_t>(problem.n()));
  for (int i = 0; i < problem.n(); ++i) all[static_cast<std::size_t>(i)] = i;

  BatchEval eval = evaluate_batch(problem, all, x);
  long it = 0;
  for (; it < max_iterations; ++it) {
    const double g2 = eval.gradient.squaredNorm();
    if (std::sqrt(g2) <= grad_tol) break;
    double gamma = std::min((eval.value - lb) / g2, cap);
    Vector x_next = x - gamma * eval.gradient;
    BatchEval next = evaluate_batch(problem, all, x_next);
    if (!have_smoothness) {
      int halvings = 0;
      while (next.value > eval.value && halvings < 60) {
        cap *= 0.5;
        gamma = std::min(gamma, cap);
        x_next = x - gamma * eval.gradient;
        next = evaluate_batch(problem, all, x_next);
        ++halvings;
      }
    }
    x = std::move(x_next);
    eval = std::move(next);
  }

  ProblemMetadata meta;
  meta.x_star = x;
  meta.f_star = eval.value;
  meta.l_max = l_max;
  meta.achieved_grad_norm = eval.gradient.norm();
  meta.approximate = it >= max_iterations;
  meta.sigma2 = meta.f_star - lb;
  meta.interpolated = !meta.approximate && meta.f_star - lb <= 1e-12;
  return meta;
}

struct Sigma2Estimate {
  double value = 0.0;
  std::optional<double> std_error{};  // present for the Monte-Carlo path
  bool exact = false;
};

namespace detail {

inline double choose_capped(int n, int b, double cap) {
  const int k = std::min(b, n - b);  // C(n,b) = C(n,n-b); ascending partials
  double c = 1.0;
  for (int i = 0; i < k; ++i) {
    c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (c > cap) return cap + 1.0;
  }
  return c;
}

}  // namespace detail

// sigma^2 = E_S[f_S(x*) - l_S*]. Exact enumeration over all C(n, B) batches
// when that count is at most 1e5 (always for B = 1), otherwise a Monte-Carlo
// mean over `samples` independent batches with its standard error.
inline Sigma2Estimate estimate_sigma2(const FiniteSumProblem& problem,
                                      const ProblemMetadata& metadata,
                                      int batch_size, long samples,
                                      std::uint64_t seed) {
  const int n = problem.n();
  if (batch_size < 1 || batch_size > n)
    throw config_error("estimate_sigma2: batch size out of range");

  std::vector<double> gap(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Component& c = problem.components[static_cast<std::size_t>(i)];
    gap[static_cast<std::size_t>(i)] = c.value(metadata.x_star) - c.lower_bound;
  }

  Sigma2Estimate out;
  const double inv_b = 1.0 / static_cast<double>(batch_size);
  if (detail::choose_capped(n, batch_size, 1e5) <= 1e5) {
    // Walk all index subsets of size B in lexicographic order.
    std::vector<int> idx(static_cast<std::size_t>(batch_size));
    for (int i = 0; i < batch_size; ++i) idx[static_cast<std::size_t>(i)] = i;
    double total = 0.0;
    long count = 0;
    while (true) {
      double batch_gap = 0.0;
      for (int i : idx) batch_gap += gap[static_cast<std::size_t>(i)];
      total += batch_gap * inv_b;
      ++count;
      int k = batch_size - 1;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - batch_size + k) --k;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
      for (int j = k + 1; j < batch_size; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    out.value = total / static_cast<double>(count);
    out.exact = true;
    return out;
  }

  std::mt19937_64 rng(mix_seed(seed, 2));
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    for (int k = 0; k < batch_size; ++k) {
      std::uniform_int_distribution<int> pick(k, n - 1);
      std::swap(pool[static_cast<std::size_t>(k)],
                pool[static_cast<std::size_t>(pick(rng))]);
    }
    double batch_gap = 0.0;
    for (int k = 0; k < batch_size; ++k)
      batch_gap += gap[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])];
    batch_gap *= inv_b;
    sum += batch_gap;
    sum_sq += batch_gap * batch_gap;
  }
  const double m = static_cast<double>(samples);
  out.value = sum / m;
  const double var = std::max(0.0, (sum_sq - sum * sum / m) / (m - 1.0));
  out.std_error = std::sqrt(var / m);
  return out;
}

struct HeavyBallParams {
  double beta_star = 0.0;
  double gamma_star = 0.0;
};

// Acceleration-optimal heavy-ball parameters for an L-smooth, mu-strongly
// convex quadratic: beta* = (sqrt(L)-sqrt(mu))^2/(sqrt(L)+sqrt(mu))^2 and
// gamma* = (1+sqrt(beta*))^2/L. main_text_form selects the (1+sqrt(beta*))/L
// variant, which also circulates.
inline HeavyBallParams optimal_hb_params(double l, double mu,
                                         bool main_text_form = false) {
  if (!(mu > 0.0) || l < mu)
    throw config_error("optimal_hb_params requires L >= mu > 0");
  const double sl = std::sqrt(l);
  const double sm = std::sqrt(mu);
  HeavyBallParams out;
  out.beta_star = ((sl - sm) * (sl - sm)) / ((sl + sm) * (sl + sm));
  const double onep = 1.0 + std::sqrt(out.beta_star);
  out.gamma_star = main_text_form ? onep / l : onep * onep / l;
  return out;
}

}  // namespace shb

#endif  // SHB_PROBLEMS_HPP
