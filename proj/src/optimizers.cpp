#include "dem/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace dem {

namespace {

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double two_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const char* status_name(OptStatus s) {
  switch (s) {
    case OptStatus::Converged: return "converged";
    case OptStatus::MaxIterations: return "max-iterations";
    case OptStatus::LineSearchFailed: return "line-search-failed";
    case OptStatus::Aborted: return "aborted";
  }
  return "?";
}

void gd_step(std::span<double> params, std::span<const double> grad, double lr) {
  if (params.size() != grad.size())
    throw std::invalid_argument("gd_step: parameter/gradient size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

OptResult adam_run(const LossFn& loss, std::vector<double>& params, const AdamConfig& config) {
  OptResult res;
  const std::size_t n = params.size();
  std::vector<double> m(n, 0.0), v(n, 0.0);
  double b1t = 1.0, b2t = 1.0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const LossEval e = loss(params);
    if (!std::isfinite(e.value)) {
      res.status = OptStatus::Aborted;
      res.message = "non-finite loss at epoch " + std::to_string(epoch) +
                    ", |params| = " + std::to_string(two_norm(params));
      return res;
    }
    res.history.push_back(e.value);
    b1t *= config.beta1;
    b2t *= config.beta2;
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * e.grad[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * e.grad[i] * e.grad[i];
      const double mhat = m[i] / (1.0 - b1t);
      const double vhat = v[i] / (1.0 - b2t);
      params[i] -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
    }
    ++res.iterations;
  }
  return res;
}

namespace {

struct ProbePoint {
  double alpha = 0.0;
  double f = std::numeric_limits<double>::infinity();
  double dphi = 0.0;
  LossEval eval;
};

class LineSearch {
 public:
  LineSearch(const LossFn& loss, std::span<const double> x0, std::span<const double> dir,
             double f0, double dphi0, const LbfgsConfig& cfg)
      : loss_(loss), x0_(x0), dir_(dir), f0_(f0), dphi0_(dphi0), cfg_(cfg) {
    trial_.resize(x0.size());
  }

  // Strong Wolfe search; returns true on success and fills `out`.
  bool run(double alpha_init, ProbePoint& out) {
    double alpha_prev = 0.0;
    double f_prev = f0_;
    double dphi_prev = dphi0_;
    double alpha = alpha_init;
    const double alpha_max = 1e6;

    for (int i = 0; evals_ < cfg_.max_line_search; ++i) {
      ProbePoint p = probe(alpha);
      const bool finite = std::isfinite(p.f);
      if (!finite || p.f > f0_ + cfg_.c1 * alpha * dphi0_ || (i > 0 && p.f >= f_prev)) {
        return zoom(alpha_prev, f_prev, dphi_prev, alpha, p.f, out);
      }
      if (std::abs(p.dphi) <= -cfg_.c2 * dphi0_) {
        out = std::move(p);
        return true;
      }
      if (p.dphi >= 0.0) {
        return zoom(alpha, p.f, p.dphi, alpha_prev, f_prev, out);
      }
      alpha_prev = alpha;
      f_prev = p.f;
      dphi_prev = p.dphi;
      alpha = std::min(2.0 * alpha, alpha_max);
      if (alpha_prev >= alpha_max) break;
    }
    return false;
  }

  int evals() const { return evals_; }

 private:
  ProbePoint probe(double alpha) {
    for (std::size_t j = 0; j < x0_.size(); ++j) trial_[j] = x0_[j] + alpha * dir_[j];
    ProbePoint p;
    p.alpha = alpha;
    p.eval = loss_(trial_);
    ++evals_;
    p.f = std::isfinite(p.eval.value) ? p.eval.value : std::numeric_limits<double>::infinity();
    p.dphi = std::isfinite(p.f) ? dot(p.eval.grad, dir_) : 0.0;
    return p;
  }

  bool zoom(double alpha_lo, double f_lo, double dphi_lo, double alpha_hi, double f_hi,
            ProbePoint& out) {
    while (evals_ < cfg_.max_line_search) {
      double alpha;
      if (std::isfinite(f_hi)) {
        // quadratic interpolation from (lo: f, dphi) and (hi: f), safeguarded
        const double d = alpha_hi - alpha_lo;
        const double denom = 2.0 * (f_hi - f_lo - dphi_lo * d);
        alpha = denom != 0.0 ? alpha_lo - dphi_lo * d * d / denom : alpha_lo + 0.5 * d;
        const double lo = std::min(alpha_lo, alpha_hi), hi = std::max(alpha_lo, alpha_hi);
        const double margin = 0.1 * (hi - lo);
        if (!(alpha > lo + margin && alpha < hi - margin)) alpha = 0.5 * (alpha_lo + alpha_hi);
      } else {
        alpha = 0.5 * (alpha_lo + alpha_hi);
      }
      if (alpha == alpha_lo || alpha == alpha_hi) return false;  // interval exhausted

      ProbePoint p = probe(alpha);
      if (!std::isfinite(p.f) || p.f > f0_ + cfg_.c1 * alpha * dphi0_ || p.f >= f_lo) {
        alpha_hi = alpha;
        f_hi = p.f;
      } else {
        if (std::abs(p.dphi) <= -cfg_.c2 * dphi0_) {
          out = std::move(p);
          return true;
        }
        if (p.dphi * (alpha_hi - alpha_lo) >= 0.0) {
          alpha_hi = alpha_lo;
          f_hi = f_lo;
        }
        alpha_lo = alpha;
        f_lo = p.f;
        dphi_lo = p.dphi;
      }
    }
    return false;
  }

  const LossFn& loss_;
  std::span<const double> x0_;
  std::span<const double> dir_;
  double f0_;
  double dphi0_;
  const LbfgsConfig& cfg_;
  std::vector<double> trial_;
  int evals_ = 0;
};

}  // namespace

OptResult lbfgs_run(const LossFn& loss, std::vector<double>& params,
                    const LbfgsConfig& config) {
  OptResult res;
  const std::size_t n = params.size();

  LossEval cur = loss(params);
  if (!std::isfinite(cur.value)) {
    res.status = OptStatus::Aborted;
    res.message = "non-finite loss at the initial iterate";
    return res;
  }
  res.history.push_back(cur.value);
  if (n == 0) return res;

  std::vector<double> best = params;
  double best_f = cur.value;

  if (max_norm(cur.grad) <= config.grad_tol) return res;

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> dir(n), q(n), alpha_tl;

  for (int iter = 0; iter < config.max_iters; ++iter) {
    // two-loop recursion for d = -H g
    q.assign(cur.grad.begin(), cur.grad.end());
    alpha_tl.assign(s_hist.size(), 0.0);
    for (std::size_t h = s_hist.size(); h-- > 0;) {
      alpha_tl[h] = rho_hist[h] * dot(s_hist[h], q);
      for (std::size_t j = 0; j < n; ++j) q[j] -= alpha_tl[h] * y_hist[h][j];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) {
      const double yy = dot(y_hist.back(), y_hist.back());
      if (yy > 0.0) gamma = dot(s_hist.back(), y_hist.back()) / yy;
    }
    for (std::size_t j = 0; j < n; ++j) q[j] *= gamma;
    for (std::size_t h = 0; h < s_hist.size(); ++h) {
      const double beta = rho_hist[h] * dot(y_hist[h], q);
      for (std::size_t j = 0; j < n; ++j) q[j] += (alpha_tl[h] - beta) * s_hist[h][j];
    }
    for (std::size_t j = 0; j < n; ++j) dir[j] = -q[j];

    double dphi0 = dot(cur.grad, dir);
    if (dphi0 >= 0.0) {  // not a descent direction; fall back to steepest descent
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t j = 0; j < n; ++j) dir[j] = -cur.grad[j];
      dphi0 = dot(cur.grad, dir);
      if (dphi0 == 0.0) break;
    }

    const double alpha_init =
        iter == 0 && s_hist.empty() ? std::min(1.0, 1.0 / std::max(1e-12, max_norm(cur.grad)))
                                    : 1.0;
    LineSearch search(loss, params, dir, cur.value, dphi0, config);
    ProbePoint accepted;
    if (!search.run(alpha_init, accepted)) {
      res.status = OptStatus::LineSearchFailed;
      res.message = "line search failed after " + std::to_string(search.evals()) +
                    " evaluations at iteration " + std::to_string(iter);
      params = best;
      return res;
    }

    const bool sufficient = accepted.f <= cur.value + config.c1 * accepted.alpha * dphi0 +
                                              1e-14 * std::abs(cur.value);
    const bool curvature = std::abs(accepted.dphi) <= -config.c2 * dphi0 + 1e-14;
    if (!(sufficient && curvature)) res.wolfe_ok = false;

    std::vector<double> s(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = accepted.alpha * dir[j];
      y[j] = accepted.eval.grad[j] - cur.grad[j];
    }
    const double sy = dot(s, y);
    if (sy > 1e-16 * two_norm(s) * two_norm(y)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > config.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double prev_f = cur.value;
    for (std::size_t j = 0; j < n; ++j) params[j] += accepted.alpha * dir[j];
    cur = std::move(accepted.eval);
    res.history.push_back(cur.value);
    ++res.iterations;
    if (cur.value < best_f) {
      best_f = cur.value;
      best = params;
    }

    if (std::abs(prev_f - cur.value) <= config.loss_tol) return res;
    if (max_norm(cur.grad) <= config.grad_tol) return res;
  }
  res.status = OptStatus::MaxIterations;
  return res;
}

}  // namespace dem
