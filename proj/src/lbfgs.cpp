#include "nerkit/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace nerkit {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct Correction {
  std::vector<double> s, y;
  double rho;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& opts) {
  if (opts.memory == 0) throw std::invalid_argument("L-BFGS memory must be positive");
  const auto n = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);
  std::vector<double> g(n), d(n), x_new(n), g_new(n), alpha_buf;
  double fx = f(res.x, g);
  if (!std::isfinite(fx)) throw std::invalid_argument("objective is not finite at the start point");
  res.history.push_back(fx);
  std::deque<Correction> mem;

  auto converged = [&](std::span<const double> grad, std::span<const double> x) {
    return norm(grad) / std::max(1.0, norm(x)) < opts.grad_tolerance;
  };

  if (converged(g, res.x)) {
    res.value = fx;
    res.converged = true;
    return res;
  }

  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    // Two-loop recursion: d = -H g.
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    alpha_buf.assign(mem.size(), 0.0);
    for (std::size_t k = mem.size(); k-- > 0;) {
      alpha_buf[k] = mem[k].rho * dot(mem[k].s, d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha_buf[k] * mem[k].y[i];
    }
    if (!mem.empty()) {
      const auto& last = mem.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (auto& v : d) v *= gamma;
    }
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const double beta = mem[k].rho * dot(mem[k].y, d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha_buf[k] - beta) * mem[k].s[i];
    }

    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      // Not a descent direction; restart from steepest descent.
      mem.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = dot(g, d);
    }

    double step = mem.empty() ? std::min(1.0, 1.0 / norm(d)) : 1.0;
    bool accepted = false;
    double f_new = fx;
    for (std::size_t bt = 0; bt <= opts.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + step * d[i];
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + opts.c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {
      res.line_search_failed = true;
      break;
    }

    Correction c;
    c.s.resize(n);
    c.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      c.s[i] = x_new[i] - res.x[i];
      c.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(c.s, c.y);
    if (sy > 1e-10 * dot(c.y, c.y) && sy > 0.0) {
      c.rho = 1.0 / sy;
      mem.push_back(std::move(c));
      if (mem.size() > opts.memory) mem.pop_front();
    }

    res.x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    res.history.push_back(fx);
    res.iterations = iter + 1;
    if (converged(g, res.x)) {
      res.converged = true;
      break;
    }
  }
  res.value = fx;
  return res;
}

}  // namespace nerkit
