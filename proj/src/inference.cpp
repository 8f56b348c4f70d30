#include "nerkit/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nerkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(const double* xs, std::size_t n) {
  double m = kNegInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, xs[i]);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(xs[i] - m);
  return m + std::log(s);
}

void check_weights(const WeightView& w) {
  const auto n = (w.num_labels + 1) * w.num_labels;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(w.w[i])) throw std::invalid_argument("non-finite transition weight");
}

}  // namespace

Matrix emission_scores(const WeightView& w, const Instance& inst) {
  const auto T = inst.length();
  const auto L = w.num_labels;
  Matrix e(T, L);
  for (std::size_t t = 0; t < T; ++t) {
    double* row = &e.data[t * L];
    for (auto k = inst.offsets[t]; k < inst.offsets[t + 1]; ++k) {
      const double v = inst.values[k];
      const double* wr = &w.w[w.emission_index(inst.ids[k], 0)];
      for (std::size_t l = 0; l < L; ++l) row[l] += v * wr[l];
    }
    for (std::size_t l = 0; l < L; ++l)
      if (!std::isfinite(row[l]))
        throw std::invalid_argument("non-finite emission score (check weights and feature values)");
  }
  return e;
}

LatticeScores forward_backward(const WeightView& w, const Instance& inst) {
  const auto T = inst.length();
  const auto L = w.num_labels;
  if (T == 0) throw std::invalid_argument("forward-backward needs a non-empty sequence");
  check_weights(w);
  const Matrix e = emission_scores(w, inst);

  LatticeScores out;
  out.log_alpha = Matrix(T, L);
  out.log_beta = Matrix(T, L);
  std::vector<double> buf(L);

  for (std::size_t l = 0; l < L; ++l) out.log_alpha(0, l) = w.start(l) + e(0, l);
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t p = 0; p < L; ++p) buf[p] = out.log_alpha(t - 1, p) + w.transition(p, l);
      out.log_alpha(t, l) = log_sum_exp(buf.data(), L) + e(t, l);
    }
  out.log_z = log_sum_exp(&out.log_alpha.data[(T - 1) * L], L);

  for (std::size_t l = 0; l < L; ++l) out.log_beta(T - 1, l) = 0.0;
  for (std::size_t t = T - 1; t-- > 0;)
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t n = 0; n < L; ++n)
        buf[n] = w.transition(l, n) + e(t + 1, n) + out.log_beta(t + 1, n);
      out.log_beta(t, l) = log_sum_exp(buf.data(), L);
    }
  for (std::size_t l = 0; l < L; ++l) buf[l] = w.start(l) + e(0, l) + out.log_beta(0, l);
  out.log_z_backward = log_sum_exp(buf.data(), L);

  out.unary = Matrix(T, L);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t l = 0; l < L; ++l)
      out.unary(t, l) = std::exp(out.log_alpha(t, l) + out.log_beta(t, l) - out.log_z);

  out.pairwise.reserve(T > 0 ? T - 1 : 0);
  for (std::size_t t = 1; t < T; ++t) {
    Matrix pw(L, L);
    for (std::size_t p = 0; p < L; ++p)
      for (std::size_t l = 0; l < L; ++l)
        pw(p, l) = std::exp(out.log_alpha(t - 1, p) + w.transition(p, l) + e(t, l) +
                            out.log_beta(t, l) - out.log_z);
    out.pairwise.push_back(std::move(pw));
  }
  return out;
}

double forward_backward_expectations(const WeightView& w, const Instance& inst,
                                     std::vector<double>& scratch, double* unary_out,
                                     double* transition_out) {
  const auto T = inst.length();
  const auto L = w.num_labels;
  const Matrix e = emission_scores(w, inst);
  scratch.resize(2 * T * L + L);
  double* alpha = scratch.data();
  double* beta = alpha + T * L;
  double* buf = beta + T * L;

  for (std::size_t l = 0; l < L; ++l) alpha[l] = w.start(l) + e(0, l);
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t p = 0; p < L; ++p) buf[p] = alpha[(t - 1) * L + p] + w.transition(p, l);
      alpha[t * L + l] = log_sum_exp(buf, L) + e(t, l);
    }
  const double log_z = log_sum_exp(&alpha[(T - 1) * L], L);
  if (!std::isfinite(log_z)) throw std::invalid_argument("non-finite partition function");

  for (std::size_t l = 0; l < L; ++l) beta[(T - 1) * L + l] = 0.0;
  for (std::size_t t = T - 1; t-- > 0;)
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t n = 0; n < L; ++n)
        buf[n] = w.transition(l, n) + e(t + 1, n) + beta[(t + 1) * L + n];
      beta[t * L + l] = log_sum_exp(buf, L);
    }

  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t l = 0; l < L; ++l)
      unary_out[t * L + l] = std::exp(alpha[t * L + l] + beta[t * L + l] - log_z);

  std::fill(transition_out, transition_out + (L + 1) * L, 0.0);
  for (std::size_t l = 0; l < L; ++l) transition_out[L * L + l] = unary_out[l];
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t p = 0; p < L; ++p) {
      const double a = alpha[(t - 1) * L + p];
      for (std::size_t l = 0; l < L; ++l)
        transition_out[p * L + l] +=
            std::exp(a + w.transition(p, l) + e(t, l) + beta[t * L + l] - log_z);
    }
  return log_z;
}

std::vector<char> bio_transition_mask(const LabelScheme& scheme) {
  const auto& labels = scheme.labels();
  const auto L = labels.size();
  std::vector<char> allowed((L + 1) * L, 1);
  for (std::size_t to = 0; to < L; ++to) {
    auto [tag, type] = split_label(labels[to]);
    if (tag != 'I') continue;
    allowed[L * L + to] = 0;
    for (std::size_t from = 0; from < L; ++from) {
      auto [ftag, ftype] = split_label(labels[from]);
      allowed[from * L + to] = (ftag != 'O' && ftype == type) ? 1 : 0;
    }
  }
  return allowed;
}

std::vector<std::size_t> viterbi(const WeightView& w, const Instance& inst,
                                 const LabelScheme& scheme, const DecodeOptions& opts) {
  const auto T = inst.length();
  const auto L = w.num_labels;
  if (T == 0) throw std::invalid_argument("viterbi needs a non-empty sequence");
  check_weights(w);
  Matrix e = emission_scores(w, inst);
  if (opts.cost_against) {
    if (opts.cost_against->size() != T) throw std::invalid_argument("cost sequence length mismatch");
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t l = 0; l < L; ++l)
        if (l != (*opts.cost_against)[t]) e(t, l) += 1.0;
  }
  std::vector<char> mask;
  if (opts.constrain_bio) {
    if (scheme.num_labels() != L) throw std::invalid_argument("scheme does not match the weights");
    mask = bio_transition_mask(scheme);
  }
  auto allowed = [&](std::size_t from, std::size_t to) {
    return mask.empty() || mask[from * L + to];
  };

  Matrix delta(T, L, kNegInf);
  std::vector<std::size_t> back(T * L, 0);
  for (std::size_t l = 0; l < L; ++l)
    if (allowed(L, l)) delta(0, l) = w.start(l) + e(0, l);
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t l = 0; l < L; ++l) {
      double best = kNegInf;
      std::size_t arg = 0;
      bool found = false;
      for (std::size_t p = 0; p < L; ++p) {
        if (!allowed(p, l) || delta(t - 1, p) == kNegInf) continue;
        const double s = delta(t - 1, p) + w.transition(p, l);
        if (!found || s > best) {
          best = s;
          arg = p;
          found = true;
        }
      }
      if (found) delta(t, l) = best + e(t, l);
      back[t * L + l] = arg;
    }
  std::size_t last = 0;
  for (std::size_t l = 1; l < L; ++l)
    if (delta(T - 1, l) > delta(T - 1, last)) last = l;
  std::vector<std::size_t> path(T);
  path[T - 1] = last;
  for (std::size_t t = T - 1; t > 0; --t) path[t - 1] = back[t * L + path[t]];
  return path;
}

double score_sequence(const WeightView& w, const Instance& inst,
                      const std::vector<std::size_t>& labels) {
  const auto T = inst.length();
  if (labels.size() != T) throw std::invalid_argument("label sequence length mismatch");
  for (auto l : labels)
    if (l >= w.num_labels) throw std::invalid_argument("label outside scheme");
  double s = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    s += (t == 0) ? w.start(labels[0]) : w.transition(labels[t - 1], labels[t]);
    for (auto k = inst.offsets[t]; k < inst.offsets[t + 1]; ++k)
      s += inst.values[k] * w.emission(inst.ids[k], labels[t]);
  }
  return s;
}

std::size_t hamming(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) d += a[i] != b[i];
  return d + (a.size() > b.size() ? a.size() - b.size() : b.size() - a.size());
}

std::vector<std::string> decode(const SequenceModel& model, const std::vector<FeatureVector>& fvs,
                                const DecodeOptions& opts) {
  const auto inst = model.compile(fvs);
  const auto path = viterbi(model.view(), inst, model.scheme(), opts);
  std::vector<std::string> out;
  out.reserve(path.size());
  for (auto l : path) out.push_back(model.scheme().labels()[l]);
  return out;
}

double score_sequence(const SequenceModel& model, const std::vector<FeatureVector>& fvs,
                      const std::vector<std::string>& labels) {
  const auto inst = model.compile(fvs, &labels);
  return score_sequence(model.view(), inst, inst.labels);
}

LatticeScores forward_backward(const SequenceModel& model, const std::vector<FeatureVector>& fvs) {
  return forward_backward(model.view(), model.compile(fvs));
}

}  // namespace nerkit
