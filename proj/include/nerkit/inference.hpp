#pragma once

#include <string>
#include <vector>

#include "nerkit/model.hpp"

namespace nerkit {

/// Row-major position x label matrix.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double v = 0.0) : rows(r), cols(c), data(r * c, v) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Emission score of every (position, label). Throws on non-finite weights
/// or feature values.
Matrix emission_scores(const WeightView& w, const Instance& inst);

struct LatticeScores {
  Matrix log_alpha;
  Matrix log_beta;
  double log_z = 0.0;
  double log_z_backward = 0.0;
  Matrix unary;                  // position x label marginals
  std::vector<Matrix> pairwise;  // per position t>=1: label(t-1) x label(t)
};

LatticeScores forward_backward(const WeightView& w, const Instance& inst);

/// Forward pass only; returns log Z and writes unary marginals
/// (T x L, row-major) and expected transition counts ((L+1) x L) into the
/// given buffers. This is the training kernel.
double forward_backward_expectations(const WeightView& w, const Instance& inst,
                                     std::vector<double>& scratch, double* unary_out,
                                     double* transition_out);

struct DecodeOptions {
  /// Adds 1 to the score of every label that differs from this gold
  /// sequence (Hamming cost augmentation).
  const std::vector<std::size_t>* cost_against = nullptr;
  /// Forbid O -> I-t, B-t/I-t -> I-u (u != t) and start -> I-t.
  bool constrain_bio = false;
};

/// Argmax label sequence; ties go to the earlier label in scheme order.
std::vector<std::size_t> viterbi(const WeightView& w, const Instance& inst,
                                 const LabelScheme& scheme, const DecodeOptions& opts = {});

double score_sequence(const WeightView& w, const Instance& inst,
                      const std::vector<std::size_t>& labels);

std::size_t hamming(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

/// String-level conveniences over a trained model.
std::vector<std::string> decode(const SequenceModel& model, const std::vector<FeatureVector>& fvs,
                                const DecodeOptions& opts = {});
double score_sequence(const SequenceModel& model, const std::vector<FeatureVector>& fvs,
                      const std::vector<std::string>& labels);
LatticeScores forward_backward(const SequenceModel& model, const std::vector<FeatureVector>& fvs);

/// allowed[from * L + to], from == L being the start state.
std::vector<char> bio_transition_mask(const LabelScheme& scheme);

}  // namespace nerkit
