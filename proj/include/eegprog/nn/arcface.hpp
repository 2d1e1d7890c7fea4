#pragma once

#include <vector>

#include "eegprog/common.hpp"

namespace eegprog::nn {

// Additive angular margin head: cosine similarities between unit-normalized
// embeddings and class-weight rows, margin m added to the true-class angle,
// everything scaled by s before softmax cross-entropy.
struct ArcFaceParams {
  double s = 16.0;
  double m = 0.3;
  Mat class_weights;  // n_classes x embed_dim

  void validate() const;
};

struct ArcFaceResult {
  double loss = 0.0;
  Mat d_embeddings;    // batch x d
  Mat d_class_weights; // n_classes x d
};

// Loss = weighted mean over the batch of
//   -log( exp(s*cos(theta_y+m)) / (exp(s*cos(theta_y+m)) + sum_{j!=y} exp(s*cos theta_j)) ).
// cos(theta+m) is computed as cos*cos(m) - sin*sin(m) with
// sin = sqrt(max(0, 1-cos^2)); when cos(theta_y) <= cos(pi-m) the margin is
// dropped and the plain cosine is used.
ArcFaceResult arcface_loss(const Mat& embeddings, const std::vector<int>& labels,
                           const ArcFaceParams& params,
                           const std::vector<double>* sample_weights = nullptr);

// Inference-side class probabilities: softmax over s * cosine logits, no
// margin.
Mat arcface_probabilities(const Mat& embeddings, const ArcFaceParams& params);

}  // namespace eegprog::nn
