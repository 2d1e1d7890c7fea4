#include "eegprog/nn/arcface.hpp"

#include <cmath>

#include "eegprog/nn/ops.hpp"

namespace eegprog::nn {

namespace {

constexpr double kNormFloor = 1e-12;

// Unit-normalize rows; returns norms. Throws for an exactly degenerate
// embedding when `guard` is set.
Mat normalize_rows(const Mat& x, Vec& norms, bool guard, const char* what) {
  norms = x.rowwise().norm();
  Mat out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (guard && norms[i] < kNormFloor) {
      throw NumericError(std::string("arcface_loss: zero-norm ") + what);
    }
    const double n = std::max(norms[i], kNormFloor);
    norms[i] = n;
    out.row(i) = x.row(i) / n;
  }
  return out;
}

}  // namespace

void ArcFaceParams::validate() const {
  if (s <= 0.0) throw ConfigError("ArcFaceParams.s must be positive");
  if (!(m >= 0.0 && m < M_PI / 2.0)) {
    throw ConfigError("ArcFaceParams.m must lie in [0, pi/2)");
  }
  if (class_weights.rows() < 2) {
    throw ConfigError("ArcFaceParams.class_weights needs >= 2 classes");
  }
}

ArcFaceResult arcface_loss(const Mat& embeddings, const std::vector<int>& labels,
                           const ArcFaceParams& params,
                           const std::vector<double>* sample_weights) {
  params.validate();
  const Eigen::Index batch = embeddings.rows();
  const Eigen::Index n_classes = params.class_weights.rows();
  if (embeddings.cols() != params.class_weights.cols()) {
    throw ShapeError("arcface_loss: embedding dim mismatch");
  }
  if (static_cast<Eigen::Index>(labels.size()) != batch) {
    throw ShapeError("arcface_loss: labels/batch mismatch");
  }
  for (int y : labels) {
    if (y < 0 || y >= n_classes) throw ShapeError("arcface_loss: label out of range");
  }

  Vec emb_norms, w_norms;
  const Mat u = normalize_rows(embeddings, emb_norms, true, "embedding");
  const Mat v = normalize_rows(params.class_weights, w_norms, false, "class weight");
  const Mat cos = u * v.transpose();  // batch x classes

  const double cos_m = std::cos(params.m);
  const double sin_m = std::sin(params.m);
  const double fallback_bound = std::cos(M_PI - params.m);

  // Logits: s*cos everywhere, true class replaced by s*cos(theta+m).
  Mat logits = params.s * cos;
  Vec dphi_dcos = Vec::Ones(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    const double c = cos(i, y);
    if (c > fallback_bound) {
      const double sin_t = std::sqrt(std::max(0.0, 1.0 - c * c));
      logits(i, y) = params.s * (c * cos_m - sin_t * sin_m);
      dphi_dcos[i] = cos_m + c * sin_m / std::max(sin_t, kNormFloor);
    }
  }

  Mat d_logits;
  ArcFaceResult result;
  result.loss = softmax_cross_entropy(logits, labels, d_logits, sample_weights);

  // d(loss)/d(cos): scale column-wise by s, with the extra margin slope on
  // the true-class entry.
  Mat d_cos = params.s * d_logits;
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    d_cos(i, y) *= dphi_dcos[i];
  }

  // cos_ij = u_i . v_j with u, v unit rows:
  //   d cos / d e_i = (v_j - cos_ij u_i) / |e_i|
  //   d cos / d w_j = (u_i - cos_ij v_j) / |w_j|
  result.d_embeddings.resize(batch, embeddings.cols());
  const Mat du = d_cos * v;  // batch x d
  for (Eigen::Index i = 0; i < batch; ++i) {
    const double along = d_cos.row(i).dot(cos.row(i));
    result.d_embeddings.row(i) = (du.row(i) - along * u.row(i)) / emb_norms[i];
  }
  result.d_class_weights.resize(n_classes, embeddings.cols());
  const Mat dv = d_cos.transpose() * u;  // classes x d
  for (Eigen::Index j = 0; j < n_classes; ++j) {
    const double along = d_cos.col(j).dot(cos.col(j));
    result.d_class_weights.row(j) = (dv.row(j) - along * v.row(j)) / w_norms[j];
  }
  return result;
}

Mat arcface_probabilities(const Mat& embeddings, const ArcFaceParams& params) {
  params.validate();
  if (embeddings.cols() != params.class_weights.cols()) {
    throw ShapeError("arcface_probabilities: embedding dim mismatch");
  }
  Vec emb_norms, w_norms;
  const Mat u = normalize_rows(embeddings, emb_norms, true, "embedding");
  const Mat v = normalize_rows(params.class_weights, w_norms, false, "class weight");
  return softmax_rows(params.s * (u * v.transpose()));
}

}  // namespace eegprog::nn
