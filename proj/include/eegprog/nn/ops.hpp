#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "eegprog/common.hpp"

namespace eegprog::nn {

// ---- conv1d -----------------------------------------------------------
// Valid cross-correlation over [channels x length] inputs. Weights are kept
// flattened as [filters x (channels*kernel)] so forward/backward are plain
// GEMMs against the im2col matrix.
struct Conv1d {
  Mat weight;
  Vec bias;
  int in_channels = 0;
  int kernel = 0;
  int stride = 1;

  int out_channels() const { return static_cast<int>(weight.rows()); }
};

Conv1d make_conv1d(int in_channels, int out_channels, int kernel, int stride,
                   std::mt19937_64& rng);

Eigen::Index conv1d_output_length(Eigen::Index input_length, int kernel, int stride);

// [(channels*kernel) x out_length] patch matrix.
Mat im2col(const Mat& input, int kernel, int stride);

Mat conv1d_forward(const Conv1d& layer, const Mat& input);

// Returns d_input; accumulates d_weight/d_bias.
Mat conv1d_backward(const Conv1d& layer, const Mat& input, const Mat& d_out,
                    Mat& d_weight, Vec& d_bias);

// ---- dense ------------------------------------------------------------
struct Dense {
  Mat weight;  // out x in
  Vec bias;    // out
};

Dense make_dense(int in_dim, int out_dim, std::mt19937_64& rng);

// Columns are batch items: X is [in x B].
Mat dense_forward(const Dense& layer, const Mat& x);
Mat dense_backward(const Dense& layer, const Mat& x, const Mat& d_out,
                   Mat& d_weight, Vec& d_bias);

// ---- activations ------------------------------------------------------
Mat relu(const Mat& x);
Mat relu_backward(const Mat& x_pre, const Mat& d_out);

// Mean over columns: [F x L] -> F.
Vec global_avg_pool(const Mat& x);
Mat global_avg_pool_backward(const Vec& d_out, Eigen::Index length);

// ---- layer norm -------------------------------------------------------
// Normalizes each row of [T x d] to mean 0 / variance 1, then scales by
// gamma and shifts by beta.
struct LayerNorm {
  Vec gamma;
  Vec beta;
  double eps = 1e-12;
};

LayerNorm make_layer_norm(int dim);

Mat layer_norm_forward(const LayerNorm& ln, const Mat& x);
Mat layer_norm_backward(const LayerNorm& ln, const Mat& x, const Mat& d_out,
                        Vec& d_gamma, Vec& d_beta);

// ---- softmax / cross-entropy ------------------------------------------
// Row-wise softmax with max-shift stabilization.
Mat softmax_rows(const Mat& logits);

// Mean over the batch of -log softmax(logits)[label]; optional per-sample
// weights are normalized by their sum.
double softmax_cross_entropy(const Mat& logits, const std::vector<int>& labels,
                             Mat& d_logits,
                             const std::vector<double>* sample_weights = nullptr);

// ---- positional encoding ----------------------------------------------
// PE(t, 2i) = sin(t / 10000^(2i/d)), PE(t, 2i+1) = cos(same).
Mat positional_encoding(Eigen::Index t_len, Eigen::Index dim);

// ---- adam ---------------------------------------------------------------
struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Mat> m;
  std::vector<Mat> v;
  long step = 0;
};

AdamState make_adam_state(const std::vector<Mat*>& params);

// Standard bias-corrected first/second-moment update.
void adam_step(const std::vector<Mat*>& params, const std::vector<const Mat*>& grads,
               AdamState& state, const AdamConfig& config);

// ---- finite differences -------------------------------------------------
// Central differences on a scalar-valued function of several matrices.
// Returns max over entries of |analytic - numeric| / max(|a|, |n|, 1e-8).
double gradient_check(const std::function<double(const std::vector<Mat>&)>& f,
                      const std::vector<Mat>& inputs,
                      const std::vector<Mat>& analytic_grads, double eps = 1e-5);

}  // namespace eegprog::nn
