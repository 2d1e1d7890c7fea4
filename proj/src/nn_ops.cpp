#include "eegprog/nn/ops.hpp"

#include <cmath>

namespace eegprog::nn {

namespace {

Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double scale,
                    std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, scale);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  }
  return m;
}

}  // namespace

Conv1d make_conv1d(int in_channels, int out_channels, int kernel, int stride,
                   std::mt19937_64& rng) {
  if (in_channels <= 0 || out_channels <= 0 || kernel <= 0 || stride <= 0) {
    throw ShapeError("conv1d: dimensions must be positive");
  }
  Conv1d layer;
  layer.in_channels = in_channels;
  layer.kernel = kernel;
  layer.stride = stride;
  const double scale = std::sqrt(2.0 / (in_channels * kernel));
  layer.weight = gaussian_matrix(out_channels, in_channels * kernel, scale, rng);
  layer.bias = Vec::Zero(out_channels);
  return layer;
}

Eigen::Index conv1d_output_length(Eigen::Index input_length, int kernel, int stride) {
  if (kernel > input_length) {
    throw ShapeError("conv1d: kernel longer than input");
  }
  return (input_length - kernel) / stride + 1;
}

Mat im2col(const Mat& input, int kernel, int stride) {
  const Eigen::Index channels = input.rows();
  const Eigen::Index l_out = conv1d_output_length(input.cols(), kernel, stride);
  Mat cols(channels * kernel, l_out);
  for (Eigen::Index t = 0; t < l_out; ++t) {
    for (Eigen::Index c = 0; c < channels; ++c) {
      cols.block(c * kernel, t, kernel, 1) =
          input.row(c).segment(t * stride, kernel).transpose();
    }
  }
  return cols;
}

Mat conv1d_forward(const Conv1d& layer, const Mat& input) {
  if (input.rows() != layer.in_channels) {
    throw ShapeError("conv1d: input channel count mismatch");
  }
  Mat cols = im2col(input, layer.kernel, layer.stride);
  Mat out = layer.weight * cols;
  out.colwise() += layer.bias;
  return out;
}

Mat conv1d_backward(const Conv1d& layer, const Mat& input, const Mat& d_out,
                    Mat& d_weight, Vec& d_bias) {
  const Mat cols = im2col(input, layer.kernel, layer.stride);
  d_weight += d_out * cols.transpose();
  d_bias += d_out.rowwise().sum();

  const Mat d_cols = layer.weight.transpose() * d_out;
  Mat d_input = Mat::Zero(input.rows(), input.cols());
  const Eigen::Index l_out = d_out.cols();
  for (Eigen::Index t = 0; t < l_out; ++t) {
    for (Eigen::Index c = 0; c < input.rows(); ++c) {
      d_input.row(c).segment(t * layer.stride, layer.kernel) +=
          d_cols.block(c * layer.kernel, t, layer.kernel, 1).transpose();
    }
  }
  return d_input;
}

Dense make_dense(int in_dim, int out_dim, std::mt19937_64& rng) {
  if (in_dim <= 0 || out_dim <= 0) {
    throw ShapeError("dense: dimensions must be positive");
  }
  Dense layer;
  layer.weight = gaussian_matrix(out_dim, in_dim, std::sqrt(2.0 / in_dim), rng);
  layer.bias = Vec::Zero(out_dim);
  return layer;
}

Mat dense_forward(const Dense& layer, const Mat& x) {
  if (x.rows() != layer.weight.cols()) {
    throw ShapeError("dense: input dimension mismatch");
  }
  Mat out = layer.weight * x;
  out.colwise() += layer.bias;
  return out;
}

Mat dense_backward(const Dense& layer, const Mat& x, const Mat& d_out,
                   Mat& d_weight, Vec& d_bias) {
  d_weight += d_out * x.transpose();
  d_bias += d_out.rowwise().sum();
  return layer.weight.transpose() * d_out;
}

Mat relu(const Mat& x) { return x.cwiseMax(0.0); }

Mat relu_backward(const Mat& x_pre, const Mat& d_out) {
  return (x_pre.array() > 0.0).select(d_out, Mat::Zero(d_out.rows(), d_out.cols()));
}

Vec global_avg_pool(const Mat& x) { return x.rowwise().mean(); }

Mat global_avg_pool_backward(const Vec& d_out, Eigen::Index length) {
  return (d_out / static_cast<double>(length)) *
         Eigen::RowVectorXd::Ones(length);
}

LayerNorm make_layer_norm(int dim) {
  LayerNorm ln;
  ln.gamma = Vec::Ones(dim);
  ln.beta = Vec::Zero(dim);
  return ln;
}

Mat layer_norm_forward(const LayerNorm& ln, const Mat& x) {
  if (x.cols() != ln.gamma.size()) {
    throw ShapeError("layer_norm: dimension mismatch");
  }
  const Eigen::Index d = x.cols();
  Mat out(x.rows(), d);
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    const double mean = x.row(t).mean();
    const auto centered = (x.row(t).array() - mean).eval();
    const double var = centered.square().mean();
    const double inv_std = 1.0 / std::sqrt(var + ln.eps);
    out.row(t) = ((centered * inv_std) * ln.gamma.transpose().array() +
                  ln.beta.transpose().array())
                     .matrix();
  }
  return out;
}

Mat layer_norm_backward(const LayerNorm& ln, const Mat& x, const Mat& d_out,
                        Vec& d_gamma, Vec& d_beta) {
  const Eigen::Index d = x.cols();
  Mat d_x(x.rows(), d);
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    const double mean = x.row(t).mean();
    const auto centered = (x.row(t).array() - mean).eval();
    const double var = centered.square().mean();
    const double inv_std = 1.0 / std::sqrt(var + ln.eps);
    const auto xhat = (centered * inv_std).eval();

    d_gamma += (d_out.row(t).array() * xhat).matrix().transpose();
    d_beta += d_out.row(t).transpose();

    const auto d_xhat = (d_out.row(t).array() * ln.gamma.transpose().array()).eval();
    const double mean_d = d_xhat.mean();
    const double mean_dx = (d_xhat * xhat).mean();
    d_x.row(t) = (inv_std * (d_xhat - mean_d - xhat * mean_dx)).matrix();
  }
  (void)d;
  return d_x;
}

Mat softmax_rows(const Mat& logits) {
  Mat out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - mx).exp();
    out.row(i) = (e / e.sum()).matrix();
  }
  return out;
}

double softmax_cross_entropy(const Mat& logits, const std::vector<int>& labels,
                             Mat& d_logits,
                             const std::vector<double>* sample_weights) {
  const auto batch = static_cast<std::size_t>(logits.rows());
  if (labels.size() != batch) {
    throw ShapeError("softmax_cross_entropy: labels/batch mismatch");
  }
  for (int y : labels) {
    if (y < 0 || y >= logits.cols()) {
      throw ShapeError("softmax_cross_entropy: label out of range");
    }
  }
  double weight_sum = 0.0;
  if (sample_weights != nullptr) {
    if (sample_weights->size() != batch) {
      throw ShapeError("softmax_cross_entropy: weights/batch mismatch");
    }
    for (double w : *sample_weights) weight_sum += w;
  } else {
    weight_sum = static_cast<double>(batch);
  }
  if (weight_sum <= 0.0) {
    throw NumericError("softmax_cross_entropy: non-positive weight sum");
  }

  const Mat probs = softmax_rows(logits);
  d_logits = probs;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double w = sample_weights ? (*sample_weights)[i] : 1.0;
    const int y = labels[i];
    const double mx = logits.row(row).maxCoeff();
    const double lse =
        mx + std::log((logits.row(row).array() - mx).exp().sum());
    loss += w * (lse - logits(row, y));
    d_logits(row, y) -= 1.0;
    d_logits.row(row) *= w / weight_sum;
  }
  return loss / weight_sum;
}

Mat positional_encoding(Eigen::Index t_len, Eigen::Index dim) {
  Mat pe = Mat::Zero(t_len, dim);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    for (Eigen::Index i = 0; 2 * i < dim; ++i) {
      const double rate =
          std::pow(10000.0, 2.0 * static_cast<double>(i) / static_cast<double>(dim));
      const double angle = static_cast<double>(t) / rate;
      pe(t, 2 * i) = std::sin(angle);
      if (2 * i + 1 < dim) pe(t, 2 * i + 1) = std::cos(angle);
    }
  }
  return pe;
}

AdamState make_adam_state(const std::vector<Mat*>& params) {
  AdamState state;
  state.m.reserve(params.size());
  state.v.reserve(params.size());
  for (const Mat* p : params) {
    state.m.push_back(Mat::Zero(p->rows(), p->cols()));
    state.v.push_back(Mat::Zero(p->rows(), p->cols()));
  }
  return state;
}

void adam_step(const std::vector<Mat*>& params, const std::vector<const Mat*>& grads,
               AdamState& state, const AdamConfig& config) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ShapeError("adam_step: parameter/gradient/state count mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Mat& p = *params[i];
    const Mat& g = *grads[i];
    if (p.rows() != g.rows() || p.cols() != g.cols()) {
      throw ShapeError("adam_step: gradient shape mismatch");
    }
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] =
        (config.beta2 * state.v[i].array() + (1.0 - config.beta2) * g.array().square())
            .matrix();
    const Mat m_hat = state.m[i] / bc1;
    const Mat v_hat = state.v[i] / bc2;
    p.array() -= config.lr * m_hat.array() / (v_hat.array().sqrt() + config.eps);
  }
}

double gradient_check(const std::function<double(const std::vector<Mat>&)>& f,
                      const std::vector<Mat>& inputs,
                      const std::vector<Mat>& analytic_grads, double eps) {
  if (inputs.size() != analytic_grads.size()) {
    throw ShapeError("gradient_check: inputs/grads count mismatch");
  }
  double max_rel = 0.0;
  std::vector<Mat> probe = inputs;
  for (std::size_t k = 0; k < probe.size(); ++k) {
    for (Eigen::Index i = 0; i < probe[k].rows(); ++i) {
      for (Eigen::Index j = 0; j < probe[k].cols(); ++j) {
        const double orig = probe[k](i, j);
        probe[k](i, j) = orig + eps;
        const double f_plus = f(probe);
        probe[k](i, j) = orig - eps;
        const double f_minus = f(probe);
        probe[k](i, j) = orig;
        const double numeric = (f_plus - f_minus) / (2.0 * eps);
        const double analytic = analytic_grads[k](i, j);
        const double rel = std::abs(analytic - numeric) /
                           std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        max_rel = std::max(max_rel, rel);
      }
    }
  }
  return max_rel;
}

}  // namespace eegprog::nn
