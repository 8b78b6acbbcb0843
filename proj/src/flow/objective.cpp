#include "glyphflow/flow/objective.hpp"

#include <cmath>
#include <string>

#include "glyphflow/flow/detail/mlp.hpp"

namespace glyphflow::flow {

using detail::RowMatrix;

FlowSample sample_flow(const LatentTensor& z0, const LatentTensor& eps, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ParameterError("flow time must lie in [0,1], got " + std::to_string(t));
  }
  if (!z0.same_shape(eps)) throw ShapeError("z0 and eps shapes differ");
  FlowSample s{z0, eps, t, LatentTensor(z0.h(), z0.w(), z0.c()),
               LatentTensor(z0.h(), z0.w(), z0.c())};
  auto a = z0.data();
  auto e = eps.data();
  auto zt = s.zt.data();
  auto v = s.v_star.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    zt[i] = (1.0 - t) * a[i] + t * e[i];
    v[i] = e[i] - a[i];
  }
  return s;
}

double loss_fm(const LatentTensor& v_pred, const LatentTensor& v_star) {
  if (!v_pred.same_shape(v_star)) throw ShapeError("velocity shapes differ");
  if (v_pred.size() == 0) return 0.0;
  double s = 0.0;
  auto a = v_pred.data();
  auto b = v_star.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

ImageBuffer reconstruct_x0(const LatentTensor& zt, const LatentTensor& v_pred, double t,
                           const Codec& codec) {
  if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("flow time must lie in [0,1]");
  return codec.decode(axpy(zt, -t, v_pred));
}

namespace {

void check_gr_shapes(const ImageBuffer& x0, const ImageBuffer& x0_hat, const Mask& m) {
  if (x0.size() != x0_hat.size() || x0.channels() != x0_hat.channels() ||
      m.size() != x0.size()) {
    throw ShapeError("glyph-region loss inputs differ in dimensions");
  }
}

// Sum over entries of (m (x0_hat - x0))^2; optionally writes d/dx0_hat of
// scale * that sum into `grad`.
double masked_sq_error(const ImageBuffer& x0, const ImageBuffer& x0_hat, const Mask& m,
                       ImageBuffer* grad, double scale) {
  double s = 0.0;
  const int ch = x0.channels();
  for (int y = 0; y < x0.height(); ++y) {
    for (int x = 0; x < x0.width(); ++x) {
      const double mv = m.at(x, y);
      for (int c = 0; c < ch; ++c) {
        const double d = mv * (x0_hat.at(x, y, c) - x0.at(x, y, c));
        s += d * d;
        if (grad) grad->at(x, y, c) = scale * 2.0 * mv * d;
      }
    }
  }
  return s;
}

}  // namespace

double loss_gr(const ImageBuffer& x0, const ImageBuffer& x0_hat, const Mask& m_gr) {
  check_gr_shapes(x0, x0_hat, m_gr);
  if (x0.data().empty()) return 0.0;
  return masked_sq_error(x0, x0_hat, m_gr, nullptr, 0.0) /
         static_cast<double>(x0.data().size());
}

LossBreakdown total_loss(double l_fm, double l_gr, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be non-negative");
  return {l_fm, l_gr, lambda, l_fm + lambda * l_gr};
}

TrainingExample make_example(const ImageBuffer& image, const ImageBuffer& condition,
                             const Mask& m_gr, const Codec& codec) {
  if (image.size() != condition.size() || image.size() != m_gr.size()) {
    throw ShapeError("example image, condition and mask differ in dimensions");
  }
  return {image, codec.encode(image), codec.encode(condition), m_gr};
}

ObjectiveResult evaluate_objective(const DenoiserParams& params,
                                   std::span<const TrainingExample> data,
                                   std::span<const BatchItem> batch, double lambda,
                                   const Codec& codec, bool with_grad) {
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be non-negative");
  if (batch.empty()) throw ParameterError("empty batch");
  const int c = params.config.latent_channels;

  std::vector<LatentTensor> zts;
  zts.reserve(batch.size());
  detail::BatchInput in;
  for (const BatchItem& item : batch) {
    if (item.example >= data.size()) throw ParameterError("batch index out of range");
    const TrainingExample& ex = data[item.example];
    if (!item.eps.same_shape(ex.z0)) throw ShapeError("noise shape differs from latent");
    if (!(item.t >= 0.0 && item.t <= 1.0)) throw ParameterError("flow time must lie in [0,1]");
    zts.push_back(axpy(ex.z0, item.t, axpy(item.eps, -1.0, ex.z0)));
  }
  for (std::size_t b = 0; b < batch.size(); ++b) {
    in.zt.push_back(&zts[b]);
    in.z_cond.push_back(&data[batch[b].example].z_cond);
    in.t.push_back(batch[b].t);
  }
  const detail::Activations act = detail::forward(params, in);
  const Eigen::Index pixels = static_cast<Eigen::Index>(zts[0].h()) * zts[0].w();
  const double n = static_cast<double>(act.output.size());

  Eigen::MatrixXd d_out(act.output.rows(), c);
  double fm_sum = 0.0;
  double gr_sum = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const TrainingExample& ex = data[batch[b].example];
    const Eigen::Index r0 = pixels * static_cast<Eigen::Index>(b);
    const auto v_star = Eigen::Map<const RowMatrix>(batch[b].eps.data().data(), pixels, c) -
                        Eigen::Map<const RowMatrix>(ex.z0.data().data(), pixels, c);
    const Eigen::MatrixXd diff = act.output.block(r0, 0, pixels, c) - v_star;
    fm_sum += diff.squaredNorm();
    d_out.block(r0, 0, pixels, c) = (2.0 / n) * diff;

    if (lambda == 0.0) continue;
    const double t = batch[b].t;
    LatentTensor v_pred(zts[b].h(), zts[b].w(), c);
    Eigen::Map<RowMatrix>(v_pred.data().data(), pixels, c) = act.output.block(r0, 0, pixels, c);
    const ImageBuffer x0_hat = reconstruct_x0(zts[b], v_pred, t, codec);
    check_gr_shapes(ex.x0, x0_hat, ex.m_gr);
    ImageBuffer g_img(ex.x0.width(), ex.x0.height(), ex.x0.channels());
    gr_sum += masked_sq_error(ex.x0, x0_hat, ex.m_gr, &g_img, 1.0 / n);
    if (!with_grad || t == 0.0) continue;
    // decode is orthogonal, so its adjoint is encode; d x0_hat / d v = -t.
    const LatentTensor g_z = codec.encode(g_img);
    d_out.block(r0, 0, pixels, c) -=
        (lambda * t) * Eigen::Map<const RowMatrix>(g_z.data().data(), pixels, c);
  }

  ObjectiveResult result{total_loss(fm_sum / n, gr_sum / n, lambda), {}};
  if (with_grad) {
    result.grad = params.zeros_like();
    detail::backpropagate(params, act, d_out, result.grad);
  }
  return result;
}

DenoiserParams backward(const DenoiserParams& params,
                        std::span<const TrainingExample> data,
                        std::span<const BatchItem> batch, double lambda,
                        const Codec& codec) {
  return evaluate_objective(params, data, batch, lambda, codec, true).grad;
}

}  // namespace glyphflow::flow
