#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "glyphflow/flow/denoiser.hpp"
#include "glyphflow/flow/latent.hpp"
#include "glyphflow/imaging/image.hpp"

namespace glyphflow::flow {

using imaging::Mask;

// Point on the linear path between data z0 (t=0) and noise eps (t=1).
struct FlowSample {
  LatentTensor z0;
  LatentTensor eps;
  double t = 0.0;
  LatentTensor zt;      // (1 - t) z0 + t eps
  LatentTensor v_star;  // eps - z0
};

FlowSample sample_flow(const LatentTensor& z0, const LatentTensor& eps, double t);

// Mean squared difference over all entries.
double loss_fm(const LatentTensor& v_pred, const LatentTensor& v_star);

// decode(zt - t v_pred).
ImageBuffer reconstruct_x0(const LatentTensor& zt, const LatentTensor& v_pred, double t,
                           const Codec& codec);

// Mean over all H*W*C entries of (m ⊙ (x0_hat - x0))^2.
double loss_gr(const ImageBuffer& x0, const ImageBuffer& x0_hat, const Mask& m_gr);

struct LossBreakdown {
  double l_fm = 0.0;
  double l_gr = 0.0;
  double lambda = 0.0;
  double total = 0.0;
};

// total = l_fm + lambda * l_gr; lambda must be non-negative.
LossBreakdown total_loss(double l_fm, double l_gr, double lambda);

// One training scene in both spaces.
struct TrainingExample {
  ImageBuffer x0;
  LatentTensor z0;      // encode(x0)
  LatentTensor z_cond;  // encode(condition image)
  Mask m_gr;
};

TrainingExample make_example(const ImageBuffer& image, const ImageBuffer& condition,
                             const Mask& m_gr, const Codec& codec);

struct BatchItem {
  std::size_t example = 0;
  LatentTensor eps;
  double t = 0.0;
};

struct ObjectiveResult {
  LossBreakdown loss;
  DenoiserParams grad;  // gradients of loss.total; empty unless requested
};

// Forward pass over a batch and, when `with_grad`, reverse-mode gradients of
// the total loss through the velocity head, and for lambda > 0 through the
// x0 reconstruction and the decoder. Losses are means over every entry of
// the batch. The glyph-region term is skipped entirely when lambda == 0.
ObjectiveResult evaluate_objective(const DenoiserParams& params,
                                   std::span<const TrainingExample> data,
                                   std::span<const BatchItem> batch, double lambda,
                                   const Codec& codec, bool with_grad = true);

// Gradient set of the total loss; see evaluate_objective.
DenoiserParams backward(const DenoiserParams& params,
                        std::span<const TrainingExample> data,
                        std::span<const BatchItem> batch, double lambda,
                        const Codec& codec);

}  // namespace glyphflow::flow
