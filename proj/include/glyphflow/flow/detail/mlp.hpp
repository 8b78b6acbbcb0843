#pragma once

// Batched forward and reverse passes shared by inference and training.

#include <vector>

#include <Eigen/Core>

#include "glyphflow/flow/denoiser.hpp"

namespace glyphflow::flow::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Samples stacked along rows: sample b owns rows [b*h*w, (b+1)*h*w).
struct BatchInput {
  std::vector<const LatentTensor*> zt;
  std::vector<const LatentTensor*> z_cond;
  std::vector<double> t;
};

struct Activations {
  Eigen::MatrixXd input;                // R x in
  std::vector<Eigen::MatrixXd> pre;     // per hidden layer, R x width
  std::vector<Eigen::MatrixXd> hidden;  // silu(pre)
  Eigen::MatrixXd output;               // R x c
};

Activations forward(const DenoiserParams& params, const BatchInput& in);

// Accumulates parameter gradients given dL/d(output).
void backpropagate(const DenoiserParams& params, const Activations& act,
                   const Eigen::MatrixXd& d_output, DenoiserParams& grad);

}  // namespace glyphflow::flow::detail
