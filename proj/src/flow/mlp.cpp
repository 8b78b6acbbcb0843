#include "glyphflow/flow/detail/mlp.hpp"

#include <cmath>

namespace glyphflow::flow::detail {

namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

}  // namespace

Activations forward(const DenoiserParams& params, const BatchInput& in) {
  const DenoiserConfig& cfg = params.config;
  const int c = cfg.latent_channels;
  const std::size_t batch = in.zt.size();
  const Eigen::Index pixels = batch == 0 ? 0 : static_cast<Eigen::Index>(in.zt[0]->h()) * in.zt[0]->w();
  const Eigen::Index rows = pixels * static_cast<Eigen::Index>(batch);

  Activations act;
  act.input = Eigen::MatrixXd::Zero(rows, cfg.input_dim());
  for (std::size_t b = 0; b < batch; ++b) {
    const Eigen::Index r0 = pixels * static_cast<Eigen::Index>(b);
    const LatentTensor& zt = *in.zt[b];
    const LatentTensor& zc = *in.z_cond[b];
    if (zt.h() * zt.w() != pixels || !zt.same_shape(zc) || zt.c() != c) {
      throw ShapeError("batch entries must share one latent shape");
    }
    act.input.block(r0, 0, pixels, c) =
        Eigen::Map<const RowMatrix>(zt.data().data(), pixels, c);
    act.input.block(r0, c, pixels, c) =
        Eigen::Map<const RowMatrix>(zc.data().data(), pixels, c);
    const std::vector<double> emb = time_embedding(in.t[b], cfg.time_embed_dim);
    for (int k = 0; k < cfg.time_embed_dim; ++k) {
      act.input.block(r0, 2 * c + k, pixels, 1).setConstant(emb[static_cast<std::size_t>(k)]);
    }
    // The text-embedding columns stay zero.
  }

  const Eigen::MatrixXd* x = &act.input;
  const std::size_t n_layers = params.layers.size();
  for (std::size_t l = 0; l + 1 < n_layers; ++l) {
    const DenseLayer& layer = params.layers[l];
    Eigen::MatrixXd a = (*x) * layer.weight.transpose();
    a.rowwise() += layer.bias.transpose();
    Eigen::MatrixXd h = a.unaryExpr([](double v) { return v * sigmoid(v); });
    act.pre.push_back(std::move(a));
    act.hidden.push_back(std::move(h));
    x = &act.hidden.back();
  }
  const DenseLayer& last = params.layers.back();
  act.output = (*x) * last.weight.transpose();
  act.output.rowwise() += last.bias.transpose();
  return act;
}

void backpropagate(const DenoiserParams& params, const Activations& act,
                   const Eigen::MatrixXd& d_output, DenoiserParams& grad) {
  Eigen::MatrixXd delta = d_output;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const Eigen::MatrixXd& x = l == 0 ? act.input : act.hidden[l - 1];
    grad.layers[l].weight.noalias() += delta.transpose() * x;
    grad.layers[l].bias.noalias() += delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd dh = delta * params.layers[l].weight;
    const Eigen::MatrixXd& a = act.pre[l - 1];
    delta = dh.binaryExpr(a, [](double g, double v) {
      const double s = sigmoid(v);
      return g * s * (1.0 + v * (1.0 - s));
    });
  }
}

}  // namespace glyphflow::flow::detail
