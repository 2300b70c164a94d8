#include "augmod/nn/layers.hpp"

namespace augmod::nn {

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv1d: return "conv1d";
    case LayerKind::Dense: return "dense";
    case LayerKind::Relu: return "relu";
    case LayerKind::GlobalAvgPool: return "global_avg_pool";
    case LayerKind::Dropout: return "dropout";
    case LayerKind::Softmax: return "softmax";
    case LayerKind::Residual: return "residual";
  }
  throw std::invalid_argument("unknown layer kind");
}

LayerKind layer_kind_from_name(const std::string& name) {
  for (LayerKind k : {LayerKind::Conv1d, LayerKind::Dense, LayerKind::Relu,
                      LayerKind::GlobalAvgPool, LayerKind::Dropout, LayerKind::Softmax,
                      LayerKind::Residual})
    if (name == layer_kind_name(k)) return k;
  throw std::invalid_argument("unknown layer kind: " + name);
}

std::int64_t param_count(const std::vector<LayerSpec>& layers) {
  auto conv = [](std::int64_t in, std::int64_t out, std::int64_t k) { return in * out * k + out; };
  std::int64_t total = 0;
  for (const LayerSpec& l : layers) {
    l.validate();
    switch (l.kind) {
      case LayerKind::Conv1d:
        total += conv(l.in_channels, l.out_channels, l.kernel);
        break;
      case LayerKind::Dense:
        total += static_cast<std::int64_t>(l.in_channels) * l.out_channels + l.out_channels;
        break;
      case LayerKind::Residual:
        total += conv(l.in_channels, l.out_channels, 1);
        total += 2 * conv(l.out_channels, l.out_channels, 7);
        break;
      default:
        break;  // activations, pooling, dropout, softmax carry no parameters
    }
  }
  return total;
}

}  // namespace augmod::nn
