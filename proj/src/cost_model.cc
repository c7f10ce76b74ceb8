// Copyright 2026 The kdnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kdnas/cost_model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kdnas {
namespace {

int CeilDiv(int a, int b) { return (a + b - 1) / b; }

void CheckShape(const TensorShape& s) {
  if (s.height < 1 || s.width < 1 || s.channels < 1) {
    throw std::invalid_argument("tensor shape fields must be >= 1");
  }
}

// One layer of an inverted-bottleneck block.
BlockCost MBConvLayer(const TensorShape& in, const ConvSlotSpec& slot,
                      int stride) {
  const int hidden = in.channels * slot.expansion;
  BlockCost acc{{}, in};
  if (slot.expansion != 1) {
    const BlockCost expand = ConvCost(acc.out, 1, hidden, 1, 1, false);
    acc = {acc.profile + expand.profile, expand.out};
  }
  const BlockCost dw = ConvCost(acc.out, slot.kernel, hidden, stride, hidden, false);
  acc = {acc.profile + dw.profile, dw.out};
  if (slot.se_ratio > 0.0) {
    acc.profile += SqueezeExciteCost(hidden, in.channels, slot.se_ratio);
  }
  const BlockCost project = ConvCost(acc.out, 1, slot.out_channels, 1, 1, false);
  return {acc.profile + project.profile, project.out};
}

BlockCost FusedMBConvLayer(const TensorShape& in, const ConvSlotSpec& slot,
                           int stride) {
  if (slot.expansion == 1) {
    BlockCost conv = ConvCost(in, slot.kernel, slot.out_channels, stride, 1, false);
    if (slot.se_ratio > 0.0) {
      conv.profile += SqueezeExciteCost(slot.out_channels, in.channels, slot.se_ratio);
    }
    return conv;
  }
  const int hidden = in.channels * slot.expansion;
  BlockCost acc = ConvCost(in, slot.kernel, hidden, stride, 1, false);
  if (slot.se_ratio > 0.0) {
    acc.profile += SqueezeExciteCost(hidden, in.channels, slot.se_ratio);
  }
  const BlockCost project = ConvCost(acc.out, 1, slot.out_channels, 1, 1, false);
  return {acc.profile + project.profile, project.out};
}

template <typename LayerFn>
BlockCost Repeat(const TensorShape& in, const ConvSlotSpec& slot, LayerFn layer) {
  BlockCost acc{{}, in};
  for (int i = 0; i < slot.layers; ++i) {
    const BlockCost c = layer(acc.out, slot, i == 0 ? slot.stride : 1);
    acc = {acc.profile + c.profile, c.out};
  }
  return acc;
}

}  // namespace

BlockCost ConvCost(const TensorShape& in, int kernel, int out_channels,
                   int stride, int groups, bool bias) {
  CheckShape(in);
  if (kernel < 1 || out_channels < 1 || groups < 1) {
    throw std::invalid_argument("kernel, out_channels and groups must be >= 1");
  }
  if (stride != 1 && stride != 2) throw std::invalid_argument("stride must be 1 or 2");
  if (in.channels % groups != 0 || out_channels % groups != 0) {
    throw std::invalid_argument("channels (" + std::to_string(in.channels) + " -> " +
                                std::to_string(out_channels) +
                                ") not divisible by groups " + std::to_string(groups));
  }
  const TensorShape out{CeilDiv(in.height, stride), CeilDiv(in.width, stride),
                        out_channels};
  const std::int64_t weights = std::int64_t{kernel} * kernel *
                               (in.channels / groups) * out_channels;
  const std::int64_t positions = std::int64_t{out.height} * out.width;
  ResourceProfile p;
  p.params = weights + (bias ? out_channels : 0);
  p.flops = 2 * positions * weights + (bias ? positions * out_channels : 0);
  p.layers = 1;
  return {p, out};
}

ResourceProfile SqueezeExciteCost(int channels, int base_channels,
                                  double se_ratio) {
  const int squeezed =
      std::max(1, static_cast<int>(std::floor(se_ratio * base_channels)));
  const TensorShape pooled{1, 1, channels};
  const BlockCost down = ConvCost(pooled, 1, squeezed, 1, 1, true);
  const BlockCost up = ConvCost(down.out, 1, channels, 1, 1, true);
  return down.profile + up.profile;
}

BlockCost MBConvCost(const TensorShape& in, const ConvSlotSpec& slot) {
  if (slot.kind != BlockKind::kMBConv) {
    throw std::invalid_argument("MBConvCost needs an MBConv slot");
  }
  return Repeat(in, slot, MBConvLayer);
}

BlockCost FusedMBConvCost(const TensorShape& in, const ConvSlotSpec& slot) {
  if (slot.kind != BlockKind::kFusedMBConv) {
    throw std::invalid_argument("FusedMBConvCost needs a Fused-MBConv slot");
  }
  return Repeat(in, slot, FusedMBConvLayer);
}

ResourceProfile TransformerTailCost(const TensorShape& in,
                                    const TransformerTailSpec& tail) {
  if (tail.depth < 1) throw std::invalid_argument("transformer tail depth must be >= 1");
  CheckShape(in);
  const std::int64_t tokens = std::int64_t{in.height} * in.width;
  const std::int64_t d = tail.embed_dim;
  const std::int64_t r = tail.mlp_ratio;

  ResourceProfile block;
  // q, k, v and output projections; scores QK^T and the weighted sum AV.
  block.params = 4 * d * d + 4 * d;
  block.flops = 2 * tokens * (4 * d * d) + 2 * 2 * tokens * tokens * d;
  // Two-layer FFN d -> r*d -> d.
  block.params += 2 * r * d * d + (r + 1) * d;
  block.flops += 2 * tokens * 2 * r * d * d;
  block.layers = 6;

  ResourceProfile total = ConvCost(in, 1, tail.embed_dim, 1, 1, true).profile;
  for (int i = 0; i < tail.depth; ++i) total += block;
  return total;
}

double LatencyProxy(const ResourceProfile& p, const LatencyModelConfig& cfg) {
  return cfg.per_flop * static_cast<double>(p.flops) +
         cfg.per_param * static_cast<double>(p.params) +
         cfg.per_layer * static_cast<double>(p.layers);
}

ResourceProfile Profile(const SearchSpaceDef& space,
                        const ArchitectureSpec& arch,
                        const LatencyModelConfig& latency) {
  ValidateArchitecture(space, arch);
  const int res = space.input_resolution();
  BlockCost acc = ConvCost({res, res, 3}, arch.stem.kernel, arch.stem.out_channels,
                           arch.stem.stride, 1, false);
  for (const ConvSlotSpec& slot : arch.conv_slots) {
    if (!slot.active()) continue;
    const BlockCost c = slot.kind == BlockKind::kMBConv ? MBConvCost(acc.out, slot)
                                                        : FusedMBConvCost(acc.out, slot);
    acc = {acc.profile + c.profile, c.out};
  }
  if (arch.tail.depth > 0) acc.profile += TransformerTailCost(acc.out, arch.tail);
  acc.profile += ConvCost({1, 1, arch.head.hidden}, 1, arch.head.num_classes, 1, 1,
                          true).profile;
  acc.profile.latency_proxy = LatencyProxy(acc.profile, latency);
  return acc.profile;
}

}  // namespace kdnas
