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

#ifndef KDNAS_COST_MODEL_H_
#define KDNAS_COST_MODEL_H_

// Analytic parameter / FLOP counting. One multiply-accumulate is two flops.
// Normalization layers and activations are free; SE convolutions, the
// Transformer projections and the classifier carry biases, the remaining
// convolutions (all followed by normalization) do not.

#include <cstdint>

#include "kdnas/search_space.h"

namespace kdnas {

struct TensorShape {
  int height = 1;
  int width = 1;
  int channels = 1;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

struct ResourceProfile {
  std::int64_t params = 0;
  std::int64_t flops = 0;
  std::int64_t layers = 0;  // weight layers (conv / linear), for the latency proxy
  double latency_proxy = 0.0;  // seconds

  ResourceProfile& operator+=(const ResourceProfile& o) {
    params += o.params;
    flops += o.flops;
    layers += o.layers;
    latency_proxy += o.latency_proxy;
    return *this;
  }
  friend ResourceProfile operator+(ResourceProfile a, const ResourceProfile& b) {
    return a += b;
  }
  friend bool operator==(const ResourceProfile&, const ResourceProfile&) = default;
};

// Linear latency proxy standing in for a hardware measurement.
struct LatencyModelConfig {
  double per_flop = 1e-12;   // s / flop
  double per_param = 1e-10;  // s / param
  double per_layer = 2e-5;   // s / weight layer
};

struct BlockCost {
  ResourceProfile profile;
  TensorShape out;
};

// "Same" padding: H_out = ceil(H / stride).
BlockCost ConvCost(const TensorShape& in, int kernel, int out_channels,
                   int stride, int groups, bool bias);

// Global pool, 1x1 down to max(1, floor(se_ratio * base_channels)), 1x1 up to
// `channels`, both at 1x1 spatial size.
ResourceProfile SqueezeExciteCost(int channels, int base_channels,
                                  double se_ratio);

BlockCost MBConvCost(const TensorShape& in, const ConvSlotSpec& slot);
BlockCost FusedMBConvCost(const TensorShape& in, const ConvSlotSpec& slot);

// Input projection (once) plus `depth` encoder blocks on H*W tokens.
// Throws std::invalid_argument for depth 0.
ResourceProfile TransformerTailCost(const TensorShape& in,
                                    const TransformerTailSpec& tail);

double LatencyProxy(const ResourceProfile& p, const LatencyModelConfig& cfg);

ResourceProfile Profile(const SearchSpaceDef& space,
                        const ArchitectureSpec& arch,
                        const LatencyModelConfig& latency = {});

}  // namespace kdnas

#endif  // KDNAS_COST_MODEL_H_
