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

#ifndef KDNAS_SEARCH_SPACE_H_
#define KDNAS_SEARCH_SPACE_H_

// The factorized hybrid search space: a fixed stem, seven convolutional slots
// (each a stack of identical Fused-MBConv or MBConv layers), an optional
// Transformer tail, and a classifier head. Every searchable field is one
// coordinate of the unit hypercube the optimizer works in.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace kdnas {

inline constexpr int kNumConvSlots = 7;
inline constexpr int kFieldsPerConvSlot = 7;
inline constexpr int kTailFields = 4;

enum class BlockKind { kFusedMBConv, kMBConv };
enum class SkipKind { kNone, kResidual };

std::string_view ToString(BlockKind kind);
std::string_view ToString(SkipKind skip);
BlockKind ParseBlockKind(std::string_view text);
SkipKind ParseSkipKind(std::string_view text);

struct ConvSlotSpec {
  BlockKind kind = BlockKind::kFusedMBConv;
  int layers = 0;  // 0 = slot inactive
  int kernel = 3;
  double se_ratio = 0.0;
  SkipKind skip = SkipKind::kNone;
  int expansion = 1;
  int out_channels = 16;
  int stride = 1;  // fixed by slot position, not searched

  bool active() const { return layers > 0; }
  friend bool operator==(const ConvSlotSpec&, const ConvSlotSpec&) = default;
};

struct TransformerTailSpec {
  int depth = 0;  // 0 = no tail; the conv backbone feeds the head directly
  int embed_dim = 128;
  int heads = 4;
  int mlp_ratio = 2;

  friend bool operator==(const TransformerTailSpec&,
                         const TransformerTailSpec&) = default;
};

struct StemSpec {
  int out_channels = 16;
  int kernel = 3;
  int stride = 2;

  friend bool operator==(const StemSpec&, const StemSpec&) = default;
};

struct HeadSpec {
  int hidden = 0;  // width of the pooled feature entering the classifier
  int num_classes = 10;

  friend bool operator==(const HeadSpec&, const HeadSpec&) = default;
};

struct ArchitectureSpec {
  StemSpec stem;
  std::array<ConvSlotSpec, kNumConvSlots> conv_slots;
  TransformerTailSpec tail;
  HeadSpec head;

  friend bool operator==(const ArchitectureSpec&,
                         const ArchitectureSpec&) = default;
};

// Menus for one conv slot. Every vector must be non-empty.
struct SlotMenus {
  std::vector<BlockKind> kind;
  std::vector<int> layers;
  std::vector<int> kernel;
  std::vector<double> se_ratio;
  std::vector<SkipKind> skip;
  std::vector<int> expansion;
  std::vector<int> out_channels;
  int stride = 1;
};

struct TailMenus {
  std::vector<int> depth;
  std::vector<int> embed_dim;
  std::vector<int> heads;
  std::vector<int> mlp_ratio;
};

class SearchSpaceDef {
 public:
  // Throws ConfigError on empty menus or inconsistent values.
  SearchSpaceDef(std::array<SlotMenus, kNumConvSlots> slots, TailMenus tail,
                 int stem_channels, int input_resolution, int num_classes);

  // The shipped space (MnasNet-style ranges scaled for 32 px inputs).
  static SearchSpaceDef Default();
  static SearchSpaceDef Parse(std::string_view text,
                              std::string source = "<string>");
  static SearchSpaceDef Load(const std::filesystem::path& path);

  // Key-value text accepted by Parse.
  std::string ToText() const;

  const std::array<SlotMenus, kNumConvSlots>& slots() const { return slots_; }
  const TailMenus& tail() const { return tail_; }
  int stem_channels() const { return stem_channels_; }
  int input_resolution() const { return input_resolution_; }
  int num_classes() const { return num_classes_; }

  std::size_t dimensionality() const { return menu_sizes_.size(); }
  // Menu size behind each coordinate, in coordinate order.
  const std::vector<std::size_t>& menu_sizes() const { return menu_sizes_; }
  // "slot3.kernel", "tail.depth", ...
  std::string coordinate_name(std::size_t index) const;

 private:
  std::array<SlotMenus, kNumConvSlots> slots_;
  TailMenus tail_;
  int stem_channels_;
  int input_resolution_;
  int num_classes_;
  std::vector<std::size_t> menu_sizes_;
};

// A point of [0,1]^d. Construction rejects non-finite or out-of-range values.
class EncodedPoint {
 public:
  EncodedPoint() = default;
  explicit EncodedPoint(std::vector<double> coords);

  std::span<const double> coords() const { return coords_; }
  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const EncodedPoint&, const EncodedPoint&) = default;

 private:
  std::vector<double> coords_;
};

std::size_t Dimensionality(const SearchSpaceDef& space);

// Maps a coordinate to a menu index: floor(v * k) clamped to k - 1.
std::size_t MenuIndex(double v, std::size_t k);

// Applies the repair rules that make every decoded spec valid: inactive slot
// fields and unused tail fields reset to their first menu entry, an empty
// backbone gets slot 1 switched on with one layer, residual skips that no
// layer of the slot can carry become none, and the head width follows the
// last feature producer.
ArchitectureSpec Canonicalize(const SearchSpaceDef& space,
                              ArchitectureSpec arch);

ArchitectureSpec Decode(const SearchSpaceDef& space, const EncodedPoint& point);

// Bin-center encoding (i + 0.5) / k. Throws std::invalid_argument when a field
// value is not in its menu.
EncodedPoint Encode(const SearchSpaceDef& space, const ArchitectureSpec& arch);

ArchitectureSpec RandomArch(const SearchSpaceDef& space, std::uint64_t seed);

// Throws std::invalid_argument naming the first violated invariant.
void ValidateArchitecture(const SearchSpaceDef& space,
                          const ArchitectureSpec& arch);

// Channels entering slot `slot` (stem output for the first active slot).
int SlotInputChannels(const ArchitectureSpec& arch, int slot);

// Whether layer `layer` (0-based) of an active slot may carry a residual
// connection given the slot's input channels.
bool ResidualLegal(const ConvSlotSpec& slot, int in_channels, int layer);

nlohmann::json ToJson(const ArchitectureSpec& arch);
ArchitectureSpec ArchitectureFromJson(const nlohmann::json& j);

}  // namespace kdnas

#endif  // KDNAS_SEARCH_SPACE_H_
