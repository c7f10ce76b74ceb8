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

#include "kdnas/search_space.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "kdnas/errors.h"
#include "kdnas/kv_config.h"

namespace kdnas {
namespace {

constexpr std::array<std::string_view, kFieldsPerConvSlot> kSlotFieldNames = {
    "kind", "layers", "kernel", "se_ratio", "skip", "expansion", "out_channels"};
constexpr std::array<std::string_view, kTailFields> kTailFieldNames = {
    "depth", "embed_dim", "heads", "mlp_ratio"};

template <typename T>
void RequireNonEmpty(const std::vector<T>& menu, const std::string& name) {
  if (menu.empty()) throw ConfigError("empty menu for " + name);
}

template <typename T>
void RequireAll(const std::vector<T>& menu, const std::string& name,
                bool (*ok)(T), std::string_view rule) {
  for (const T& v : menu) {
    if (!ok(v)) throw ConfigError(name + ": every value must be " + std::string(rule));
  }
}

template <typename T>
std::size_t IndexIn(const std::vector<T>& menu, const T& value,
                    std::string_view field) {
  const auto it = std::find(menu.begin(), menu.end(), value);
  if (it == menu.end()) {
    throw std::invalid_argument("value of " + std::string(field) +
                                " is not in its menu");
  }
  return static_cast<std::size_t>(it - menu.begin());
}

std::string SlotKey(int slot, std::string_view field) {
  return "slot" + std::to_string(slot + 1) + "." + std::string(field);
}

std::vector<int> ParseIntMenu(const KeyValueFile& kv, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : kv.GetList(key)) {
    out.push_back(static_cast<int>(ParseInt(item, kv.source() + ": " + key)));
  }
  return out;
}

std::vector<double> ParseDoubleMenu(const KeyValueFile& kv,
                                    const std::string& key) {
  std::vector<double> out;
  for (const auto& item : kv.GetList(key)) {
    out.push_back(ParseDouble(item, kv.source() + ": " + key));
  }
  return out;
}

template <typename T>
std::string JoinMenu(const std::vector<T>& menu) {
  std::ostringstream os;
  for (std::size_t i = 0; i < menu.size(); ++i) {
    if (i) os << ' ';
    if constexpr (std::is_same_v<T, BlockKind> || std::is_same_v<T, SkipKind>) {
      os << ToString(menu[i]);
    } else {
      os << menu[i];
    }
  }
  return os.str();
}

// Builds a spec from one menu index per coordinate and canonicalizes it.
ArchitectureSpec FromMenuIndices(const SearchSpaceDef& space,
                                 std::span<const std::size_t> idx) {
  ArchitectureSpec arch;
  std::size_t j = 0;
  for (int s = 0; s < kNumConvSlots; ++s) {
    const SlotMenus& m = space.slots()[s];
    ConvSlotSpec& slot = arch.conv_slots[s];
    slot.kind = m.kind[idx[j++]];
    slot.layers = m.layers[idx[j++]];
    slot.kernel = m.kernel[idx[j++]];
    slot.se_ratio = m.se_ratio[idx[j++]];
    slot.skip = m.skip[idx[j++]];
    slot.expansion = m.expansion[idx[j++]];
    slot.out_channels = m.out_channels[idx[j++]];
    slot.stride = m.stride;
  }
  const TailMenus& t = space.tail();
  arch.tail.depth = t.depth[idx[j++]];
  arch.tail.embed_dim = t.embed_dim[idx[j++]];
  arch.tail.heads = t.heads[idx[j++]];
  arch.tail.mlp_ratio = t.mlp_ratio[idx[j++]];
  return Canonicalize(space, arch);
}

}  // namespace

std::string_view ToString(BlockKind kind) {
  return kind == BlockKind::kMBConv ? "mbconv" : "fused_mbconv";
}

std::string_view ToString(SkipKind skip) {
  return skip == SkipKind::kResidual ? "residual" : "none";
}

BlockKind ParseBlockKind(std::string_view text) {
  if (text == "mbconv") return BlockKind::kMBConv;
  if (text == "fused_mbconv") return BlockKind::kFusedMBConv;
  throw ConfigError("unknown block kind '" + std::string(text) + "'");
}

SkipKind ParseSkipKind(std::string_view text) {
  if (text == "none") return SkipKind::kNone;
  if (text == "residual") return SkipKind::kResidual;
  throw ConfigError("unknown skip kind '" + std::string(text) + "'");
}

SearchSpaceDef::SearchSpaceDef(std::array<SlotMenus, kNumConvSlots> slots,
                               TailMenus tail, int stem_channels,
                               int input_resolution, int num_classes)
    : slots_(std::move(slots)),
      tail_(std::move(tail)),
      stem_channels_(stem_channels),
      input_resolution_(input_resolution),
      num_classes_(num_classes) {
  if (stem_channels_ < 1) throw ConfigError("stem.out_channels must be >= 1");
  if (input_resolution_ < 1) throw ConfigError("input_resolution must be >= 1");
  if (num_classes_ < 1) throw ConfigError("num_classes must be >= 1");

  for (int s = 0; s < kNumConvSlots; ++s) {
    const SlotMenus& m = slots_[s];
    RequireNonEmpty(m.kind, SlotKey(s, "kind"));
    RequireNonEmpty(m.layers, SlotKey(s, "layers"));
    RequireNonEmpty(m.kernel, SlotKey(s, "kernel"));
    RequireNonEmpty(m.se_ratio, SlotKey(s, "se_ratio"));
    RequireNonEmpty(m.skip, SlotKey(s, "skip"));
    RequireNonEmpty(m.expansion, SlotKey(s, "expansion"));
    RequireNonEmpty(m.out_channels, SlotKey(s, "out_channels"));
    RequireAll<int>(m.layers, SlotKey(s, "layers"),
                    [](int v) { return v >= 0 && v <= 4; }, "in 0..4");
    RequireAll<int>(m.kernel, SlotKey(s, "kernel"),
                    [](int v) { return v >= 1 && v % 2 == 1; }, "odd and >= 1");
    RequireAll<double>(m.se_ratio, SlotKey(s, "se_ratio"),
                       [](double v) { return v >= 0.0 && v < 1.0; }, "in [0, 1)");
    RequireAll<int>(m.expansion, SlotKey(s, "expansion"),
                    [](int v) { return v >= 1; }, ">= 1");
    RequireAll<int>(m.out_channels, SlotKey(s, "out_channels"),
                    [](int v) { return v >= 1; }, ">= 1");
    if (m.stride != 1 && m.stride != 2) {
      throw ConfigError(SlotKey(s, "stride") + " must be 1 or 2");
    }
  }
  // An all-inactive backbone is repaired by switching slot 1 on with one
  // layer, which must then be a legal menu value.
  const auto& first_layers = slots_[0].layers;
  if (std::find(first_layers.begin(), first_layers.end(), 0) != first_layers.end() &&
      std::find(first_layers.begin(), first_layers.end(), 1) == first_layers.end()) {
    throw ConfigError("slot1.layers must contain 1 when it contains 0");
  }

  RequireNonEmpty(tail_.depth, "tail.depth");
  RequireNonEmpty(tail_.embed_dim, "tail.embed_dim");
  RequireNonEmpty(tail_.heads, "tail.heads");
  RequireNonEmpty(tail_.mlp_ratio, "tail.mlp_ratio");
  RequireAll<int>(tail_.depth, "tail.depth", [](int v) { return v >= 0; }, ">= 0");
  RequireAll<int>(tail_.embed_dim, "tail.embed_dim", [](int v) { return v >= 1; }, ">= 1");
  RequireAll<int>(tail_.heads, "tail.heads", [](int v) { return v >= 1; }, ">= 1");
  RequireAll<int>(tail_.mlp_ratio, "tail.mlp_ratio", [](int v) { return v >= 1; }, ">= 1");
  for (int e : tail_.embed_dim) {
    for (int h : tail_.heads) {
      if (e % h != 0) {
        throw ConfigError("tail.heads " + std::to_string(h) +
                          " does not divide tail.embed_dim " + std::to_string(e));
      }
    }
  }

  for (const SlotMenus& m : slots_) {
    menu_sizes_.insert(menu_sizes_.end(),
                       {m.kind.size(), m.layers.size(), m.kernel.size(),
                        m.se_ratio.size(), m.skip.size(), m.expansion.size(),
                        m.out_channels.size()});
  }
  menu_sizes_.insert(menu_sizes_.end(),
                     {tail_.depth.size(), tail_.embed_dim.size(),
                      tail_.heads.size(), tail_.mlp_ratio.size()});
}

SearchSpaceDef SearchSpaceDef::Default() {
  static const std::array<std::vector<int>, kNumConvSlots> kOutChannels = {{
      {16, 24, 32, 48},
      {24, 32, 48, 64},
      {32, 48, 64, 96},
      {48, 64, 96, 128},
      {64, 96, 128, 160},
      {96, 128, 160, 192},
      {160, 192, 256, 320},
  }};
  std::array<SlotMenus, kNumConvSlots> slots;
  for (int s = 0; s < kNumConvSlots; ++s) {
    SlotMenus& m = slots[s];
    m.kind = {BlockKind::kFusedMBConv, BlockKind::kMBConv};
    m.layers = {0, 1, 2, 3, 4};
    m.kernel = {3, 5};
    m.se_ratio = {0.0, 0.25};
    m.skip = {SkipKind::kNone, SkipKind::kResidual};
    m.expansion = {1, 4, 6};
    m.out_channels = kOutChannels[s];
    m.stride = (s % 2 == 1) ? 2 : 1;  // slots 2, 4 and 6 downsample
  }
  TailMenus tail;
  for (int depth = 0; depth <= 12; ++depth) tail.depth.push_back(depth);
  tail.embed_dim = {128, 192, 256};
  tail.heads = {4, 8};
  tail.mlp_ratio = {2, 4};
  return SearchSpaceDef(std::move(slots), std::move(tail), /*stem_channels=*/16,
                        /*input_resolution=*/32, /*num_classes=*/10);
}

SearchSpaceDef SearchSpaceDef::Parse(std::string_view text, std::string source) {
  const KeyValueFile kv = KeyValueFile::Parse(text, std::move(source));
  std::array<SlotMenus, kNumConvSlots> slots;
  for (int s = 0; s < kNumConvSlots; ++s) {
    SlotMenus& m = slots[s];
    for (const auto& item : kv.GetList(SlotKey(s, "kind"))) {
      m.kind.push_back(ParseBlockKind(item));
    }
    m.layers = ParseIntMenu(kv, SlotKey(s, "layers"));
    m.kernel = ParseIntMenu(kv, SlotKey(s, "kernel"));
    m.se_ratio = ParseDoubleMenu(kv, SlotKey(s, "se_ratio"));
    for (const auto& item : kv.GetList(SlotKey(s, "skip"))) {
      m.skip.push_back(ParseSkipKind(item));
    }
    m.expansion = ParseIntMenu(kv, SlotKey(s, "expansion"));
    m.out_channels = ParseIntMenu(kv, SlotKey(s, "out_channels"));
    m.stride = static_cast<int>(kv.GetIntOr(SlotKey(s, "stride"), 1));
  }
  TailMenus tail;
  tail.depth = ParseIntMenu(kv, "tail.depth");
  tail.embed_dim = ParseIntMenu(kv, "tail.embed_dim");
  tail.heads = ParseIntMenu(kv, "tail.heads");
  tail.mlp_ratio = ParseIntMenu(kv, "tail.mlp_ratio");

  const int stem = static_cast<int>(kv.GetIntOr("stem.out_channels", 16));
  const int res = static_cast<int>(kv.GetIntOr("input_resolution", 32));
  const int classes = static_cast<int>(kv.GetIntOr("num_classes", 10));
  if (const auto unread = kv.Unread(); !unread.empty()) {
    throw ConfigError(kv.source() + ": unknown key '" + unread.front() + "'");
  }
  return SearchSpaceDef(std::move(slots), std::move(tail), stem, res, classes);
}

SearchSpaceDef SearchSpaceDef::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read search space file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), path.string());
}

std::string SearchSpaceDef::ToText() const {
  std::ostringstream os;
  os << "input_resolution = " << input_resolution_ << "\n";
  os << "num_classes = " << num_classes_ << "\n";
  os << "stem.out_channels = " << stem_channels_ << "\n";
  for (int s = 0; s < kNumConvSlots; ++s) {
    const SlotMenus& m = slots_[s];
    os << "\n";
    os << SlotKey(s, "stride") << " = " << m.stride << "\n";
    os << SlotKey(s, "kind") << " = " << JoinMenu(m.kind) << "\n";
    os << SlotKey(s, "layers") << " = " << JoinMenu(m.layers) << "\n";
    os << SlotKey(s, "kernel") << " = " << JoinMenu(m.kernel) << "\n";
    os << SlotKey(s, "se_ratio") << " = " << JoinMenu(m.se_ratio) << "\n";
    os << SlotKey(s, "skip") << " = " << JoinMenu(m.skip) << "\n";
    os << SlotKey(s, "expansion") << " = " << JoinMenu(m.expansion) << "\n";
    os << SlotKey(s, "out_channels") << " = " << JoinMenu(m.out_channels) << "\n";
  }
  os << "\n";
  os << "tail.depth = " << JoinMenu(tail_.depth) << "\n";
  os << "tail.embed_dim = " << JoinMenu(tail_.embed_dim) << "\n";
  os << "tail.heads = " << JoinMenu(tail_.heads) << "\n";
  os << "tail.mlp_ratio = " << JoinMenu(tail_.mlp_ratio) << "\n";
  return os.str();
}

std::string SearchSpaceDef::coordinate_name(std::size_t index) const {
  if (index >= dimensionality()) throw std::out_of_range("coordinate index");
  const std::size_t conv = kNumConvSlots * kFieldsPerConvSlot;
  if (index < conv) {
    return SlotKey(static_cast<int>(index / kFieldsPerConvSlot),
                   kSlotFieldNames[index % kFieldsPerConvSlot]);
  }
  return "tail." + std::string(kTailFieldNames[index - conv]);
}

EncodedPoint::EncodedPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const double v = coords_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument("coordinate " + std::to_string(i) +
                                  " is not a finite value in [0, 1]");
    }
  }
}

std::size_t Dimensionality(const SearchSpaceDef& space) {
  return space.dimensionality();
}

std::size_t MenuIndex(double v, std::size_t k) {
  const auto i = static_cast<std::size_t>(std::floor(v * static_cast<double>(k)));
  return std::min(i, k - 1);
}

ArchitectureSpec Canonicalize(const SearchSpaceDef& space,
                              ArchitectureSpec arch) {
  arch.stem = StemSpec{space.stem_channels(), 3, 2};

  bool any_active = false;
  for (int s = 0; s < kNumConvSlots; ++s) {
    const SlotMenus& m = space.slots()[s];
    ConvSlotSpec& slot = arch.conv_slots[s];
    slot.stride = m.stride;
    if (!slot.active()) {
      slot = ConvSlotSpec{m.kind[0], slot.layers, m.kernel[0], m.se_ratio[0],
                          m.skip[0], m.expansion[0], m.out_channels[0], m.stride};
    }
    any_active = any_active || slot.active();
  }
  if (!any_active) arch.conv_slots[0].layers = 1;

  int channels = arch.stem.out_channels;
  for (ConvSlotSpec& slot : arch.conv_slots) {
    if (!slot.active()) continue;
    if (slot.skip == SkipKind::kResidual && slot.layers == 1 &&
        !ResidualLegal(slot, channels, 0)) {
      slot.skip = SkipKind::kNone;
    }
    channels = slot.out_channels;
  }

  const TailMenus& t = space.tail();
  if (arch.tail.depth == 0) {
    arch.tail = TransformerTailSpec{0, t.embed_dim[0], t.heads[0], t.mlp_ratio[0]};
  }
  arch.head.hidden = arch.tail.depth > 0 ? arch.tail.embed_dim : channels;
  arch.head.num_classes = space.num_classes();
  return arch;
}

ArchitectureSpec Decode(const SearchSpaceDef& space, const EncodedPoint& point) {
  const auto& sizes = space.menu_sizes();
  if (point.size() != sizes.size()) {
    throw std::invalid_argument("point has " + std::to_string(point.size()) +
                                " coordinates, space expects " +
                                std::to_string(sizes.size()));
  }
  std::vector<std::size_t> idx(sizes.size());
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    if (std::isnan(point[j])) throw std::invalid_argument("NaN coordinate");
    idx[j] = MenuIndex(point[j], sizes[j]);
  }
  return FromMenuIndices(space, idx);
}

EncodedPoint Encode(const SearchSpaceDef& space, const ArchitectureSpec& arch) {
  std::vector<double> coords;
  coords.reserve(space.dimensionality());
  auto put = [&coords](const auto& menu, const auto& value, std::string_view field) {
    const std::size_t i = IndexIn(menu, value, field);
    coords.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(menu.size()));
  };
  for (int s = 0; s < kNumConvSlots; ++s) {
    const SlotMenus& m = space.slots()[s];
    const ConvSlotSpec& slot = arch.conv_slots[s];
    put(m.kind, slot.kind, "kind");
    put(m.layers, slot.layers, "layers");
    put(m.kernel, slot.kernel, "kernel");
    put(m.se_ratio, slot.se_ratio, "se_ratio");
    put(m.skip, slot.skip, "skip");
    put(m.expansion, slot.expansion, "expansion");
    put(m.out_channels, slot.out_channels, "out_channels");
  }
  const TailMenus& t = space.tail();
  put(t.depth, arch.tail.depth, "tail.depth");
  put(t.embed_dim, arch.tail.embed_dim, "tail.embed_dim");
  put(t.heads, arch.tail.heads, "tail.heads");
  put(t.mlp_ratio, arch.tail.mlp_ratio, "tail.mlp_ratio");
  return EncodedPoint(std::move(coords));
}

ArchitectureSpec RandomArch(const SearchSpaceDef& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& sizes = space.menu_sizes();
  std::vector<std::size_t> idx(sizes.size());
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    idx[j] = std::uniform_int_distribution<std::size_t>(0, sizes[j] - 1)(rng);
  }
  return FromMenuIndices(space, idx);
}

int SlotInputChannels(const ArchitectureSpec& arch, int slot) {
  int channels = arch.stem.out_channels;
  for (int s = 0; s < slot; ++s) {
    if (arch.conv_slots[s].active()) channels = arch.conv_slots[s].out_channels;
  }
  return channels;
}

bool ResidualLegal(const ConvSlotSpec& slot, int in_channels, int layer) {
  if (layer > 0) return true;  // later layers: stride 1, out -> out
  return slot.stride == 1 && in_channels == slot.out_channels;
}

void ValidateArchitecture(const SearchSpaceDef& space,
                          const ArchitectureSpec& arch) {
  Encode(space, arch);  // every field in its menu
  if (arch.stem != StemSpec{space.stem_channels(), 3, 2}) {
    throw std::invalid_argument("stem does not match the search space");
  }
  bool any_active = false;
  int channels = arch.stem.out_channels;
  for (int s = 0; s < kNumConvSlots; ++s) {
    const ConvSlotSpec& slot = arch.conv_slots[s];
    if (slot.stride != space.slots()[s].stride) {
      throw std::invalid_argument(SlotKey(s, "stride") + " does not match the slot");
    }
    if (!slot.active()) continue;
    any_active = true;
    if (slot.skip == SkipKind::kResidual && slot.layers == 1 &&
        !ResidualLegal(slot, channels, 0)) {
      throw std::invalid_argument(SlotKey(s, "skip") +
                                  ": residual needs stride 1 and matching channels");
    }
    channels = slot.out_channels;
  }
  if (!any_active) throw std::invalid_argument("no active conv slot");
  if (arch.tail.embed_dim % arch.tail.heads != 0) {
    throw std::invalid_argument("tail.heads must divide tail.embed_dim");
  }
  const int hidden = arch.tail.depth > 0 ? arch.tail.embed_dim : channels;
  if (arch.head.hidden != hidden || arch.head.num_classes != space.num_classes()) {
    throw std::invalid_argument("head does not match the feature width");
  }
}

nlohmann::json ToJson(const ArchitectureSpec& arch) {
  nlohmann::json slots = nlohmann::json::array();
  for (const ConvSlotSpec& s : arch.conv_slots) {
    slots.push_back({{"kind", ToString(s.kind)},
                     {"layers", s.layers},
                     {"kernel", s.kernel},
                     {"se_ratio", s.se_ratio},
                     {"skip", ToString(s.skip)},
                     {"expansion", s.expansion},
                     {"out_channels", s.out_channels},
                     {"stride", s.stride}});
  }
  return {{"stem",
           {{"out_channels", arch.stem.out_channels},
            {"kernel", arch.stem.kernel},
            {"stride", arch.stem.stride}}},
          {"conv_slots", std::move(slots)},
          {"tail",
           {{"depth", arch.tail.depth},
            {"embed_dim", arch.tail.embed_dim},
            {"heads", arch.tail.heads},
            {"mlp_ratio", arch.tail.mlp_ratio}}},
          {"head",
           {{"hidden", arch.head.hidden},
            {"num_classes", arch.head.num_classes}}}};
}

ArchitectureSpec ArchitectureFromJson(const nlohmann::json& j) {
  ArchitectureSpec arch;
  const auto& stem = j.at("stem");
  arch.stem = {stem.at("out_channels").get<int>(), stem.at("kernel").get<int>(),
               stem.at("stride").get<int>()};
  const auto& slots = j.at("conv_slots");
  if (!slots.is_array() || slots.size() != kNumConvSlots) {
    throw std::invalid_argument("conv_slots must list exactly 7 slots");
  }
  for (int s = 0; s < kNumConvSlots; ++s) {
    const auto& js = slots[s];
    ConvSlotSpec& slot = arch.conv_slots[s];
    slot.kind = ParseBlockKind(js.at("kind").get<std::string>());
    slot.layers = js.at("layers").get<int>();
    slot.kernel = js.at("kernel").get<int>();
    slot.se_ratio = js.at("se_ratio").get<double>();
    slot.skip = ParseSkipKind(js.at("skip").get<std::string>());
    slot.expansion = js.at("expansion").get<int>();
    slot.out_channels = js.at("out_channels").get<int>();
    slot.stride = js.at("stride").get<int>();
  }
  const auto& tail = j.at("tail");
  arch.tail = {tail.at("depth").get<int>(), tail.at("embed_dim").get<int>(),
               tail.at("heads").get<int>(), tail.at("mlp_ratio").get<int>()};
  const auto& head = j.at("head");
  arch.head = {head.at("hidden").get<int>(), head.at("num_classes").get<int>()};
  return arch;
}

}  // namespace kdnas
