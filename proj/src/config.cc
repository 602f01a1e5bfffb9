// Copyright 2026 The FalconNet Toolkit Authors.
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

#include <fstream>
#include <set>
#include <sstream>

#include "falcon/error.h"
#include "falcon/model.h"
#include "internal.h"
#include "json.hpp"

namespace falcon {

using internal::Cat;
using nlohmann::json;

std::string_view SlotKindName(SlotKind kind) {
  switch (kind) {
    case SlotKind::kIdentity:
      return "identity";
    case SlotKind::kDwConv:
      return "dw_conv";
    case SlotKind::kRepSO:
      return "repso";
    case SlotKind::kPwDense:
      return "pw_dense";
    case SlotKind::kSFConv:
      return "sf_conv";
    case SlotKind::kRefCO:
      return "refco";
  }
  return "?";
}

SlotKind ParseSlotKind(std::string_view name) {
  for (SlotKind k : {SlotKind::kIdentity, SlotKind::kDwConv, SlotKind::kRepSO,
                     SlotKind::kPwDense, SlotKind::kSFConv, SlotKind::kRefCO}) {
    if (SlotKindName(k) == name) return k;
  }
  Fail(ErrorKind::kConfig, Cat("unknown operator slot kind '", name, "'"));
}

bool IsSpatialSlot(SlotKind kind) {
  return kind == SlotKind::kIdentity || kind == SlotKind::kDwConv ||
         kind == SlotKind::kRepSO;
}

bool IsChannelSlot(SlotKind kind) {
  return kind == SlotKind::kPwDense || kind == SlotKind::kSFConv ||
         kind == SlotKind::kRefCO;
}

RepSOConfig OperatorSlot::RepSO(std::int64_t channels) const {
  RepSOConfig c;
  c.channels = channels;
  c.n_parallel_3x3 = n_parallel_3x3;
  c.include_1x3 = include_1x3;
  c.include_3x1 = include_3x1;
  c.include_1x1 = include_1x1;
  c.include_identity = include_identity;
  return c;
}

std::string Ratio::ToString() const {
  return den == 1 ? std::to_string(num) : Cat(num, "/", den);
}

namespace {

void CheckSlot(const OperatorSlot& slot, bool spatial_position,
               std::int64_t c_in, std::int64_t c_out, const std::string& where) {
  if (spatial_position && !IsSpatialSlot(slot.kind)) {
    Fail(ErrorKind::kConfig, Cat(where, ": '", SlotKindName(slot.kind),
                                 "' is not a spatial operator"));
  }
  if (!spatial_position && !IsChannelSlot(slot.kind)) {
    Fail(ErrorKind::kConfig, Cat(where, ": '", SlotKindName(slot.kind),
                                 "' is not a channel operator"));
  }
  if (slot.kind == SlotKind::kRepSO) slot.RepSO(c_in).Validate();
  if (slot.kind == SlotKind::kSFConv || slot.kind == SlotKind::kRefCO) {
    if (slot.reduction <= 0) {
      Fail(ErrorKind::kConfig, Cat(where, ": reduction must be positive"));
    }
    try {
      ChooseKernelSize(c_in, c_out, slot.reduction);
    } catch (const Error& e) {
      Fail(ErrorKind::kConfig, Cat(where, ": ", e.what()));
    }
  }
}

}  // namespace

void BlockConfig::Validate(std::int64_t channels) const {
  if (expansion.num <= 0 || expansion.den <= 0) {
    Fail(ErrorKind::kConfig, "expansion ratio must be positive");
  }
  if (!expansion.DividesEvenly(channels) || expansion.Apply(channels) <= 0) {
    Fail(ErrorKind::kConfig, Cat("expansion ", expansion.ToString(), " x ",
                                 channels, " channels is not a positive integer"));
  }
  const std::size_t want_spatial = form == BlockForm::kMetaLight ? 1 : 3;
  if (spatial.size() != want_spatial) {
    Fail(ErrorKind::kConfig, Cat("block needs ", want_spatial,
                                 " spatial slot(s), got ", spatial.size()));
  }
  if (channel.size() != 2) {
    Fail(ErrorKind::kConfig, Cat("block needs 2 channel slots, got ",
                                 channel.size()));
  }
  const std::int64_t wide = expansion.Apply(channels);
  CheckSlot(channel[0], false, channels, wide, "channel slot 1");
  CheckSlot(channel[1], false, wide, channels, "channel slot 2");
  if (form == BlockForm::kMetaLight) {
    CheckSlot(spatial[0], true, wide, wide, "spatial slot");
  } else {
    CheckSlot(spatial[0], true, channels, channels, "spatial slot 1");
    CheckSlot(spatial[1], true, wide, wide, "spatial slot 2");
    CheckSlot(spatial[2], true, channels, channels, "spatial slot 3");
  }
}

BlockConfig FalconNetBlock() {
  BlockConfig b;
  b.spatial = {OperatorSlot{.kind = SlotKind::kRepSO}};
  b.channel = {OperatorSlot{.kind = SlotKind::kRefCO},
               OperatorSlot{.kind = SlotKind::kRefCO}};
  return b;
}

BlockConfig LightNetIrbBlock() {
  BlockConfig b;
  b.spatial = {OperatorSlot{.kind = SlotKind::kDwConv}};
  b.channel = {OperatorSlot{.kind = SlotKind::kPwDense},
               OperatorSlot{.kind = SlotKind::kPwDense}};
  return b;
}

BlockConfig LightNetRepSOBlock() {
  BlockConfig b = LightNetIrbBlock();
  b.spatial = {OperatorSlot{.kind = SlotKind::kRepSO}};
  return b;
}

void ModelConfig::Validate() const {
  if (stem_channels <= 0) {
    Fail(ErrorKind::kConfig, "stem_channels must be positive");
  }
  if (stage_channels.empty()) {
    Fail(ErrorKind::kConfig, "at least one stage is required");
  }
  if (stage_blocks.size() != stage_channels.size() ||
      stage_templates.size() != stage_channels.size()) {
    Fail(ErrorKind::kConfig,
         Cat("stage lists differ in length: stage_blocks=", stage_blocks.size(),
             " stage_channels=", stage_channels.size(),
             " stage_templates=", stage_templates.size()));
  }
  if (stage_channels[0] != stem_channels) {
    Fail(ErrorKind::kConfig, Cat("stage 0 channels ", stage_channels[0],
                                 " must equal stem_channels ", stem_channels));
  }
  for (std::size_t i = 0; i < stage_channels.size(); ++i) {
    if (stage_blocks[i] < 0) {
      Fail(ErrorKind::kConfig, Cat("stage ", i, " block count is negative"));
    }
    if (stage_channels[i] <= 0) {
      Fail(ErrorKind::kConfig, Cat("stage ", i, " channels must be positive"));
    }
    if (i > 0 && stage_channels[i] != 2 * stage_channels[i - 1]) {
      Fail(ErrorKind::kConfig,
           Cat("stage ", i, " channels ", stage_channels[i],
               " must double stage ", i - 1, " channels ",
               stage_channels[i - 1], " (subsampling doubles width)"));
    }
    try {
      stage_templates[i].Validate(stage_channels[i]);
    } catch (const Error& e) {
      Fail(e.kind(), Cat("stage ", i, " template: ", e.what()));
    }
  }
  if (head_width <= 0 || num_classes <= 0 || input_resolution <= 0) {
    Fail(ErrorKind::kConfig,
         "head_width, num_classes and input_resolution must be positive");
  }
  if (!(bn_epsilon > 0.0)) {
    Fail(ErrorKind::kConfig, "bn_epsilon must be positive");
  }
}

std::vector<std::string> PresetNames() {
  return {"falconnet", "lightnet-irb", "lightnet-repso"};
}

ModelConfig PresetConfig(std::string_view preset) {
  BlockConfig block;
  if (preset == "falconnet") {
    block = FalconNetBlock();
  } else if (preset == "lightnet-irb") {
    block = LightNetIrbBlock();
  } else if (preset == "lightnet-repso") {
    block = LightNetRepSOBlock();
  } else {
    Fail(ErrorKind::kConfig,
         Cat("unknown preset '", preset,
             "' (expected falconnet, lightnet-irb or lightnet-repso)"));
  }
  ModelConfig cfg;
  cfg.stage_templates.assign(cfg.stage_channels.size(), block);
  return cfg;
}

namespace {

void RejectUnknownKeys(const json& obj, std::initializer_list<const char*> keys,
                       const std::string& where) {
  if (!obj.is_object()) {
    Fail(ErrorKind::kConfig, where + " must be a JSON object");
  }
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      Fail(ErrorKind::kConfig, Cat("unknown key '", key, "' in ", where));
    }
  }
}

template <typename T>
T Read(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    Fail(ErrorKind::kConfig, Cat("key '", key, "' in ", where,
                                 " has the wrong type"));
  }
}

std::int64_t ReadCount(const json& obj, const char* key, std::int64_t fallback,
                       const std::string& where) {
  if (obj.contains(key) && !obj.at(key).is_number_integer()) {
    Fail(ErrorKind::kConfig, Cat("key '", key, "' in ", where,
                                 " must be an integer"));
  }
  return Read<std::int64_t>(obj, key, fallback, where);
}

std::vector<std::int64_t> ReadCounts(const json& obj, const char* key,
                                     std::vector<std::int64_t> fallback,
                                     const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& arr = obj.at(key);
  if (!arr.is_array()) {
    Fail(ErrorKind::kConfig, Cat("key '", key, "' in ", where,
                                 " must be an array of integers"));
  }
  std::vector<std::int64_t> out;
  for (const json& v : arr) {
    if (!v.is_number_integer()) {
      Fail(ErrorKind::kConfig, Cat("key '", key, "' in ", where,
                                   " must be an array of integers"));
    }
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

Ratio ParseRatio(const json& v, const std::string& where) {
  if (v.is_number_integer()) return {v.get<std::int64_t>(), 1};
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::istringstream in(s);
    Ratio r;
    char slash = 0;
    if (in >> r.num >> slash >> r.den && slash == '/' && in.peek() == EOF) {
      return r;
    }
  }
  Fail(ErrorKind::kConfig, where +
                               ": expansion must be an integer or a \"p/q\" "
                               "string");
}

OperatorSlot ParseSlot(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    Fail(ErrorKind::kConfig, where + " needs a string 'kind'");
  }
  OperatorSlot s;
  s.kind = ParseSlotKind(j.at("kind").get<std::string>());
  switch (s.kind) {
    case SlotKind::kRepSO:
      RejectUnknownKeys(j,
                        {"kind", "n_parallel_3x3", "include_1x3", "include_3x1",
                         "include_1x1", "include_identity"},
                        where);
      s.n_parallel_3x3 = ReadCount(j, "n_parallel_3x3", 3, where);
      s.include_1x3 = Read<bool>(j, "include_1x3", true, where);
      s.include_3x1 = Read<bool>(j, "include_3x1", true, where);
      s.include_1x1 = Read<bool>(j, "include_1x1", true, where);
      s.include_identity = Read<bool>(j, "include_identity", true, where);
      break;
    case SlotKind::kSFConv:
    case SlotKind::kRefCO:
      RejectUnknownKeys(j, {"kind", "reduction"}, where);
      s.reduction = ReadCount(j, "reduction", 2, where);
      break;
    default:
      RejectUnknownKeys(j, {"kind"}, where);
      break;
  }
  return s;
}

json SlotToJson(const OperatorSlot& s) {
  json j;
  j["kind"] = std::string(SlotKindName(s.kind));
  if (s.kind == SlotKind::kRepSO) {
    j["n_parallel_3x3"] = s.n_parallel_3x3;
    j["include_1x3"] = s.include_1x3;
    j["include_3x1"] = s.include_3x1;
    j["include_1x1"] = s.include_1x1;
    j["include_identity"] = s.include_identity;
  } else if (s.kind == SlotKind::kSFConv || s.kind == SlotKind::kRefCO) {
    j["reduction"] = s.reduction;
  }
  return j;
}

std::vector<OperatorSlot> ParseSlots(const json& obj, const char* key,
                                     const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_array()) {
    Fail(ErrorKind::kConfig, Cat(where, " needs an array '", key, "'"));
  }
  std::vector<OperatorSlot> slots;
  for (std::size_t i = 0; i < obj.at(key).size(); ++i) {
    slots.push_back(ParseSlot(obj.at(key)[i], Cat(where, ".", key, "[", i, "]")));
  }
  return slots;
}

BlockConfig ParseBlock(const json& j, const std::string& where) {
  RejectUnknownKeys(j, {"form", "expansion", "residual", "spatial", "channel"},
                    where);
  BlockConfig b;
  const std::string form = Read<std::string>(j, "form", "meta_light", where);
  if (form == "meta_light") {
    b.form = BlockForm::kMetaLight;
  } else if (form == "meta_basic") {
    b.form = BlockForm::kMetaBasic;
  } else {
    Fail(ErrorKind::kConfig, Cat(where, ": unknown block form '", form, "'"));
  }
  if (j.contains("expansion")) b.expansion = ParseRatio(j.at("expansion"), where);
  b.residual = Read<bool>(j, "residual", true, where);
  b.spatial = ParseSlots(j, "spatial", where);
  b.channel = ParseSlots(j, "channel", where);
  return b;
}

json BlockToJson(const BlockConfig& b) {
  json j;
  j["form"] = b.form == BlockForm::kMetaLight ? "meta_light" : "meta_basic";
  if (b.expansion.den == 1) {
    j["expansion"] = b.expansion.num;
  } else {
    j["expansion"] = b.expansion.ToString();
  }
  j["residual"] = b.residual;
  j["spatial"] = json::array();
  for (const auto& s : b.spatial) j["spatial"].push_back(SlotToJson(s));
  j["channel"] = json::array();
  for (const auto& s : b.channel) j["channel"].push_back(SlotToJson(s));
  return j;
}

}  // namespace

ModelConfig ParseModelConfig(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    Fail(ErrorKind::kFormat, Cat("config is not valid JSON: ", e.what()));
  }
  const std::string where = "model config";
  RejectUnknownKeys(root,
                    {"stem_channels", "stage_blocks", "stage_channels",
                     "stage_templates", "head_width", "num_classes",
                     "input_resolution", "bn_epsilon"},
                    where);
  ModelConfig cfg;
  cfg.stem_channels = ReadCount(root, "stem_channels", cfg.stem_channels, where);
  cfg.stage_blocks = ReadCounts(root, "stage_blocks", cfg.stage_blocks, where);
  cfg.stage_channels =
      ReadCounts(root, "stage_channels", cfg.stage_channels, where);
  cfg.head_width = ReadCount(root, "head_width", cfg.head_width, where);
  cfg.num_classes = ReadCount(root, "num_classes", cfg.num_classes, where);
  cfg.input_resolution =
      ReadCount(root, "input_resolution", cfg.input_resolution, where);
  cfg.bn_epsilon = Read<double>(root, "bn_epsilon", cfg.bn_epsilon, where);
  if (!root.contains("stage_templates") ||
      !root.at("stage_templates").is_array()) {
    Fail(ErrorKind::kConfig, "model config needs an array 'stage_templates'");
  }
  const json& templates = root.at("stage_templates");
  for (std::size_t i = 0; i < templates.size(); ++i) {
    cfg.stage_templates.push_back(
        ParseBlock(templates[i], Cat("stage_templates[", i, "]")));
  }
  cfg.Validate();
  return cfg;
}

std::string ModelConfigToJson(const ModelConfig& cfg) {
  json j;
  j["stem_channels"] = cfg.stem_channels;
  j["stage_blocks"] = cfg.stage_blocks;
  j["stage_channels"] = cfg.stage_channels;
  j["stage_templates"] = json::array();
  for (const auto& b : cfg.stage_templates) {
    j["stage_templates"].push_back(BlockToJson(b));
  }
  j["head_width"] = cfg.head_width;
  j["num_classes"] = cfg.num_classes;
  j["input_resolution"] = cfg.input_resolution;
  j["bn_epsilon"] = cfg.bn_epsilon;
  return j.dump(2) + "\n";
}

ModelConfig LoadModelConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseModelConfig(ss.str());
}

void SaveModelConfig(const ModelConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out << ModelConfigToJson(cfg);
  if (!out) Fail(ErrorKind::kIo, "write failed for '" + path + "'");
}

}  // namespace falcon
