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

// falcon: command-line front end for the FalconNet toolkit.
//
// Errors go to stderr as a single line "error[<kind>]: <message>". Usage
// errors exit 2, every other failure exits 1.

#include <fnmatch.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "falcon/channel.h"
#include "falcon/error.h"
#include "falcon/input.h"
#include "falcon/model.h"
#include "falcon/reparam.h"
#include "falcon/spatial.h"
#include "falcon/summary.h"
#include "falcon/weights.h"

namespace falcon {
namespace {

constexpr std::uint64_t kGenerateSeed = 0;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string preset;
  std::string config;
  std::string weights;
  std::string out;
  std::string input;
  std::string pattern;
  std::int64_t trials = 16;
  double tolerance = kDefaultFusionTolerance;
  std::int64_t top_k = 5;
  bool softmax = false;
  std::string kind;
  std::int64_t c_in = 0;
  std::int64_t c_out = 0;
  std::int64_t groups = 1;
  std::int64_t window = 1;
  std::int64_t reduction = 2;
};

void WriteText(const std::string& path, const std::string& text) {
  WriteFileBytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                 text.size()));
}

std::string FormatFloat(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

int GenConfig(const Options& o) {
  ModelConfig cfg;
  try {
    cfg = PresetConfig(o.preset);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  SaveModelConfig(cfg, o.out);
  std::cout << "wrote " << o.out << " (" << o.preset << ")\n";
  if (!o.weights.empty()) {
    SaveWeights(RandomWeights(BuildModel(cfg), kGenerateSeed), o.weights);
    std::cout << "wrote " << o.weights << " (random train-form weights, seed "
              << kGenerateSeed << ")\n";
  }
  return 0;
}

int Summarize(const Options& o) {
  const LayerGraph g = BuildModel(LoadModelConfig(o.config));
  const ModelSummary s = Summarize(g);
  std::cout << RenderSummaryText(s);
  if (!o.out.empty()) WriteText(o.out, RenderSummaryJsonl(s));
  return 0;
}

void PrintReport(const FusionReport& r) {
  std::cout << "trials: " << r.trials << "\n"
            << "max_abs_error: " << FormatFloat(r.max_abs_error) << "\n"
            << "tolerance: " << FormatFloat(r.tolerance) << "\n"
            << "result: " << (r.passed ? "passed" : "failed") << "\n";
}

// Loads weights when given, otherwise draws seeded random train-form ones.
WeightStore WeightsFor(const Options& o, const LayerGraph& train) {
  if (o.weights.empty()) return RandomWeights(train, kDefaultVerificationSeed);
  return LoadWeights(o.weights);
}

struct FuseOutcome {
  FusedModel fused;
  FusionReport report;
};

FuseOutcome FuseAndVerify(const Options& o, const ModelConfig& cfg,
                          const WeightStore& weights) {
  const LayerGraph graph = ResolveGraph(cfg, weights);
  FuseOutcome out{FuseModel(graph, weights), {}};
  if (out.fused.fused_ops == 0) Fail(ErrorKind::kConfig, "no fusible slots");
  const Shape shape{1, graph.input_channels, graph.input_resolution,
                    graph.input_resolution};
  out.report = VerifyEquivalence(
      [&](const Tensor& x) { return Forward(graph, weights, x); },
      [&](const Tensor& x) { return Forward(out.fused.graph, out.fused.weights, x); },
      o.trials, shape, static_cast<float>(o.tolerance));
  std::cout << "fused_ops: " << out.fused.fused_ops << "\n";
  PrintReport(out.report);
  return out;
}

int Fuse(const Options& o) {
  const ModelConfig cfg = LoadModelConfig(o.config);
  const FuseOutcome r = FuseAndVerify(o, cfg, LoadWeights(o.weights));
  if (!r.report.passed) {
    std::cerr << "error[numeric]: fused model deviates by "
              << FormatFloat(r.report.max_abs_error) << ", not written\n";
    return 1;
  }
  SaveWeights(r.fused.weights, o.out);
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

int Verify(const Options& o) {
  const ModelConfig cfg = LoadModelConfig(o.config);
  const WeightStore w = WeightsFor(o, BuildModel(cfg));
  return FuseAndVerify(o, cfg, w).report.passed ? 0 : 1;
}

int Infer(const Options& o) {
  const ModelConfig cfg = LoadModelConfig(o.config);
  const WeightStore w = LoadWeights(o.weights);
  const LayerGraph g = ResolveGraph(cfg, w);
  const Tensor x = LoadInput(o.input, g.input_resolution);
  const Tensor logits = Forward(g, w, x);
  const std::int64_t n = logits.shape().n;
  const std::int64_t classes = logits.shape().c;
  const std::int64_t k = std::min(o.top_k, classes);
  for (std::int64_t s = 0; s < n; ++s) {
    std::vector<double> score(classes);
    for (std::int64_t c = 0; c < classes; ++c) score[c] = logits.at(s, c, 0, 0);
    if (o.softmax) {
      const double peak = *std::max_element(score.begin(), score.end());
      double sum = 0.0;
      for (double& v : score) sum += (v = std::exp(v - peak));
      for (double& v : score) v /= sum;
    }
    std::vector<std::int64_t> order(classes);
    std::iota(order.begin(), order.end(), 0);
    // Equal scores keep ascending class order.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int64_t a, std::int64_t b) { return score[a] > score[b]; });
    std::cout << "sample " << s << " (" << (o.softmax ? "softmax" : "logits") << ")\n";
    for (std::int64_t r = 0; r < k; ++r) {
      char line[96];
      std::snprintf(line, sizeof(line), "  %lld\tclass %lld\t%.6f\n",
                    static_cast<long long>(r + 1), static_cast<long long>(order[r]),
                    score[order[r]]);
      std::cout << line;
    }
  }
  return 0;
}

ChannelPattern PatternFor(const Options& o) {
  const std::int64_t c_out = o.c_out > 0 ? o.c_out : o.c_in;
  if (o.kind == "dense") return ChannelPattern::Dense(o.c_in, c_out);
  if (o.kind == "group") return ChannelPattern::Group(o.c_in, c_out, o.groups);
  if (o.kind == "channelwise") return ChannelPattern::ChannelWise(o.c_in, c_out, o.window);
  if (o.kind == "sf") {
    if (o.reduction < 1) Fail(ErrorKind::kConfig, "reduction must be positive");
    return ChannelPattern::SparseFactorized(MakeSFConvSpec(o.c_in, c_out, o.reduction));
  }
  throw UsageError("unknown --kind '" + o.kind + "' (dense|group|channelwise|sf)");
}

int AnalyzeRange(const Options& o) {
  const ChannelPattern p = PatternFor(o);
  const std::vector<std::int64_t> ranges = ReceptiveRange(p);
  std::cout << "pattern: " << o.kind << " c_in=" << p.c_in << " c_out=" << p.c_out;
  if (p.kind == ChannelPattern::Kind::kGroup) std::cout << " groups=" << p.groups;
  if (p.kind == ChannelPattern::Kind::kChannelWise) std::cout << " window=" << p.window;
  if (p.kind == ChannelPattern::Kind::kSparseFactorized) {
    std::cout << " reduction=" << p.sf.reduction << " kernel=" << p.sf.kernel;
  }
  std::cout << "\n";
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    std::cout << "output " << i << ": " << ranges[i] << "\n";
  }
  const auto [lo, hi] = std::minmax_element(ranges.begin(), ranges.end());
  const double mean =
      std::accumulate(ranges.begin(), ranges.end(), 0.0) / static_cast<double>(ranges.size());
  const auto full = std::count(ranges.begin(), ranges.end(), p.c_in);
  std::cout << "summary: min=" << *lo << " max=" << *hi
            << " mean=" << FormatFloat(mean) << " full=" << full << "/"
            << ranges.size() << "\n";
  return 0;
}

bool Matches(const std::string& glob, const std::string& name) {
  return fnmatch(glob.c_str(), name.c_str(), 0) == 0;
}

int AnalyzeMagnitude(const Options& o) {
  const WeightStore w = LoadWeights(o.weights);
  std::vector<Tensor> kernels;
  std::vector<std::string> names;
  for (const WeightStore::Entry& e : w.entries()) {
    if (e.extents.size() != 4 || e.extents[1] != 1) continue;
    const std::string layer = e.name.substr(0, e.name.rfind('.'));
    if (!Matches(o.pattern, e.name) && !Matches(o.pattern, layer)) continue;
    if (!kernels.empty() && (e.extents[2] != kernels[0].shape().h ||
                             e.extents[3] != kernels[0].shape().w)) {
      Fail(ErrorKind::kShape, "kernel '" + e.name + "' differs in extent from '" +
                                  names[0] + "'");
    }
    kernels.push_back(w.GetTensor(e.name));
    names.push_back(e.name);
  }
  if (kernels.empty()) {
    Fail(ErrorKind::kMissing, "no depthwise kernel matches '" + o.pattern + "'");
  }
  const std::int64_t kh = kernels[0].shape().h;
  const std::int64_t kw = kernels[0].shape().w;
  const Matrix m = KernelMagnitudeMatrix(kernels, kh, kw);
  std::cout << "kernels: " << kernels.size() << " (" << kh << "x" << kw << ")\n";
  std::string csv = "r,c,value\n";
  for (std::int64_t r = 0; r < kh; ++r) {
    for (std::int64_t c = 0; c < kw; ++c) {
      char cell[32];
      std::snprintf(cell, sizeof(cell), "%s%.4f", c ? " " : "", m.at(r, c));
      std::cout << cell;
      csv += std::to_string(r) + "," + std::to_string(c) + "," +
             FormatFloat(m.at(r, c), 9) + "\n";
    }
    std::cout << "\n";
  }
  if (!o.out.empty()) WriteText(o.out, csv);
  return 0;
}

int Run(int argc, char** argv) {
  CLI::App app{"FalconNet operator toolkit"};
  app.require_subcommand(1, 1);
  Options o;

  auto* gen = app.add_subcommand("gen-config", "write a preset model config");
  gen->add_option("preset", o.preset, "falconnet | lightnet-irb | lightnet-repso")
      ->required();
  gen->add_option("--out", o.out, "config output path")->required();
  gen->add_option("--weights", o.weights, "also write random train-form weights");

  auto* sum = app.add_subcommand("summarize", "per-layer params and flops");
  sum->add_option("--config", o.config)->required();
  sum->add_option("--out", o.out, "line-delimited JSON records");

  auto* fuse = app.add_subcommand("fuse", "fold a trained model into inference form");
  fuse->add_option("--config", o.config)->required();
  fuse->add_option("--weights", o.weights)->required();
  fuse->add_option("--out", o.out)->required();
  fuse->add_option("--trials", o.trials)->capture_default_str();
  fuse->add_option("--tolerance", o.tolerance)->capture_default_str();

  auto* verify = app.add_subcommand("verify", "check fused against train form");
  verify->add_option("--config", o.config)->required();
  verify->add_option("--weights", o.weights, "defaults to seeded random weights");
  verify->add_option("--trials", o.trials)->capture_default_str();
  verify->add_option("--tolerance", o.tolerance)->capture_default_str();

  auto* infer = app.add_subcommand("infer", "classify a PPM image or FALC tensor");
  infer->add_option("--config", o.config)->required();
  infer->add_option("--weights", o.weights)->required();
  infer->add_option("input", o.input)->required();
  infer->add_option("--top-k", o.top_k)->capture_default_str();
  infer->add_flag("--softmax", o.softmax);

  auto* range = app.add_subcommand("analyze-range", "receptive range per output");
  range->add_option("--kind", o.kind, "dense | group | channelwise | sf")->required();
  range->add_option("--c-in", o.c_in)->required();
  range->add_option("--c-out", o.c_out, "defaults to --c-in");
  range->add_option("--groups", o.groups)->capture_default_str();
  range->add_option("--window", o.window)->capture_default_str();
  range->add_option("--reduction", o.reduction)->capture_default_str();

  auto* mag = app.add_subcommand("analyze-magnitude", "average kernel magnitudes");
  mag->add_option("--weights", o.weights)->required();
  mag->add_option("pattern", o.pattern, "glob over entry or layer names")->required();
  mag->add_option("--out", o.out, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  if (o.trials < 1) throw UsageError("--trials must be at least 1");
  if (o.top_k < 1) throw UsageError("--top-k must be at least 1");

  if (*gen) return GenConfig(o);
  if (*sum) return Summarize(o);
  if (*fuse) return Fuse(o);
  if (*verify) return Verify(o);
  if (*infer) return Infer(o);
  if (*range) return AnalyzeRange(o);
  return AnalyzeMagnitude(o);
}

}  // namespace
}  // namespace falcon

int main(int argc, char** argv) {
  try {
    return falcon::Run(argc, argv);
  } catch (const falcon::UsageError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 2;
  } catch (const falcon::Error& e) {
    std::cerr << "error[" << falcon::ErrorKindName(e.kind()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
}
