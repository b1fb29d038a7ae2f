// Copyright 2026 The VGCN Authors
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

// vgcn: command-line front end for data generation, training and evaluation.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vgcn/augment.h"
#include "vgcn/batching.h"
#include "vgcn/checkpoint.h"
#include "vgcn/config.h"
#include "vgcn/data_io.h"
#include "vgcn/error.h"
#include "vgcn/model.h"
#include "vgcn/selftrain.h"
#include "vgcn/synth.h"
#include "vgcn/train.h"

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct NumericFailure : vgcn::Error {
  using vgcn::Error::Error;
};

struct Options {
  std::string config;
  std::string stream = "joint";
  std::optional<double> lambda;
  bool no_rna = false;
  std::string attack = "none";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> checkpoints;
  std::string index;
  std::string split = "test";
  int instance = 0;
  int frame = 0;
};

vgcn::RunConfig load_config(const Options& opt) {
  vgcn::RunConfig cfg = opt.config.empty() ? vgcn::RunConfig::parse("{}")
                                           : vgcn::RunConfig::load(opt.config);
  if (opt.seed) {
    cfg.seed = *opt.seed;
    cfg.model.seed = cfg.train.seed = cfg.selftrain.loop.seed = *opt.seed;
  }
  if (opt.lambda) {
    if (*opt.lambda < 0.0) throw vgcn::ConfigError("--lambda must be >= 0");
    cfg.train.lambda = *opt.lambda;
  }
  if (opt.no_rna) cfg.train.rna.reset();
  return cfg;
}

std::vector<vgcn::StreamKind> streams_for(const std::string& name) {
  if (name == "fuse4") return {std::begin(vgcn::kAllStreams), std::end(vgcn::kAllStreams)};
  return {vgcn::parse_stream_kind(name)};
}

struct Split {
  std::vector<vgcn::LabeledSequence> sequences;
  std::vector<std::string> label_names;
};

Split load_split(const vgcn::RunConfig& cfg, const fs::path& index,
                 const vgcn::ClassAttributeDictionary& dict) {
  Split split;
  split.label_names = vgcn::load_index(index).label_names;
  split.sequences = vgcn::load_instances(index, dict, cfg.skeleton.joints);
  return split;
}

std::vector<vgcn::PaddedInstance> prepare(const Split& split, const vgcn::RunConfig& cfg,
                                          const vgcn::ClassAttributeDictionary& dict,
                                          vgcn::StreamKind stream) {
  std::vector<vgcn::PaddedInstance> out;
  out.reserve(split.sequences.size());
  for (const vgcn::LabeledSequence& seq : split.sequences) {
    out.push_back(vgcn::derive_stream(vgcn::pad_frames(seq.frames, dict.c_ca(), seq.label),
                                      stream, cfg.skeleton.parent_map));
  }
  return out;
}

vgcn::ModelConfig model_config(vgcn::RunConfig cfg, const Split& split,
                               const vgcn::ClassAttributeDictionary& dict) {
  if (!split.label_names.empty()) {
    cfg.model.classes = static_cast<int>(split.label_names.size());
  }
  cfg.model.c_ca = dict.c_ca();
  cfg.model.validate();
  return cfg.model;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw vgcn::Error("cannot write " + path.string());
  for (const std::string& line : lines) out << line << '\n';
}

ordered_json evaluation_json(const vgcn::Evaluation& eval,
                             const std::vector<std::string>& names) {
  ordered_json per_class = ordered_json::object();
  for (std::size_t c = 0; c < eval.per_class.size(); ++c) {
    per_class[c < names.size() ? names[c] : std::to_string(c)] = eval.per_class[c];
  }
  return {{"accuracy", eval.accuracy}, {"per_class", per_class}};
}

std::optional<vgcn::AttackConfig> parse_attack(const std::string& spec,
                                               const vgcn::RunConfig& cfg,
                                               const vgcn::ClassAttributeDictionary& dict) {
  if (spec == "none") return std::nullopt;
  vgcn::AttackConfig attack = cfg.rna;
  attack.fixed_category.reset();
  if (spec == "random") return attack;
  if (spec.rfind("fixed:", 0) == 0) {
    attack.fixed_category = dict.index_of(spec.substr(6));
    return attack;
  }
  throw vgcn::ConfigError("--attack must be none, random or fixed:<class>");
}

// ---------------------------------------------------------------------------

void run_gen_synth(const Options& opt) {
  const vgcn::RunConfig cfg = load_config(opt);
  const fs::path dir = opt.out.empty() ? cfg.data.dir : fs::path(opt.out);
  const vgcn::SynthDataset data = vgcn::gen_synth(cfg.synth, cfg.seed);
  fs::create_directories(dir);
  data.dictionary.save(dir / cfg.data.dictionary);
  auto stem = [](const std::string& index) {
    const std::string suffix = "_index.json";
    if (index.size() > suffix.size() &&
        index.compare(index.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return index.substr(0, index.size() - suffix.size());
    }
    throw vgcn::ConfigError("index names must end in _index.json: " + index);
  };
  vgcn::write_instances(data.train, data.label_names, data.dictionary, dir,
                        stem(cfg.data.train_index));
  vgcn::write_instances(data.test, data.label_names, data.dictionary, dir,
                        stem(cfg.data.test_index));
  std::cout << ordered_json{{"dir", dir.string()},
                            {"train", data.train.size()},
                            {"test", data.test.size()},
                            {"classes", data.label_names}}
                   .dump()
            << '\n';
}

void run_build_graphs(const Options& opt) {
  const vgcn::RunConfig cfg = load_config(opt);
  const auto dict = vgcn::ClassAttributeDictionary::load(cfg.data.dictionary_path());
  const fs::path index = opt.index.empty() ? cfg.data.train_index_path() : fs::path(opt.index);
  const Split split = load_split(cfg, index, dict);
  std::size_t frames = 0, objects = 0;
  int max_persons = 0, max_objects = 0;
  for (const vgcn::LabeledSequence& seq : split.sequences) {
    const vgcn::PaddedInstance p = vgcn::pad_frames(seq.frames, dict.c_ca(), seq.label);
    max_persons = std::max(max_persons, p.layout.max_persons);
    max_objects = std::max(max_objects, p.layout.max_objects);
    frames += seq.frames.size();
    for (const vgcn::VariableGraph& g : seq.frames) objects += g.object_count();
  }
  if (!opt.out.empty()) {
    vgcn::write_instances(split.sequences, split.label_names, dict, opt.out,
                          index.stem().string());
  }
  std::cout << ordered_json{{"instances", split.sequences.size()},
                            {"frames", frames},
                            {"object_nodes", objects},
                            {"max_persons", max_persons},
                            {"max_objects", max_objects}}
                   .dump()
            << '\n';
}

void run_train(const Options& opt) {
  const vgcn::RunConfig cfg = load_config(opt);
  if (opt.stream == "fuse4") {
    throw vgcn::ConfigError("train one stream at a time; fuse4 is for eval");
  }
  const vgcn::StreamKind stream = vgcn::parse_stream_kind(opt.stream);
  const auto dict = vgcn::ClassAttributeDictionary::load(cfg.data.dictionary_path());
  const Split train_split = load_split(cfg, cfg.data.train_index_path(), dict);
  std::vector<vgcn::PaddedInstance> eval_set;
  if (fs::exists(cfg.data.test_index_path())) {
    eval_set = prepare(load_split(cfg, cfg.data.test_index_path(), dict), cfg, dict, stream);
  }
  const auto train_set = prepare(train_split, cfg, dict, stream);

  vgcn::Model model(model_config(cfg, train_split, dict));
  const fs::path out = opt.out.empty() ? fs::path("run") : fs::path(opt.out);
  fs::create_directories(out);
  std::vector<std::string> lines;
  const auto history = vgcn::train(model, train_set, eval_set, cfg.train, &dict,
                                   [&](const vgcn::EpochMetrics& m) {
                                     if (!std::isfinite(m.loss_ce) || !std::isfinite(m.loss_nb)) {
                                       throw NumericFailure("non-finite loss at epoch " +
                                                            std::to_string(m.epoch));
                                     }
                                     lines.push_back(m.to_json());
                                     std::cerr << lines.back() << '\n';
                                   });
  write_lines(out / "metrics.ndjson", lines);
  vgcn::save_checkpoint(out / "model.ckpt", model.parameters());
  std::cout << ordered_json{{"checkpoint", (out / "model.ckpt").string()},
                            {"epochs", history.size()},
                            {"train_acc", history.empty() ? 0.0 : history.back().train_acc},
                            {"eval_acc", history.empty() ? 0.0 : history.back().eval_acc}}
                   .dump()
            << '\n';
}

struct LoadedEval {
  vgcn::RunConfig cfg;
  vgcn::ClassAttributeDictionary dict;
  Split split;
  std::vector<vgcn::StreamKind> streams;
  std::vector<vgcn::Model> models;
};

LoadedEval load_for_eval(const Options& opt) {
  LoadedEval e{load_config(opt), {}, {}, streams_for(opt.stream), {}};
  e.dict = vgcn::ClassAttributeDictionary::load(e.cfg.data.dictionary_path());
  const fs::path index = opt.index.empty() ? e.cfg.data.test_index_path() : fs::path(opt.index);
  e.split = load_split(e.cfg, index, e.dict);
  if (opt.checkpoints.size() != e.streams.size()) {
    throw vgcn::ConfigError("--stream " + opt.stream + " needs " +
                            std::to_string(e.streams.size()) + " --checkpoint value(s)");
  }
  for (const std::string& path : opt.checkpoints) {
    vgcn::Model model(model_config(e.cfg, e.split, e.dict));
    model.load_parameters(vgcn::load_checkpoint(path));
    e.models.push_back(std::move(model));
  }
  return e;
}

vgcn::Evaluation evaluate_streams(const LoadedEval& e,
                                  const std::vector<vgcn::PaddedInstance>& joint_stream) {
  std::vector<vgcn::ScoreMatrix> scores;
  for (std::size_t i = 0; i < e.streams.size(); ++i) {
    std::vector<vgcn::PaddedInstance> inputs;
    inputs.reserve(joint_stream.size());
    for (const vgcn::PaddedInstance& p : joint_stream) {
      inputs.push_back(vgcn::derive_stream(p, e.streams[i], e.cfg.skeleton.parent_map));
    }
    scores.push_back(vgcn::predict_scores(e.models[i], inputs));
  }
  const vgcn::ScoreMatrix fused =
      scores.size() == 1 ? scores.front() : vgcn::four_stream_fuse(scores);
  return vgcn::score_predictions(fused, joint_stream);
}

void run_eval(const Options& opt) {
  const LoadedEval e = load_for_eval(opt);
  const auto joint = prepare(e.split, e.cfg, e.dict, vgcn::StreamKind::kJoint);
  std::cout << evaluation_json(evaluate_streams(e, joint), e.split.label_names).dump() << '\n';
}

void run_attack_eval(const Options& opt) {
  const LoadedEval e = load_for_eval(opt);
  const auto attack = parse_attack(opt.attack, e.cfg, e.dict);
  const auto joint = prepare(e.split, e.cfg, e.dict, vgcn::StreamKind::kJoint);
  std::vector<vgcn::PaddedInstance> attacked = joint;
  if (attack) {
    // Nodes are injected before stream derivation so every stream sees the
    // same attacked scene.
    std::mt19937_64 rng(e.cfg.seed);
    for (vgcn::PaddedInstance& p : attacked) {
      p = vgcn::random_node_attack(p, *attack, e.dict, rng);
    }
  }
  const double clean = evaluate_streams(e, joint).accuracy;
  const double hit = evaluate_streams(e, attacked).accuracy;
  std::cout << ordered_json{{"attack", opt.attack},
                            {"clean", clean},
                            {"attacked", hit},
                            {"delta", hit - clean}}
                   .dump()
            << '\n';
}

void run_selftrain_sim(const Options& opt) {
  const vgcn::RunConfig cfg = load_config(opt);
  vgcn::SyntheticDetector det =
      vgcn::synthetic_detector(cfg.selftrain.noise, cfg.seed, cfg.selftrain.detector);
  const vgcn::SelfTrainResult result =
      vgcn::self_train(*det.oracle, det.labeled, det.unlabeled, cfg.selftrain.loop);
  std::vector<std::string> lines;
  for (const vgcn::IterationRecord& r : result.log) {
    lines.push_back(r.to_json());
    if (!std::isfinite(r.loss)) throw NumericFailure("non-finite detector loss");
  }
  if (!opt.out.empty()) write_lines(opt.out, lines);
  for (const std::string& line : lines) std::cerr << line << '\n';
  std::cout << ordered_json{{"count", result.count},
                            {"loop_iterations", result.loop_iterations()},
                            {"final_loss", result.log.back().loss}}
                   .dump()
            << '\n';
}

void run_inspect(const Options& opt) {
  const vgcn::RunConfig cfg = load_config(opt);
  const auto dict = vgcn::ClassAttributeDictionary::load(cfg.data.dictionary_path());
  fs::path index = opt.index;
  if (index.empty()) {
    index = opt.split == "train" ? cfg.data.train_index_path() : cfg.data.test_index_path();
  }
  const Split split = load_split(cfg, index, dict);
  if (opt.instance < 0 || opt.instance >= static_cast<int>(split.sequences.size())) {
    throw vgcn::ConfigError("--instance out of range [0, " +
                            std::to_string(split.sequences.size()) + ")");
  }
  const vgcn::LabeledSequence& seq = split.sequences[opt.instance];
  if (opt.frame < 0 || opt.frame >= static_cast<int>(seq.frames.size())) {
    throw vgcn::ConfigError("--frame out of range");
  }
  const vgcn::VariableGraph& g = seq.frames[opt.frame];
  std::vector<std::int64_t> per_category;
  for (const auto& group : g.object_groups) {
    per_category.push_back(static_cast<std::int64_t>(group.size()));
  }
  const vgcn::PaddedInstance padded = vgcn::pad_frames(seq.frames, dict.c_ca(), seq.label);
  std::size_t occupied = 0;
  for (std::uint8_t v : padded.valid) occupied += v;
  std::cout << ordered_json{
                   {"instance", opt.instance},
                   {"label", seq.label},
                   {"frames", seq.frames.size()},
                   {"frame", opt.frame},
                   {"persons", g.person_count()},
                   {"skeleton_nodes", g.skeleton_count()},
                   {"object_nodes", g.object_count()},
                   {"node_count", g.node_count()},
                   {"edge_count", vgcn::edge_count(g.person_count(), g.joints, per_category)},
                   {"layout",
                    {{"max_persons", padded.layout.max_persons},
                     {"max_objects", padded.layout.max_objects},
                     {"slots", padded.layout.slot_count()}}},
                   {"mask_occupancy",
                    static_cast<double>(occupied) / static_cast<double>(padded.valid.size())}}
                   .dump()
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  vgcn::tune_allocator();
  CLI::App app{"Spatial-temporal variable-graph action recognition"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config, "RunConfig JSON file");
    cmd->add_option("--seed", opt.seed, "Override the config seed");
  };
  auto add_stream = [&](CLI::App* cmd) {
    cmd->add_option("--stream", opt.stream, "joint|bone|joint_motion|bone_motion|fuse4")
        ->check(CLI::IsMember({"joint", "bone", "joint_motion", "bone_motion", "fuse4"}));
  };

  CLI::App* gen = app.add_subcommand("gen-synth", "Write a synthetic dataset");
  add_common(gen);
  gen->add_option("--out", opt.out, "Output directory (default: data.dir)");

  CLI::App* build = app.add_subcommand("build-graphs", "Validate records and build graphs");
  add_common(build);
  build->add_option("--index", opt.index, "Instance index (default: training index)");
  build->add_option("--out", opt.out, "Write a canonical copy to this directory");

  CLI::App* train = app.add_subcommand("train", "Train one stream");
  add_common(train);
  add_stream(train);
  train->add_option("--lambda", opt.lambda, "Node balance loss weight");
  train->add_flag("--no-rna", opt.no_rna, "Disable Random Node Attack");
  train->add_option("--out", opt.out, "Run directory for model.ckpt and metrics.ndjson");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate checkpoints");
  add_common(eval);
  add_stream(eval);
  eval->add_option("--checkpoint", opt.checkpoints, "Checkpoint, one per stream")->required();
  eval->add_option("--index", opt.index, "Instance index (default: test index)");

  CLI::App* attack = app.add_subcommand("attack-eval", "Evaluate under injected nodes");
  add_common(attack);
  add_stream(attack);
  attack->add_option("--checkpoint", opt.checkpoints, "Checkpoint, one per stream")->required();
  attack->add_option("--attack", opt.attack, "none|random|fixed:<class>");
  attack->add_option("--index", opt.index, "Instance index (default: test index)");

  CLI::App* st = app.add_subcommand("selftrain-sim", "Self-training on the synthetic detector");
  add_common(st);
  st->add_option("--out", opt.out, "Write the iteration log as NDJSON");

  CLI::App* inspect = app.add_subcommand("inspect", "Summarize one instance");
  add_common(inspect);
  inspect->add_option("--instance", opt.instance, "Instance position in the index");
  inspect->add_option("--frame", opt.frame, "Frame to summarize");
  inspect->add_option("--split", opt.split, "train|test")
      ->check(CLI::IsMember({"train", "test"}));
  inspect->add_option("--index", opt.index, "Instance index (overrides --split)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) run_gen_synth(opt);
    if (build->parsed()) run_build_graphs(opt);
    if (train->parsed()) run_train(opt);
    if (eval->parsed()) run_eval(opt);
    if (attack->parsed()) run_attack_eval(opt);
    if (st->parsed()) run_selftrain_sim(opt);
    if (inspect->parsed()) run_inspect(opt);
  } catch (const vgcn::ConfigError& e) {
    std::cerr << "vgcn: config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericFailure& e) {
    std::cerr << "vgcn: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const vgcn::Error& e) {
    std::cerr << "vgcn: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "vgcn: data error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
