// Copyright 2026 The seltext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// seltext: command-line front end for training, stylization, blending,
// dataset augmentation and gradient audits.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "seltext/augment.hpp"
#include "seltext/checkpoint.hpp"
#include "seltext/distill.hpp"
#include "seltext/error.hpp"
#include "seltext/grad_audit.hpp"
#include "seltext/json_io.hpp"
#include "seltext/selective.hpp"
#include "seltext/trainer.hpp"

namespace fs = std::filesystem;
using namespace seltext;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Flag combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Reduction ParseReduction(const std::string& s) {
  return s == "sum" ? Reduction::kSum : Reduction::kMean;
}

struct StyleChoice {
  std::optional<int> index;
  std::vector<double> weights;

  void Register(CLI::App* app) {
    auto* idx = app->add_option("--style-index", index, "Use a single learned style");
    auto* w = app->add_option("--style-weights", weights,
                              "Comma-separated convex weights over all styles")
                  ->delimiter(',');
    idx->excludes(w);
  }

  StyleWeights Resolve(int num_styles) const {
    if (index) {
      if (*index < 0 || *index >= num_styles) {
        throw UsageError("--style-index " + std::to_string(*index) + " outside [0, " +
                         std::to_string(num_styles) + ")");
      }
      return StyleWeights::OneHot(num_styles, *index);
    }
    if (!weights.empty()) {
      if (static_cast<int>(weights.size()) != num_styles) {
        throw UsageError("--style-weights needs " + std::to_string(num_styles) + " values");
      }
      return StyleWeights(weights);
    }
    return StyleWeights::OneHot(num_styles, 0);
  }
};

struct ProviderChoice {
  std::string kind = "feather";
  double radius = 0.0;
  double constant = 0.0;
  std::optional<std::string> probmap;

  void Register(CLI::App* app, const std::string& default_kind) {
    kind = default_kind;
    app->add_option("--provider", kind, "Text probability source")
        ->check(CLI::IsMember({"none", "constant", "feather", "file"}));
    app->add_option("--feather-radius", radius, "Feather radius in pixels (feather provider)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--constant", constant, "Probability for the constant provider")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--probmap", probmap, "Heatmap file for the file provider");
  }

  ProbMapProvider Resolve() const {
    if (kind == "constant") return ConstantProvider{constant};
    if (kind == "file") {
      return FileProvider{probmap ? std::optional<fs::path>(*probmap) : std::nullopt};
    }
    return FeatherProvider{radius};
  }
};

// ---------------------------------------------------------------- train-style

struct TrainStyleArgs {
  std::string content_manifest;
  std::vector<std::string> styles;
  std::string out;
  std::optional<std::string> trace;
  long steps = 500;
  int batch_size = 4;
  double lr = 1e-2;
  double content_weight = 1.0;
  double style_weight = 1.0;
  int image_size = 32;
  std::string reduction = "mean";
  bool raw_gram = false;
  int stem_width = 8;
  std::vector<int> down_widths = {16, 32};
  int residual_blocks = 3;
  std::string activation = "relu";
  std::uint64_t extractor_seed = 0;
  std::uint64_t seed = 0;
};

int RunTrainStyle(const TrainStyleArgs& a) {
  TrainConfig cfg;
  cfg.steps = a.steps;
  cfg.batch_size = a.batch_size;
  cfg.optimizer.learning_rate = a.lr;
  cfg.weights = {a.content_weight, a.style_weight};
  cfg.loss_options = {ParseReduction(a.reduction), !a.raw_gram};
  cfg.network.stem_width = a.stem_width;
  cfg.network.down_widths = a.down_widths;
  cfg.network.up_widths.assign(a.down_widths.rbegin() + 1, a.down_widths.rend());
  cfg.network.up_widths.push_back(a.stem_width);
  cfg.network.residual_blocks = a.residual_blocks;
  cfg.network.num_styles = static_cast<int>(a.styles.size());
  cfg.network.seed = a.seed;
  cfg.extractor.activation = a.activation == "smooth" ? Activation::kSmooth : Activation::kRelu;
  cfg.extractor.seed = a.extractor_seed;
  for (const auto& s : a.styles) cfg.style_sources.emplace_back(s);
  cfg.content = LoadManifest(a.content_manifest);
  cfg.image_size = a.image_size;
  cfg.seed = a.seed;

  const TrainResult r = TrainBaseline(cfg);
  nlohmann::json meta{{"kind", "baseline"},
                      {"steps", a.steps},
                      {"batch_size", a.batch_size},
                      {"learning_rate", a.lr},
                      {"content_weight", a.content_weight},
                      {"style_weight", a.style_weight},
                      {"image_size", a.image_size},
                      {"reduction", a.reduction},
                      {"normalized_gram", !a.raw_gram},
                      {"seed", a.seed},
                      {"style_sources", a.styles}};
  SaveCheckpoint(a.out, r.network, {cfg.extractor, meta.dump()});
  if (a.trace) WriteTrainTrace(*a.trace, r.trace);
  if (!r.trace.empty()) {
    std::cout << "trained " << r.trace.size() << " steps, final total loss "
              << r.trace.back().total << "\n";
  }
  std::cout << "wrote " << a.out << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- train-distill

struct TrainDistillArgs {
  std::string teacher;
  std::string manifest;
  std::string out;
  std::optional<std::string> trace;
  int phase1_epochs = 77;
  int phase2_epochs = 50;
  double lambda_text = 100.0;
  double lambda_bg = 1.0;
  double phase2_lambda = 1.0;
  double lr = 1e-3;
  int batch_size = 1;
  std::string conditioning = "fixed";
  std::string reduction = "mean";
  bool cache_teacher = false;
  StyleChoice style;
  std::uint64_t seed = 0;
};

int RunTrainDistill(const TrainDistillArgs& a) {
  const StyleNetwork teacher = LoadCheckpoint(a.teacher);
  const StyleWeights w = a.style.Resolve(teacher.num_styles());
  DistillSchedule sch;
  sch.phases = {{a.phase1_epochs, {a.lambda_text, a.lambda_bg}},
                {a.phase2_epochs, {a.phase2_lambda, a.phase2_lambda}}};
  sch.optimizer.learning_rate = a.lr;
  sch.batch_size = a.batch_size;
  sch.seed = a.seed;
  sch.reduction = ParseReduction(a.reduction);
  sch.conditioning =
      a.conditioning == "per-batch" ? StyleConditioning::kPerBatch : StyleConditioning::kFixed;
  sch.cache_teacher_outputs = a.cache_teacher;

  const DatasetManifest m = LoadManifest(a.manifest);
  const auto samples = LoadDistillSamples(m, teacher.config().DownsampleFactor());
  const DistillResult r = TrainStudent(teacher, samples, sch, w);
  nlohmann::json meta{{"kind", "distilled"},
                      {"teacher", a.teacher},
                      {"phases",
                       {{{"epochs", a.phase1_epochs},
                         {"lambda_text", a.lambda_text},
                         {"lambda_bg", a.lambda_bg}},
                        {{"epochs", a.phase2_epochs},
                         {"lambda_text", a.phase2_lambda},
                         {"lambda_bg", a.phase2_lambda}}}},
                      {"learning_rate", a.lr},
                      {"batch_size", a.batch_size},
                      {"conditioning", a.conditioning},
                      {"style_weights", std::vector<double>(w.values().begin(), w.values().end())},
                      {"seed", a.seed}};
  const auto teacher_extras = LoadCheckpointWithExtras(a.teacher).extras;
  SaveCheckpoint(a.out, r.student, {teacher_extras.extractor, meta.dump()});
  if (a.trace) WriteDistillTrace(*a.trace, r.trace);
  std::cout << "trained " << r.trace.size() << " steps";
  if (!r.trace.empty()) std::cout << ", final loss " << r.trace.back().loss;
  std::cout << "\nwrote " << a.out << "\n";
  return kExitOk;
}

// -------------------------------------------------------------------- stylize

struct StylizeArgs {
  std::string checkpoint;
  std::string in;
  std::string out;
  std::optional<std::string> annotations;
  StyleChoice style;
  ProviderChoice provider;
};

int RunStylize(const StylizeArgs& a) {
  const StyleNetwork net = LoadCheckpoint(a.checkpoint);
  const StyleWeights w = a.style.Resolve(net.num_styles());
  const ImageFile src = ReadImageFile(a.in);
  Image out = ForwardPadded(net, src.image, w);
  if (a.provider.kind != "none") {
    std::vector<QuadAnnotation> annots;
    ProbMapQuery query;
    if (a.annotations) {
      annots = ParseIcdarAnnotations(ReadFileBytes(*a.annotations));
      query.annotations = &annots;
    }
    if (a.provider.kind == "feather" && !a.annotations) {
      throw UsageError("--provider feather needs --annotations");
    }
    if (a.provider.kind == "file" && !a.provider.probmap) {
      throw UsageError("--provider file needs --probmap");
    }
    out = Blend(src.image, out, ProvideProbMap(a.provider.Resolve(), src.image, query));
  }
  SaveImage(a.out, out, src.bit_depth);
  return kExitOk;
}

// ---------------------------------------------------------------------- blend

struct BlendArgs {
  std::string content;
  std::string stylized;
  std::string probmap;
  std::string out;
};

int RunBlend(const BlendArgs& a) {
  const ImageFile c = ReadImageFile(a.content);
  const Image p = LoadImage(a.stylized);
  SaveImage(a.out, Blend(c.image, p, LoadProbMap(a.probmap)), c.bit_depth);
  return kExitOk;
}

// -------------------------------------------------------------------- augment

struct AugmentArgs {
  std::string manifest;
  std::string out;
  std::string checkpoint;
  int styles_per_image = 1;
  std::string mode = "two-stage";
  std::vector<int> styles;
  ProviderChoice provider;
  std::uint64_t seed = 0;
  bool variants_only = false;
  int workers = 1;
};

int RunAugmentCommand(const AugmentArgs& a) {
  const StyleNetwork net = LoadCheckpoint(a.checkpoint);
  AugmentSpec spec;
  spec.input = LoadManifest(a.manifest);
  spec.output_dir = a.out;
  spec.styles_per_image = a.styles_per_image;
  spec.mode = a.mode == "end-to-end" ? AugmentMode::kEndToEnd : AugmentMode::kTwoStage;
  if (!a.styles.empty()) spec.styles = a.styles;
  if (a.provider.kind == "none") {
    throw UsageError("augment needs a text probability provider");
  }
  spec.provider = a.provider.Resolve();
  spec.seed = a.seed;
  spec.variants_only = a.variants_only;
  spec.workers = a.workers;
  spec.source_label = a.manifest;
  const DatasetManifest out = RunAugment(spec, net);
  std::cout << "wrote " << out.entries.size() << " entries to " << a.out << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ gradcheck

int RunGradcheck() {
  bool ok = true;
  for (const auto& r : RunShippedGradAudits()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": max relative error "
              << r.max_relative_error << " (tolerance " << r.tolerance << ", "
              << r.checked << " coordinates)\n";
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitFailure;
}

// Flat key=value config support. Keys name long flags without the dashes
// ("steps=100"); a [subcommand] section may scope keys to one command. Keys
// already present on the command line are skipped so flags win.
std::vector<std::string> ExpandConfig(std::vector<std::string> args) {
  if (args.size() < 2) return args;
  const std::string& command = args[1];
  std::optional<std::string> config_path;
  std::vector<std::string> given;
  for (std::size_t i = 2; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.push_back(key);
    if (key == "config") {
      if (eq != std::string::npos) {
        config_path = a.substr(eq + 1);
      } else if (i + 1 < args.size()) {
        config_path = args[i + 1];
      }
    }
  }
  if (!config_path) return args;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(*config_path);
  } catch (const CLI::FileError&) {
    throw UsageError("cannot read config file " + *config_path);
  }
  for (const auto& item : items) {
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == command)) {
      continue;
    }
    if (item.name == "++" || item.name == "--" || item.name.empty()) continue;
    if (std::find(given.begin(), given.end(), item.name) != given.end()) continue;
    const bool flag = item.inputs.size() == 1 &&
                      (item.inputs[0] == "true" || item.inputs[0] == "false");
    if (flag) {
      if (item.inputs[0] == "true") args.push_back("--" + item.name);
      continue;
    }
    std::string joined;
    for (const auto& v : item.inputs) joined += (joined.empty() ? "" : ",") + v;
    args.push_back("--" + item.name);
    args.push_back(joined);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective text style transfer: training, stylization and augmentation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "seltext 0.1.0");

  std::string config_file;
  auto add_config = [&config_file](CLI::App* sub) {
    sub->add_option("--config", config_file,
                    "INI-style key=value file; flags override its keys");
  };

  TrainStyleArgs ts;
  auto* train_style = app.add_subcommand("train-style", "Train a multi-style transformation network");
  add_config(train_style);
  train_style->add_option("--content-manifest", ts.content_manifest, "Content dataset manifest")
      ->required();
  train_style->add_option("--style", ts.styles, "Style image (repeat once per style)")
      ->delimiter(',')
      ->required();
  train_style->add_option("--out,--checkpoint", ts.out, "Checkpoint to write")->required();
  train_style->add_option("--trace", ts.trace, "Loss trace CSV");
  train_style->add_option("--steps", ts.steps)->check(CLI::NonNegativeNumber);
  train_style->add_option("--batch-size", ts.batch_size)->check(CLI::PositiveNumber);
  train_style->add_option("--lr", ts.lr)->check(CLI::PositiveNumber);
  train_style->add_option("--content-weight", ts.content_weight)->check(CLI::NonNegativeNumber);
  train_style->add_option("--style-weight", ts.style_weight)->check(CLI::NonNegativeNumber);
  train_style->add_option("--image-size", ts.image_size)->check(CLI::PositiveNumber);
  train_style->add_option("--reduction", ts.reduction)->check(CLI::IsMember({"mean", "sum"}));
  train_style->add_flag("--raw-gram", ts.raw_gram, "Do not divide Gram matrices by C*H*W");
  train_style->add_option("--stem-width", ts.stem_width)->check(CLI::PositiveNumber);
  train_style->add_option("--down-widths", ts.down_widths)->delimiter(',');
  train_style->add_option("--residual-blocks", ts.residual_blocks)->check(CLI::NonNegativeNumber);
  train_style->add_option("--extractor-activation", ts.activation)
      ->check(CLI::IsMember({"relu", "smooth"}));
  train_style->add_option("--extractor-seed", ts.extractor_seed);
  train_style->add_option("--seed", ts.seed);

  TrainDistillArgs td;
  auto* train_distill =
      app.add_subcommand("train-distill", "Distill a selective student from a trained teacher");
  add_config(train_distill);
  train_distill->add_option("--checkpoint,--teacher", td.teacher, "Teacher checkpoint")->required();
  train_distill->add_option("--manifest", td.manifest, "Annotated dataset manifest")->required();
  train_distill->add_option("--out", td.out, "Student checkpoint to write")->required();
  train_distill->add_option("--trace", td.trace, "Loss trace CSV");
  train_distill->add_option("--phase1-epochs", td.phase1_epochs)->check(CLI::NonNegativeNumber);
  train_distill->add_option("--phase2-epochs", td.phase2_epochs)->check(CLI::NonNegativeNumber);
  train_distill->add_option("--lambda-text", td.lambda_text)->check(CLI::NonNegativeNumber);
  train_distill->add_option("--lambda-bg", td.lambda_bg)->check(CLI::NonNegativeNumber);
  train_distill->add_option("--phase2-lambda", td.phase2_lambda, "Equal weight of phase 2")
      ->check(CLI::NonNegativeNumber);
  train_distill->add_option("--lr", td.lr)->check(CLI::PositiveNumber);
  train_distill->add_option("--batch-size", td.batch_size)->check(CLI::PositiveNumber);
  train_distill->add_option("--conditioning", td.conditioning)
      ->check(CLI::IsMember({"fixed", "per-batch"}));
  train_distill->add_option("--reduction", td.reduction)->check(CLI::IsMember({"mean", "sum"}));
  train_distill->add_flag("--cache-teacher", td.cache_teacher);
  td.style.Register(train_distill);
  train_distill->add_option("--seed", td.seed);

  StylizeArgs sz;
  auto* stylize = app.add_subcommand("stylize", "Stylize an image, optionally selectively");
  add_config(stylize);
  stylize->add_option("--checkpoint", sz.checkpoint)->required();
  stylize->add_option("--in", sz.in, "Content image")->required();
  stylize->add_option("--out", sz.out, "Output image")->required();
  stylize->add_option("--annotations", sz.annotations, "Annotation file (feather provider)");
  sz.style.Register(stylize);
  sz.provider.Register(stylize, "none");

  BlendArgs bl;
  auto* blend = app.add_subcommand("blend", "Blend a stylized image into its content image");
  add_config(blend);
  blend->add_option("--content", bl.content)->required();
  blend->add_option("--stylized", bl.stylized)->required();
  blend->add_option("--probmap", bl.probmap, "Single-channel 8-bit PNG heatmap")->required();
  blend->add_option("--out", bl.out)->required();

  AugmentArgs ag;
  auto* augment = app.add_subcommand("augment", "Augment an annotated dataset with stylized text");
  add_config(augment);
  augment->add_option("--manifest", ag.manifest, "Input dataset manifest")->required();
  augment->add_option("--out", ag.out, "Output directory")->required();
  augment->add_option("--checkpoint", ag.checkpoint)->required();
  auto* per_image = augment->add_option("--styles-per-image", ag.styles_per_image)
                        ->check(CLI::NonNegativeNumber);
  augment->add_option("--styles", ag.styles, "Explicit style list used for every image")
      ->delimiter(',')
      ->excludes(per_image);
  augment->add_option("--mode", ag.mode)->check(CLI::IsMember({"two-stage", "end-to-end"}));
  ag.provider.Register(augment, "feather");
  augment->add_option("--seed", ag.seed);
  augment->add_flag("--variants-only", ag.variants_only, "Leave the originals out");
  augment->add_option("--workers", ag.workers)->check(CLI::PositiveNumber);

  auto* gradcheck =
      app.add_subcommand("gradcheck", "Compare analytic loss gradients with finite differences");

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = ExpandConfig(std::move(args));
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_style) return RunTrainStyle(ts);
    if (*train_distill) return RunTrainDistill(td);
    if (*stylize) return RunStylize(sz);
    if (*blend) return RunBlend(bl);
    if (*augment) return RunAugmentCommand(ag);
    if (*gradcheck) return RunGradcheck();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const seltext::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
