#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>

#include "dataset.hpp"
#include "partmotion/agent/annotator.hpp"
#include "partmotion/agent/backend.hpp"
#include "partmotion/agent/prompt.hpp"
#include "partmotion/annotation/io.hpp"
#include "partmotion/annotation/stats.hpp"
#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"
#include "partmotion/diffusion/checkpoint.hpp"
#include "partmotion/diffusion/trainer.hpp"
#include "partmotion/motion/io.hpp"
#include "partmotion/pipeline/pipeline.hpp"
#include "partmotion/synth/generator.hpp"
#include "partmotion/synth/library.hpp"
#include "partmotion/synth/splits.hpp"
#include "render.hpp"

namespace partmotion::cli {

namespace {

using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidAnnotation:
    case ErrorCode::kOverlap:
    case ErrorCode::kTimeOutOfRange:
    case ErrorCode::kSchemaViolation:
      return kExitValidation;
    case ErrorCode::kConfig:
    case ErrorCode::kTemplate:
    case ErrorCode::kFormat:
    case ErrorCode::kMalformedJson:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

void reportError(std::string_view code, const std::string& message, const std::string& detail) {
  std::cerr << json{{"error", code}, {"message", message}, {"detail", detail}}.dump() << std::endl;
}

// State shared by all subcommands.
struct Globals {
  std::uint64_t seed = 0;
  bool quiet = false;

  void progress(const std::string& line) const {
    if (!quiet) {
      std::cout << line << std::endl;
    }
  }
};

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::size_t count = 200;
  std::string out;
  int minFrames = 100;
  int maxFrames = 140;
  double fps = 20.0;
  int maxWindows = 4;
  double sparsify = 0.0;
  double trainRatio = 0.8;
  double valRatio = 0.1;
};

void runSynth(const SynthOptions& o, const Globals& g) {
  synth::SynthConfig cfg;
  cfg.minFrames = o.minFrames;
  cfg.maxFrames = o.maxFrames;
  cfg.fps = o.fps;
  cfg.maxWindows = o.maxWindows;
  if (o.sparsify < 0.0 || o.sparsify > 1.0) {
    throw Error(ErrorCode::kConfig, "--sparsify must lie in [0, 1]");
  }
  const auto& lib = synth::defaultLibrary();
  auto samples = synth::synthesizeDataset(lib, cfg, o.count, g.seed);

  std::vector<annotation::HierarchicalAnnotation> anns;
  std::vector<motion::NamedMotion> motions;
  std::vector<std::string> ids;
  std::mt19937_64 sparsifyRng(diffusion::deriveSeed(g.seed, 0x5A25E));
  std::size_t dropped = 0, labeled = 0;
  for (auto& s : samples) {
    auto ann = s.annotation;
    if (o.sparsify > 0.0) {
      ann = synth::sparsifyLabels(ann, o.sparsify, sparsifyRng, &dropped, &labeled);
    }
    ids.push_back(ann.id);
    motions.push_back({ann.id, std::move(s.motion)});
    anns.push_back(std::move(ann));
  }
  const auto manifest = synth::buildDatasetSplits(ids, g.seed, o.trainRatio, o.valRatio, synth::kLibraryVersion);

  const DatasetDir dir{o.out};
  std::filesystem::create_directories(dir.root);
  annotation::writeDataset(dir.annotations(), anns);
  const auto& skel = motion::toySkeleton();
  motion::saveMotionCollection(dir.motions(), motions, skel.name);
  writeTextFile(dir.skeleton(), motion::skeletonToJson(skel).dump(2) + "\n");
  manifest.save(dir.manifest());

  std::string line = "synthesized " + std::to_string(anns.size()) + " sequences into " + o.out + " (train " +
                     std::to_string(manifest.train.size()) + ", val " + std::to_string(manifest.val.size()) +
                     ", test " + std::to_string(manifest.test.size()) + ")";
  if (o.sparsify > 0.0) {
    line += "; " + std::to_string(dropped) + "/" + std::to_string(labeled) + " part labels set to unknown";
  }
  g.progress(line);
}

// ---------------------------------------------------------------- annotate

struct AnnotateOptions {
  std::string input;
  std::string out;
  agent::BackendConfig backend;
  std::size_t parallelism = 1;
  std::string templatePath;
  std::string transcript;
};

int runAnnotate(AnnotateOptions o, const Globals& g) {
  const auto source = annotation::readDataset(o.input);
  std::vector<agent::AgentRequest> requests;
  requests.reserve(source.size());
  for (const auto& a : source) {
    requests.push_back(agent::requestFromAnnotation(a));
  }

  auto backend = agent::makeBackend(o.backend);
  // The deterministic mock backend needs no throttling.
  std::optional<agent::RateLimiter> limiter;
  if (o.backend.kind == "http") {
    limiter.emplace(o.backend.requestsPerMinute);
  }
  std::optional<agent::TranscriptLog> transcript;
  if (!o.transcript.empty()) {
    transcript.emplace(o.transcript);
  }
  agent::AnnotatorConfig cfg;
  cfg.maxAttempts = o.backend.maxAttempts;
  cfg.parallelism = o.parallelism;
  if (!o.templatePath.empty()) {
    cfg.promptTemplate = agent::loadPromptTemplate(o.templatePath);
  }
  agent::Annotator annotator(*backend, cfg, limiter ? &*limiter : nullptr, transcript ? &*transcript : nullptr);
  const auto outcomes = annotator.annotateBatch(requests);

  std::vector<annotation::HierarchicalAnnotation> done;
  std::optional<Error> firstError;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].annotation) {
      done.push_back(*outcomes[i].annotation);
    } else {
      ++failed;
      if (!firstError) {
        firstError = *outcomes[i].error;
      }
    }
  }
  annotation::writeDataset(o.out, done);
  g.progress("annotated " + std::to_string(done.size()) + "/" + std::to_string(outcomes.size()) + " sequences with " +
             backend->name() + " into " + o.out);
  if (failed > 0) {
    reportError(errorCodeName(firstError->code()),
                std::to_string(failed) + " of " + std::to_string(outcomes.size()) + " requests failed",
                std::string(firstError->what()) + (firstError->detail().empty() ? "" : ": " + firstError->detail()));
    return exitCodeFor(firstError->code());
  }
  return 0;
}

// ---------------------------------------------------------------- validate

int runValidate(const std::string& input, const Globals& g) {
  std::ifstream in(input);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open annotation file", input);
  }
  std::size_t lineNo = 0, checked = 0, invalid = 0;
  std::optional<json> firstViolation;
  std::string line;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    ++checked;
    std::vector<json> violations;
    std::string id;
    try {
      const auto ann = annotation::fromJson(json::parse(line));
      id = ann.id;
      for (const auto& v : annotation::validateAnnotation(ann)) {
        violations.push_back({{"rule", annotation::ruleName(v.rule)},
                              {"track", v.track},
                              {"segment", v.segment},
                              {"message", v.message}});
      }
    } catch (const json::exception& e) {
      violations.push_back({{"rule", "MALFORMED_JSON"}, {"message", e.what()}});
    } catch (const Error& e) {
      violations.push_back({{"rule", errorCodeName(e.code())}, {"message", e.what()}});
    }
    if (!violations.empty()) {
      ++invalid;
      const json row{{"line", lineNo}, {"id", id}, {"violations", violations}};
      std::cout << row.dump() << "\n";
      if (!firstViolation) {
        firstViolation = row;
      }
    }
  }
  g.progress("checked " + std::to_string(checked) + " annotations, " + std::to_string(invalid) + " invalid");
  if (invalid > 0) {
    const auto& v = (*firstViolation)["violations"][0];
    reportError("INVALID_ANNOTATION",
                std::to_string(invalid) + " of " + std::to_string(checked) + " annotations violate the schema; first: " +
                    v["rule"].get<std::string>(),
                firstViolation->dump());
    return kExitValidation;
  }
  return 0;
}

// ---------------------------------------------------------------- stats

void runStats(const std::string& input, bool asJson) {
  const auto stats = annotation::datasetStats(annotation::readDataset(input));
  if (asJson) {
    std::cout << json{{"sequences", stats.sequences},
                      {"hours", stats.hours},
                      {"sequence_labels", stats.sequenceLabels},
                      {"action_labels", stats.actionLabels},
                      {"part_labels", stats.partLabels},
                      {"unknown_sequence", stats.unknownSequence},
                      {"unknown_actions", stats.unknownActions},
                      {"unknown_parts", stats.unknownParts},
                      {"vocabulary", stats.vocabulary.size()}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << annotation::formatStatsTable(stats);
  }
}

// ---------------------------------------------------------------- train-gen

struct TrainGenOptions {
  std::string data;
  std::string out;
  std::string encoder = "toy-hash:128";
  std::size_t pcaDim = 32;
  diffusion::DenoiserConfig model{};
  diffusion::TrainerConfig trainer{};
  int diffusionSteps = diffusion::kDefaultSteps;
  std::string log;
};

void runTrainGen(TrainGenOptions o, const Globals& g) {
  const auto dataset = loadDataset(DatasetDir{o.data}, "train");
  auto prepared = pipeline::prepareGeneratorData(dataset.items, dataset.skeleton, o.encoder, o.pcaDim);
  const auto modelCfg = pipeline::completeConfig(o.model, prepared);
  diffusion::Denoiser model(modelCfg, diffusion::deriveSeed(g.seed, 1));
  const diffusion::NoiseSchedule schedule(o.diffusionSteps);

  o.trainer.seed = diffusion::deriveSeed(g.seed, 2);
  diffusion::DiffusionTrainer trainer(model, schedule, o.trainer);
  std::optional<std::ofstream> log;
  if (!o.log.empty()) {
    log.emplace(o.log);
    if (!*log) {
      throw Error(ErrorCode::kIo, "cannot open training log", o.log);
    }
  }
  g.progress("training on " + std::to_string(prepared.samples.size()) + " sequences, " +
             std::to_string(nn::parameterCount(model.parameters())) + " parameters");
  const auto records = trainer.run(prepared.samples, [&](const diffusion::StepRecord& r) {
    if (log) {
      *log << r.toJson().dump() << "\n";
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "step %zu loss %.5f lr %.2e grad %.3f", r.step, r.loss, r.learningRate,
                  r.gradNorm);
    g.progress(buf);
  });

  json meta{{"steps", trainer.stepsDone()}, {"seed", g.seed}, {"trainer", o.trainer.toJson()},
            {"train_sequences", prepared.samples.size()}};
  if (!records.empty()) {
    meta["final_loss"] = records.back().loss;
  }
  auto ck = pipeline::makeCheckpoint(prepared, model, dataset.skeleton, o.diffusionSteps, std::move(meta));
  ck.save(o.out);
  g.progress("wrote checkpoint " + o.out);
}

// ---------------------------------------------------------------- train-eval

struct TrainEvalOptions {
  std::string data;
  std::string split = "train";
  std::string out;
  std::string encoder = "toy-hash:128";
  eval::EvalTrainConfig config{};
};

void runTrainEval(TrainEvalOptions o, const Globals& g) {
  const auto dataset = loadDataset(DatasetDir{o.data}, o.split);
  o.config.train.seed = diffusion::deriveSeed(g.seed, 3);
  g.progress("training " + std::to_string(eval::kNumLevels) + " retrieval models on " +
             std::to_string(dataset.items.size()) + " sequences");
  auto models = eval::trainEvaluationModels(dataset.items, dataset.skeleton, o.encoder, o.config);
  models.save(o.out);
  g.progress("wrote evaluation models " + o.out);
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
  std::string checkpoint;
  std::string annotationPath;
  std::string sequence;
  std::vector<std::string> actions;
  std::vector<std::string> parts;
  int frames = 0;
  double fps = 20.0;
  std::string out;
  std::string annotationOut;
};

int parseFrame(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) {
      return v;
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kConfig, "expected an integer frame in " + flag, text);
}

// "LABEL:START:END" with the label possibly containing ':'.
annotation::TimedLabel parseSpan(const std::string& spec, const std::string& flag) {
  const auto last = spec.rfind(':');
  const auto mid = last == std::string::npos || last == 0 ? std::string::npos : spec.rfind(':', last - 1);
  if (mid == std::string::npos) {
    throw Error(ErrorCode::kConfig, flag + " expects LABEL:START:END", spec);
  }
  annotation::TimedLabel seg;
  seg.label = annotation::Label::fromWire(spec.substr(0, mid));
  seg.start = parseFrame(spec.substr(mid + 1, last - mid - 1), flag);
  seg.end = parseFrame(spec.substr(last + 1), flag);
  return seg;
}

annotation::HierarchicalAnnotation annotationFromFlags(const SampleOptions& o) {
  annotation::HierarchicalAnnotation ann;
  ann.id = "cli_sample";
  ann.fps = o.fps;
  for (const auto& a : o.actions) {
    ann.actions.push_back(parseSpan(a, "--action"));
  }
  for (const auto& p : o.parts) {
    const auto colon = p.find(':');
    const auto part = colon == std::string::npos ? std::nullopt : annotation::parsePart(p.substr(0, colon));
    if (!part) {
      throw Error(ErrorCode::kConfig, "--part expects PART:LABEL:START:END with a known part", p);
    }
    ann.part(*part).push_back(parseSpan(p.substr(colon + 1), "--part"));
  }
  int maxEnd = 0;
  for (const auto* track : {&ann.actions}) {
    for (const auto& s : *track) {
      maxEnd = std::max(maxEnd, s.end);
    }
  }
  for (const auto& track : ann.parts) {
    for (const auto& s : track) {
      maxEnd = std::max(maxEnd, s.end);
    }
  }
  ann.numFrames = o.frames > 0 ? o.frames : std::max(120, maxEnd);
  if (!o.sequence.empty()) {
    ann.sequence.push_back({annotation::Label(o.sequence), 0, ann.numFrames});
  }
  auto byStart = [](const annotation::TimedLabel& a, const annotation::TimedLabel& b) { return a.start < b.start; };
  std::sort(ann.actions.begin(), ann.actions.end(), byStart);
  for (auto& track : ann.parts) {
    std::sort(track.begin(), track.end(), byStart);
  }
  return annotation::fillUnknownGaps(std::move(ann));
}

void runSample(const SampleOptions& o, const Globals& g) {
  annotation::HierarchicalAnnotation ann;
  if (!o.annotationPath.empty()) {
    if (!o.sequence.empty() || !o.actions.empty() || !o.parts.empty()) {
      throw Error(ErrorCode::kConfig, "--annotation cannot be combined with --seq, --action or --part");
    }
    ann = annotation::fromJson(json::parse(readTextFile(o.annotationPath)));
  } else {
    ann = annotationFromFlags(o);
  }
  const auto violations = annotation::validateAnnotation(ann);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(ErrorCode::kInvalidAnnotation, std::string(annotation::ruleName(v.rule)) + " in " + v.track,
                v.message);
  }

  const diffusion::MotionGenerator generator(diffusion::GeneratorCheckpoint::load(o.checkpoint));
  const auto result = generator.generate(ann, g.seed);
  motion::saveMotion(o.out, result.motion, generator.checkpoint().skeleton.name);
  if (!o.annotationOut.empty()) {
    writeTextFile(o.annotationOut, annotation::toJson(ann).dump(2) + "\n");
  }
  g.progress("wrote " + std::to_string(result.motion.numFrames()) + " frames to " + o.out);
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string checkpoint;
  std::string generatorKind = "model";
  std::string models;
  std::string data;
  std::string split = "test";
  eval::SuiteConfig suite{};
  std::string out;
  std::string samplesOut;
  bool table = false;
};

void runEvaluate(EvaluateOptions o, const Globals& g) {
  const auto dataset = loadDataset(DatasetDir{o.data}, o.split);
  const auto models = eval::EvaluationModels::load(o.models);

  std::vector<eval::EvalSample> samples;
  if (o.generatorKind == "ground-truth") {
    samples = pipeline::groundTruthSamples(dataset.items);
    o.suite.generatorName = "ground-truth";
  } else if (o.generatorKind == "model") {
    if (o.checkpoint.empty()) {
      throw Error(ErrorCode::kConfig, "--generator model requires --checkpoint");
    }
    const diffusion::MotionGenerator generator(diffusion::GeneratorCheckpoint::load(o.checkpoint));
    g.progress("generating " + std::to_string(dataset.items.size()) + " sequences");
    samples = pipeline::generateForSplit(generator, dataset.items, diffusion::deriveSeed(g.seed, 4));
    o.suite.generatorName = std::filesystem::path(o.checkpoint).filename().string();
  } else {
    throw Error(ErrorCode::kConfig, "unknown --generator '" + o.generatorKind + "'", "expected model or ground-truth");
  }
  if (!o.samplesOut.empty()) {
    std::vector<motion::NamedMotion> named;
    for (const auto& s : samples) {
      named.push_back({s.annotation.id, s.generated});
    }
    motion::saveMotionCollection(o.samplesOut, named, dataset.skeleton.name);
  }

  o.suite.seed = diffusion::deriveSeed(g.seed, 5);
  const auto report = eval::evaluateSuite(samples, models, o.suite);
  if (!o.out.empty()) {
    writeTextFile(o.out, report.toJson().dump(2) + "\n");
    g.progress("wrote report " + o.out);
  }
  if (o.table || o.out.empty()) {
    std::cout << report.table();
  }
}

// ---------------------------------------------------------------- render

struct RenderCliOptions {
  std::string motion;
  std::string compare;
  std::string id;
  std::string skeleton;
  std::string out;
  RenderOptions render{};
};

motion::MotionSequence loadAnyMotion(const std::string& path, const std::string& id) {
  if (std::filesystem::path(path).extension() == ".pmm") {
    const auto all = motion::loadMotionCollection(path);
    if (all.empty()) {
      throw Error(ErrorCode::kFormat, "motion collection is empty", path);
    }
    if (id.empty()) {
      return all.front().motion;
    }
    for (const auto& m : all) {
      if (m.id == id) {
        return m.motion;
      }
    }
    throw Error(ErrorCode::kConfig, "no motion with id '" + id + "'", path);
  }
  return motion::loadMotion(path);
}

void runRender(const RenderCliOptions& o, const Globals& g) {
  const auto skel = o.skeleton.empty() ? motion::toySkeleton() : motion::loadSkeleton(o.skeleton);
  std::vector<motion::MotionSequence> motions{loadAnyMotion(o.motion, o.id)};
  if (!o.compare.empty()) {
    motions.push_back(loadAnyMotion(o.compare, o.id));
  }
  std::vector<const motion::MotionSequence*> ptrs;
  for (const auto& m : motions) {
    if (!m.frames.empty() && m.frames.front().rotations.size() != skel.numJoints()) {
      throw Error(ErrorCode::kShapeMismatch, "motion joint count does not match the skeleton");
    }
    ptrs.push_back(&m);
  }
  const auto n = renderSequence(skel, ptrs, o.out, o.render);
  g.progress("rendered " + std::to_string(n) + " frames into " + o.out);
}

// CLI11 would apply (and validate) every [section] of the config file; only
// the top-level keys and the invoked subcommand's section are kept.
class ActiveSectionConfig final : public CLI::ConfigBase {
 public:
  explicit ActiveSectionConfig(std::string active) : active_(std::move(active)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigBase::from_config(input);
    std::erase_if(items, [&](const CLI::ConfigItem& item) {
      return !item.parents.empty() && item.parents.front() != active_;
    });
    return items;
  }

 private:
  std::string active_;
};

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Part-aware hierarchical text-to-motion toolkit"};
  app.set_config("--config", "", "INI/TOML file; keys in [subcommand] sections set that subcommand's options");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random draw of the run")->capture_default_str();
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress output");

  // synth
  SynthOptions synthOpt;
  auto* synthCmd = app.add_subcommand("synth", "Generate a procedural labeled motion dataset");
  synthCmd->add_option("--count", synthOpt.count, "Number of sequences")->capture_default_str();
  synthCmd->add_option("--out", synthOpt.out, "Output dataset directory")->required();
  synthCmd->add_option("--min-frames", synthOpt.minFrames, "Shortest sequence")->capture_default_str();
  synthCmd->add_option("--max-frames", synthOpt.maxFrames, "Longest sequence")->capture_default_str();
  synthCmd->add_option("--fps", synthOpt.fps, "Frame rate")->capture_default_str();
  synthCmd->add_option("--max-windows", synthOpt.maxWindows, "Most action windows per sequence")
      ->capture_default_str();
  synthCmd->add_option("--sparsify", synthOpt.sparsify, "Probability of replacing each part label by unknown")
      ->capture_default_str();
  synthCmd->add_option("--train-ratio", synthOpt.trainRatio, "Training split fraction")->capture_default_str();
  synthCmd->add_option("--val-ratio", synthOpt.valRatio, "Validation split fraction")->capture_default_str();

  // annotate
  AnnotateOptions annOpt;
  auto* annCmd = app.add_subcommand("annotate", "Decompose sequence and action labels into part tracks");
  annCmd->add_option("--input", annOpt.input, "Annotation file (NDJSON) supplying sequence and action tracks")
      ->required()
      ->check(CLI::ExistingFile);
  annCmd->add_option("--out", annOpt.out, "Output annotation file (NDJSON)")->required();
  annCmd->add_option("--backend", annOpt.backend.kind, "mock, http or garbage")
      ->capture_default_str()
      ->check(CLI::IsMember({"mock", "http", "garbage"}));
  annCmd->add_option("--rules", annOpt.backend.rulesPath, "Mock backend rule table (JSON)")->check(CLI::ExistingFile);
  annCmd->add_option("--endpoint", annOpt.backend.endpoint, "Chat-completions base URL for the http backend");
  annCmd->add_option("--model", annOpt.backend.model, "Model name for the http backend");
  annCmd->add_option("--timeout", annOpt.backend.timeoutSeconds, "Request timeout in seconds")->capture_default_str();
  annCmd->add_option("--max-attempts", annOpt.backend.maxAttempts, "Attempts per request before giving up")
      ->capture_default_str();
  annCmd->add_option("--rate-limit", annOpt.backend.requestsPerMinute, "Requests per minute (http backend)")
      ->capture_default_str();
  annCmd->add_option("--parallelism", annOpt.parallelism, "Concurrent requests")->capture_default_str();
  annCmd->add_option("--template", annOpt.templatePath, "Prompt template file")->check(CLI::ExistingFile);
  annCmd->add_option("--transcript", annOpt.transcript, "Append every prompt/response pair to this NDJSON file");

  // validate
  std::string validateInput;
  auto* validateCmd = app.add_subcommand("validate", "Check annotations against the schema (exit 1 on violations)");
  validateCmd->add_option("--input", validateInput, "Annotation file (NDJSON)")->required()->check(CLI::ExistingFile);

  // stats
  std::string statsInput;
  bool statsJson = false;
  auto* statsCmd = app.add_subcommand("stats", "Summarize label counts, duration and vocabulary");
  statsCmd->add_option("--input", statsInput, "Annotation file (NDJSON)")->required()->check(CLI::ExistingFile);
  statsCmd->add_flag("--json", statsJson, "Print JSON instead of a table");

  // train-gen
  TrainGenOptions genOpt;
  auto* genCmd = app.add_subcommand("train-gen", "Train the diffusion generator on a dataset's training split");
  genCmd->add_option("--data", genOpt.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  genCmd->add_option("--out", genOpt.out, "Checkpoint path")->required();
  genCmd->add_option("--encoder", genOpt.encoder, "toy-hash:<dim>[:seed] or pretrained:<table.json>")
      ->capture_default_str();
  genCmd->add_option("--pca-dim", genOpt.pcaDim, "Projected label dimension")->capture_default_str();
  genCmd->add_option("--width", genOpt.model.width, "Transformer width")->capture_default_str();
  genCmd->add_option("--depth", genOpt.model.depth, "Transformer blocks")->capture_default_str();
  genCmd->add_option("--heads", genOpt.model.heads, "Attention heads")->capture_default_str();
  genCmd->add_option("--ff-mult", genOpt.model.ffMultiplier, "Feed-forward expansion")->capture_default_str();
  genCmd->add_option("--dropout", genOpt.model.dropout, "Dropout rate")->capture_default_str();
  genCmd->add_option("--steps", genOpt.trainer.steps, "Optimizer steps")->capture_default_str();
  genCmd->add_option("--batch", genOpt.trainer.batchSize, "Batch size")->capture_default_str();
  genCmd->add_option("--lr", genOpt.trainer.optimizer.learningRate, "Peak learning rate")->capture_default_str();
  genCmd->add_option("--weight-decay", genOpt.trainer.optimizer.weightDecay, "AdamW weight decay")
      ->capture_default_str();
  genCmd->add_option("--clip-norm", genOpt.trainer.optimizer.clipNorm, "Global gradient norm clip (<=0 disables)")
      ->capture_default_str();
  genCmd->add_option("--warmup", genOpt.trainer.warmupSteps, "Linear warmup steps")->capture_default_str();
  genCmd->add_option("--mask-rate", genOpt.trainer.masking.targetRate, "Mean part-label drop probability")
      ->capture_default_str();
  genCmd->add_option("--action-drop", genOpt.trainer.masking.actionDrop, "Action segment drop probability")
      ->capture_default_str();
  genCmd->add_option("--sequence-drop", genOpt.trainer.masking.sequenceDrop, "Sequence label drop probability")
      ->capture_default_str();
  genCmd->add_option("--diffusion-steps", genOpt.diffusionSteps, "Noise schedule length")->capture_default_str();
  genCmd->add_option("--log-every", genOpt.trainer.logEvery, "Steps between log records")->capture_default_str();
  genCmd->add_option("--log", genOpt.log, "Training log (NDJSON)");

  // train-eval
  TrainEvalOptions evalTrainOpt;
  auto* evalTrainCmd = app.add_subcommand("train-eval", "Train the nine contrastive retrieval models");
  evalTrainCmd->add_option("--data", evalTrainOpt.data, "Dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  evalTrainCmd->add_option("--split", evalTrainOpt.split, "Split to train on")->capture_default_str();
  evalTrainCmd->add_option("--out", evalTrainOpt.out, "Output model file")->required();
  evalTrainCmd->add_option("--encoder", evalTrainOpt.encoder, "Text encoder spec")->capture_default_str();
  evalTrainCmd->add_option("--hidden", evalTrainOpt.config.model.hidden, "Tower hidden width")->capture_default_str();
  evalTrainCmd->add_option("--embed-dim", evalTrainOpt.config.model.embedDim, "Joint embedding width")
      ->capture_default_str();
  evalTrainCmd->add_option("--max-frames", evalTrainOpt.config.model.maxFrames, "Crop subsampling length")
      ->capture_default_str();
  evalTrainCmd->add_option("--temperature", evalTrainOpt.config.model.temperature, "InfoNCE temperature")
      ->capture_default_str();
  evalTrainCmd->add_option("--steps", evalTrainOpt.config.train.steps, "Optimizer steps per model")
      ->capture_default_str();
  evalTrainCmd->add_option("--batch", evalTrainOpt.config.train.batchSize, "Batch size")->capture_default_str();
  evalTrainCmd->add_option("--lr", evalTrainOpt.config.train.learningRate, "Learning rate")->capture_default_str();
  evalTrainCmd->add_option("--min-pairs", evalTrainOpt.config.train.minPairs, "Fewest pairs a level may have")
      ->capture_default_str();

  // sample
  SampleOptions sampleOpt;
  auto* sampleCmd = app.add_subcommand("sample", "Generate one motion from full or partial conditioning");
  sampleCmd->add_option("--checkpoint", sampleOpt.checkpoint, "Generator checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  sampleCmd->add_option("--annotation", sampleOpt.annotationPath, "Annotation JSON to condition on")
      ->check(CLI::ExistingFile);
  sampleCmd->add_option("--seq", sampleOpt.sequence, "Sequence description");
  sampleCmd->add_option("--action", sampleOpt.actions, "Action segment LABEL:START:END (repeatable)");
  sampleCmd->add_option("--part", sampleOpt.parts, "Part segment PART:LABEL:START:END (repeatable)");
  sampleCmd->add_option("--frames", sampleOpt.frames, "Sequence length (default: max(120, last segment end))");
  sampleCmd->add_option("--fps", sampleOpt.fps, "Frame rate of a flag-built annotation")->capture_default_str();
  sampleCmd->add_option("--out", sampleOpt.out, "Output motion JSON")->required();
  sampleCmd->add_option("--annotation-out", sampleOpt.annotationOut, "Also write the conditioning annotation");

  // evaluate
  EvaluateOptions evalOpt;
  auto* evalCmd = app.add_subcommand("evaluate", "Score a generator with retrieval, FID and diversity metrics");
  evalCmd->add_option("--checkpoint", evalOpt.checkpoint, "Generator checkpoint")->check(CLI::ExistingFile);
  evalCmd->add_option("--generator", evalOpt.generatorKind, "model or ground-truth")
      ->capture_default_str()
      ->check(CLI::IsMember({"model", "ground-truth"}));
  evalCmd->add_option("--models", evalOpt.models, "Evaluation models from train-eval")
      ->required()
      ->check(CLI::ExistingFile);
  evalCmd->add_option("--data", evalOpt.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  evalCmd->add_option("--split", evalOpt.split, "Split to evaluate")->capture_default_str();
  evalCmd->add_option("--repeats", evalOpt.suite.repeats, "Shuffled repetitions")->capture_default_str();
  evalCmd->add_option("--batch", evalOpt.suite.batchSize, "Retrieval batch size")->capture_default_str();
  evalCmd->add_option("--diversity-pairs", evalOpt.suite.diversityPairs, "Random pairs for diversity")
      ->capture_default_str();
  evalCmd->add_option("--filter-threshold", evalOpt.suite.filterThreshold, "Paraphrase filter cosine threshold")
      ->capture_default_str();
  evalCmd->add_option("--out", evalOpt.out, "Report JSON");
  evalCmd->add_option("--samples-out", evalOpt.samplesOut, "Also save the generated motions (.pmm)");
  evalCmd->add_flag("--table", evalOpt.table, "Print a table row");

  // render
  RenderCliOptions renderOpt;
  auto* renderCmd = app.add_subcommand("render", "Draw stick-figure frames (PPM) of a motion");
  renderCmd->add_option("--motion", renderOpt.motion, "Motion JSON or collection (.pmm)")
      ->required()
      ->check(CLI::ExistingFile);
  renderCmd->add_option("--compare", renderOpt.compare, "Second motion drawn side by side")->check(CLI::ExistingFile);
  renderCmd->add_option("--id", renderOpt.id, "Record id inside a collection");
  renderCmd->add_option("--skeleton", renderOpt.skeleton, "Skeleton JSON (default: toy skeleton)")
      ->check(CLI::ExistingFile);
  renderCmd->add_option("--out", renderOpt.out, "Output directory for frame_NNNNN.ppm")->required();
  renderCmd->add_option("--width", renderOpt.render.width, "Panel width")->capture_default_str();
  renderCmd->add_option("--height", renderOpt.render.height, "Panel height")->capture_default_str();
  renderCmd->add_option("--azimuth", renderOpt.render.azimuthDeg, "View azimuth (degrees)")->capture_default_str();
  renderCmd->add_option("--elevation", renderOpt.render.elevationDeg, "View elevation (degrees)")
      ->capture_default_str();
  renderCmd->add_option("--stride", renderOpt.render.stride, "Render every n-th frame")->capture_default_str();

  std::string active;
  for (int i = 1; i < argc && active.empty(); ++i) {
    for (const auto* sub : app.get_subcommands([](CLI::App*) { return true; })) {
      if (sub->get_name() == argv[i]) {
        active = sub->get_name();
      }
    }
  }
  app.config_formatter(std::make_shared<ActiveSectionConfig>(active));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    reportError("CONFIG", e.what(), e.get_name());
    return kExitConfig;
  }

  try {
    if (synthCmd->parsed()) {
      runSynth(synthOpt, g);
    } else if (annCmd->parsed()) {
      return runAnnotate(annOpt, g);
    } else if (validateCmd->parsed()) {
      return runValidate(validateInput, g);
    } else if (statsCmd->parsed()) {
      runStats(statsInput, statsJson);
    } else if (genCmd->parsed()) {
      runTrainGen(genOpt, g);
    } else if (evalTrainCmd->parsed()) {
      runTrainEval(evalTrainOpt, g);
    } else if (sampleCmd->parsed()) {
      runSample(sampleOpt, g);
    } else if (evalCmd->parsed()) {
      runEvaluate(evalOpt, g);
    } else if (renderCmd->parsed()) {
      runRender(renderOpt, g);
    }
  } catch (const Error& e) {
    reportError(errorCodeName(e.code()), e.what(), e.detail());
    return exitCodeFor(e.code());
  } catch (const json::exception& e) {
    reportError(errorCodeName(ErrorCode::kFormat), "malformed JSON input", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    reportError("RUNTIME", e.what(), "");
    return kExitRuntime;
  }
  return 0;
}

}  // namespace partmotion::cli
