#include "newsseg/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "newsseg/error.hpp"
#include "newsseg/features.hpp"
#include "newsseg/ingest.hpp"
#include "newsseg/log.hpp"
#include "newsseg/models.hpp"
#include "newsseg/params.hpp"
#include "newsseg/pipeline.hpp"
#include "newsseg/shotdetect.hpp"
#include "newsseg/timeline.hpp"
#include "newsseg/tomlcfg.hpp"
#include "newsseg/train.hpp"
#include "newsseg/wav.hpp"

namespace newsseg::cli {

namespace {

namespace fs = std::filesystem;

struct SharedOptions {
  std::string config_path;
  uint64_t seed = 0;
  int workers = 1;
  bool json_errors = false;
  std::string log_level;
};

struct StatsOptions {
  std::string annotations;
  std::string out;  // empty -> stdout
};

struct DetectOptions {
  std::string frames;
  int width = 0;
  int height = 0;
  double fps = 25.0;
  double threshold = 27.0;
  int64_t min_shot_frames = 15;
  std::string out;
};

struct FeaturesOptions {
  std::string audio;
  std::string out;
  int64_t start_sample = 0;
  int64_t num_samples = -1;  // -1 -> to end
};

struct TrainOptions {
  std::string model_id = "fusion";
  std::string data;
  std::string out = "model.nsg";
  std::string log_out;
  // -1/-NaN sentinels mean "preset/config value".
  double lr = -1.0;
  int batch_size = -1;
  int max_epochs = -1;
  int patience = -2;  // -2 preset, -1 disabled
};

struct SegmentOptions {
  std::string frames;
  std::string audio;
  int width = 0;
  int height = 0;
  double fps = 25.0;
  std::string model;  // weight file
  std::string out = "timeline.json";
  double threshold = 27.0;
  int64_t min_shot_frames = 15;
};

struct EvaluateOptions {
  std::string annotations;
  std::string pred_dir;
  std::string report;
  std::string model_name = "model";
};

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << text;
  if (!out) throw IoError("short write to " + path);
}

void emit_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

void apply_log_level(const SharedOptions& shared) {
  if (shared.log_level == "error") log::set_level(log::Level::Error);
  else if (shared.log_level == "warn") log::set_level(log::Level::Warn);
  else if (shared.log_level == "info") log::set_level(log::Level::Info);
  else if (shared.log_level == "debug") log::set_level(log::Level::Debug);
}

TomlConfig load_config(const SharedOptions& shared) {
  if (shared.config_path.empty()) return TomlConfig::parse("");
  return TomlConfig::parse_file(shared.config_path);
}

DetectorConfig detector_from_config(const TomlConfig& cfg, double threshold,
                                    int64_t min_shot_frames) {
  DetectorConfig det;
  det.threshold = cfg.get_double("detector", "threshold").value_or(threshold);
  det.min_shot_frames =
      cfg.get_int("detector", "min_shot_frames").value_or(min_shot_frames);
  return det;
}

ModelSpec model_spec_from_config(const std::string& id,
                                 const TomlConfig& cfg) {
  ModelSpec spec = model_spec_for(id);
  auto& t = spec.transformer;
  t.layers = static_cast<int>(cfg.get_int("model", "layers").value_or(t.layers));
  t.heads = static_cast<int>(cfg.get_int("model", "heads").value_or(t.heads));
  t.hidden = static_cast<int>(cfg.get_int("model", "hidden").value_or(t.hidden));
  t.mlp_dim =
      static_cast<int>(cfg.get_int("model", "mlp_dim").value_or(t.mlp_dim));
  t.dropout = cfg.get_double("model", "dropout").value_or(t.dropout);
  spec.geometry.max_frames = static_cast<int>(
      cfg.get_int("model", "frames").value_or(spec.geometry.max_frames));
  spec.geometry.height = static_cast<int>(
      cfg.get_int("model", "height").value_or(spec.geometry.height));
  spec.geometry.width = static_cast<int>(
      cfg.get_int("model", "width").value_or(spec.geometry.width));
  spec.ast_max_mel_frames = static_cast<int>(
      cfg.get_int("model", "ast_mel_frames").value_or(spec.ast_max_mel_frames));
  spec.cnn.input_size = static_cast<int>(
      cfg.get_int("model", "input_size").value_or(spec.cnn.input_size));
  if (auto blocks = cfg.get_int_array("model", "stage_blocks")) {
    spec.cnn.stage_blocks.assign(blocks->begin(), blocks->end());
  }
  if (auto chans = cfg.get_int_array("model", "stage_channels")) {
    spec.cnn.stage_channels.assign(chans->begin(), chans->end());
  }
  return spec;
}

TrainConfig train_config_from(const std::string& id, const TomlConfig& cfg,
                              const TrainOptions& opt) {
  TrainConfig tc = train_preset_for(id);
  if (auto v = cfg.get_string("train", "optimizer")) {
    if (*v == "adam") tc.optimizer = OptimizerKind::Adam;
    else if (*v == "adamw") tc.optimizer = OptimizerKind::AdamW;
    else throw SchemaError("train.optimizer must be adam or adamw");
  }
  tc.learning_rate =
      cfg.get_double("train", "learning_rate").value_or(tc.learning_rate);
  tc.weight_decay =
      cfg.get_double("train", "weight_decay").value_or(tc.weight_decay);
  tc.batch_size = static_cast<int>(
      cfg.get_int("train", "batch_size").value_or(tc.batch_size));
  tc.max_epochs = static_cast<int>(
      cfg.get_int("train", "max_epochs").value_or(tc.max_epochs));
  if (auto v = cfg.get_int("train", "patience")) {
    tc.early_stop_patience = static_cast<int>(*v);
  }
  if (auto v = cfg.get_bool("train", "weighted_sampling")) {
    tc.weighted_sampling = *v;
  }
  // Flags override the config file.
  if (opt.lr >= 0.0) tc.learning_rate = opt.lr;
  if (opt.batch_size > 0) tc.batch_size = opt.batch_size;
  if (opt.max_epochs > 0) tc.max_epochs = opt.max_epochs;
  if (opt.patience == -1) tc.early_stop_patience.reset();
  if (opt.patience >= 0) tc.early_stop_patience = opt.patience;
  return tc;
}

SamplingSpec sampling_from_config(const TomlConfig& cfg, int default_frames) {
  SamplingSpec s;
  s.frame_count = static_cast<int>(
      cfg.get_int("sampling", "frame_count").value_or(default_frames));
  s.pad_frames =
      static_cast<int>(cfg.get_int("sampling", "pad_frames").value_or(10));
  s.mode = SamplingMode::Clamp;
  return s;
}

// --------------------------------------------------------------------------
// Training data manifest:
// {"examples":[{"label":"Story","split":"train","video":{"frames":path,
//   "width":.., "height":.., "fps":.., "start_frame":.., "end_frame":..},
//   "audio":{"wav":path}}]}
// --------------------------------------------------------------------------
struct ManifestEntry {
  SceneLabel label;
  std::string split = "train";
  std::string frames_path;
  int width = 0, height = 0;
  double fps = 25.0;
  FrameSpan span;
  std::string wav_path;
};

std::vector<ManifestEntry> parse_manifest(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("manifest parse failure: ") + e.what());
  }
  if (!doc.contains("examples") || !doc["examples"].is_array()) {
    throw SchemaError("manifest must contain an \"examples\" array");
  }
  std::vector<ManifestEntry> entries;
  for (const auto& e : doc["examples"]) {
    ManifestEntry m;
    m.label = parse_label(e.at("label").get<std::string>());
    m.split = e.value("split", std::string("train"));
    if (e.contains("video")) {
      const auto& v = e.at("video");
      m.frames_path = v.at("frames").get<std::string>();
      m.width = v.value("width", 0);
      m.height = v.value("height", 0);
      m.fps = v.value("fps", 25.0);
      m.span.start_frame = v.at("start_frame").get<int64_t>();
      m.span.end_frame = v.at("end_frame").get<int64_t>();
    }
    if (e.contains("audio")) {
      m.wav_path = e.at("audio").at("wav").get<std::string>();
    }
    entries.push_back(std::move(m));
  }
  return entries;
}

TensorF image_tensor(const Image& img) {
  TensorF t({img.height, img.width, 3});
  std::vector<float> vals = image_to_float(img);
  t.data.assign(vals.begin(), vals.end());
  return t;
}

/// Materializes manifest entries for the given model kind.
void materialize_examples(const std::vector<ManifestEntry>& entries,
                          const ModelSpec& spec, const SamplingSpec& sampling,
                          int64_t samples_per_frame,
                          std::vector<Example>& train_set,
                          std::vector<Example>& val_set) {
  const bool needs_video = spec.kind != "ast";
  const bool needs_audio = spec.kind == "ast" || spec.kind == "fusion" ||
                           spec.kind == "fusion-l";
  for (const ManifestEntry& m : entries) {
    std::vector<Image> frames;
    if (needs_video) {
      if (m.frames_path.empty()) {
        throw SchemaError("manifest entry lacks video for model " +
                          spec.kind);
      }
      auto source = open_frame_source(m.frames_path, m.width, m.height);
      for (int64_t idx : sample_frame_indices(m.span, sampling)) {
        frames.push_back(source->frame_at(idx));
      }
    }

    auto push = [&](Example ex) {
      if (m.split == "val") {
        val_set.push_back(std::move(ex));
      } else {
        train_set.push_back(std::move(ex));
      }
    };

    int label = static_cast<int>(label_index(m.label));
    if (spec.binary_target.has_value()) {
      label = binary_relabel(*spec.binary_target, m.label);
    }

    Example ex;
    ex.label = label;
    if (needs_audio) {
      if (m.wav_path.empty()) {
        throw SchemaError("manifest entry lacks audio for model " +
                          spec.kind);
      }
      AudioBuffer audio = read_wav(m.wav_path);
      AudioMeta meta{audio.sample_rate,
                     static_cast<int64_t>(audio.samples.size()),
                     samples_per_frame};
      AudioWindow window = audio_window_for_span(m.span, sampling, meta);
      MelSpectrogram mel = mel_spectrogram(
          extract_audio_window(audio, window), audio.sample_rate);
      ex.audio = TensorF({mel.n_mels, mel.n_frames});
      ex.audio.data.assign(mel.values.begin(), mel.values.end());
    }
    if (spec.kind == "frame") {
      // One training image per sampled frame.
      for (const Image& f : frames) {
        Example fx;
        fx.label = label;
        fx.image = image_tensor(
            resize_bilinear(f, spec.cnn.input_size, spec.cnn.input_size));
        push(std::move(fx));
      }
      continue;
    }
    if (needs_video) {
      ex.video = TensorF({static_cast<int64_t>(frames.size()),
                          spec.geometry.height, spec.geometry.width, 3});
      float* dst = ex.video.ptr();
      for (const Image& f : frames) {
        Image resized =
            resize_bilinear(f, spec.geometry.width, spec.geometry.height);
        std::vector<float> vals = image_to_float(resized);
        std::copy(vals.begin(), vals.end(), dst);
        dst += vals.size();
      }
    }
    push(std::move(ex));
  }
}

// --------------------------------------------------------------------------
// Subcommand bodies
// --------------------------------------------------------------------------

int cmd_stats(const SharedOptions&, const StatsOptions& opt) {
  std::vector<VideoRecord> records =
      parse_annotations(read_text_file(opt.annotations));
  emit_output(opt.out, class_distribution_csv(class_distribution(records)));
  return 0;
}

int cmd_detect(const SharedOptions& shared, const DetectOptions& opt) {
  TomlConfig cfg = load_config(shared);
  DetectorConfig det =
      detector_from_config(cfg, opt.threshold, opt.min_shot_frames);
  auto source = open_frame_source(opt.frames, opt.width, opt.height);
  ShotList shots = detect_shots(*source, det, opt.fps);
  emit_output(opt.out, shotlist_to_json(shots));
  return 0;
}

int cmd_features(const SharedOptions&, const FeaturesOptions& opt) {
  AudioBuffer audio = read_wav(opt.audio);
  int64_t count = opt.num_samples >= 0
                      ? opt.num_samples
                      : static_cast<int64_t>(audio.samples.size()) -
                            opt.start_sample;
  if (opt.start_sample < 0 ||
      opt.start_sample + count >
          static_cast<int64_t>(audio.samples.size())) {
    throw SchemaError("sample range outside the audio track");
  }
  std::vector<float> window(
      audio.samples.begin() + opt.start_sample,
      audio.samples.begin() + opt.start_sample + count);
  MelSpectrogram mel = mel_spectrogram(window, audio.sample_rate);
  write_mel_binary(opt.out, mel);
  std::cout << "wrote " << mel.n_mels << "x" << mel.n_frames
            << " spectrogram to " << opt.out << "\n";
  return 0;
}

int cmd_train(const SharedOptions& shared, const TrainOptions& opt) {
  TomlConfig cfg = load_config(shared);
  ModelSpec spec = model_spec_from_config(opt.model_id, cfg);
  TrainConfig tc = train_config_from(opt.model_id, cfg, opt);
  SamplingSpec sampling =
      sampling_from_config(cfg, spec.geometry.max_frames);
  int64_t spf = cfg.get_int("pipeline", "samples_per_frame").value_or(1728);

  std::vector<ManifestEntry> entries = parse_manifest(opt.data);
  std::vector<Example> train_set, val_set;
  materialize_examples(entries, spec, sampling, spf, train_set, val_set);
  log::info("training " + opt.model_id + " on " +
            std::to_string(train_set.size()) + " examples (" +
            std::to_string(val_set.size()) + " validation)");

  auto model = build_model(spec, shared.seed);
  TrainResult result = train(*model, train_set, val_set, tc, shared.seed);

  save_parameters(snapshot_parameters(*model), opt.out, spec.fingerprint());
  if (!opt.log_out.empty()) {
    write_text_file(opt.log_out, epoch_log_csv(result.log));
  }
  std::cout << "trained " << opt.model_id << " for " << result.log.size()
            << " epochs";
  if (result.early_stopped) std::cout << " (early stop)";
  std::cout << "; weights: " << opt.out << "\n";
  return 0;
}

int cmd_segment(const SharedOptions& shared, const SegmentOptions& opt) {
  TomlConfig cfg = load_config(shared);
  WeightFile weights = load_weight_file(opt.model);
  ModelSpec spec = ModelSpec::from_fingerprint(weights.config_fingerprint);
  std::shared_ptr<Model> model = build_model(spec, shared.seed);
  load_into_model(weights.store, *model);
  ModelShotClassifier classifier(model, spec);

  PipelineConfig pc;
  pc.detector = detector_from_config(cfg, opt.threshold, opt.min_shot_frames);
  pc.sampling = sampling_from_config(cfg, spec.geometry.max_frames);
  pc.samples_per_video_frame =
      cfg.get_int("pipeline", "samples_per_frame").value_or(1728);
  pc.use_audio = !opt.audio.empty();
  pc.workers = shared.workers;
  pc.model_name = spec.kind;

  std::optional<AudioBuffer> audio;
  if (!opt.audio.empty()) audio = read_wav(opt.audio);

  auto source = open_frame_source(opt.frames, opt.width, opt.height);
  RunResult run = segment_video(fs::path(opt.frames).stem().string(), *source,
                                opt.fps, audio ? &*audio : nullptr, pc,
                                classifier);
  write_text_file(opt.out, timeline_to_json(run.predicted));
  std::cout << "segmented " << run.shots.shot_count() << " shots into "
            << run.predicted.spans.size() << " scenes in " << std::fixed
            << std::setprecision(2) << run.wall_time_s << " s; timeline: "
            << opt.out << "\n";
  return 0;
}

int cmd_evaluate(const SharedOptions&, const EvaluateOptions& opt) {
  std::vector<VideoRecord> records =
      parse_annotations(read_text_file(opt.annotations));
  std::map<std::string, Timeline> predictions;
  for (const VideoRecord& rec : records) {
    fs::path pred = fs::path(opt.pred_dir) / (rec.video_id + ".json");
    if (!fs::exists(pred)) {
      throw MissingMediaError("no prediction file for video " + rec.video_id +
                              " (expected " + pred.string() + ")");
    }
    predictions.emplace(rec.video_id,
                        timeline_from_json(read_text_file(pred.string())));
  }
  EvaluationReport report = evaluate_predictions(records, predictions);
  std::string csv = evaluation_report_csv(opt.model_name, report);
  if (opt.report.empty()) {
    std::cout << csv;
  } else {
    write_text_file(opt.report, csv);
    std::cout << "accuracy "
              << metric_to_string(report.pooled_metrics.accuracy)
              << " over " << std::fixed << std::setprecision(2)
              << report.pooled_metrics.total_evaluated_s
              << " s (excluded " << report.excluded_s << " s); report: "
              << opt.report << "\n";
  }
  return 0;
}

// --------------------------------------------------------------------------
// App wiring
// --------------------------------------------------------------------------

struct AppState {
  SharedOptions shared;
  StatsOptions stats;
  DetectOptions detect;
  FeaturesOptions features;
  TrainOptions train;
  SegmentOptions segment;
  EvaluateOptions evaluate;
  std::function<int()> action;  // selected subcommand, run after parsing
};

std::unique_ptr<CLI::App> build_app(AppState& st) {
  auto app = std::make_unique<CLI::App>(
      "newsseg - news video segmentation toolkit");
  app->require_subcommand(0, 1);

  app->add_option("--config", st.shared.config_path,
                  "TOML config file with per-module tables");
  app->add_option("--seed", st.shared.seed,
                  "Seed for every random draw (default 0)");
  app->add_option("--workers", st.shared.workers,
                  "Worker threads for per-shot classification (1 = "
                  "deterministic test mode)");
  app->add_flag("--json-errors", st.shared.json_errors,
                "Emit machine-readable JSON errors on stderr");
  app->add_option("--log-level", st.shared.log_level,
                  "Log level: error, warn, info, debug (overrides "
                  "NEWSSEG_LOG)");

  CLI::App* stats =
      app->add_subcommand("stats", "Class distribution of an annotation "
                                   "export as CSV");
  stats->add_option("annotations", st.stats.annotations,
                    "Annotation JSON document")
      ->required();
  stats->add_option("--out", st.stats.out, "Output CSV path (default stdout)");
  stats->callback([&st] { st.action = [&st] { return cmd_stats(st.shared, st.stats); }; });

  CLI::App* detect = app->add_subcommand(
      "detect", "Detect shot boundaries in a frame stream");
  detect->add_option("--frames", st.detect.frames,
                     "Raw RGB24 file, '-' for stdin, or a PNG directory")
      ->required();
  detect->add_option("--width", st.detect.width,
                     "Frame width in pixels (raw streams)");
  detect->add_option("--height", st.detect.height,
                     "Frame height in pixels (raw streams)");
  detect->add_option("--fps", st.detect.fps, "Frames per second metadata");
  detect->add_option("--threshold", st.detect.threshold,
                     "Content score cut threshold");
  detect->add_option("--min-shot-frames", st.detect.min_shot_frames,
                     "Minimum frames per shot");
  detect->add_option("--out", st.detect.out,
                     "Output shot list JSON (default stdout)");
  detect->callback([&st] { st.action = [&st] { return cmd_detect(st.shared, st.detect); }; });

  CLI::App* features = app->add_subcommand(
      "features", "Export a log-mel spectrogram from a WAV file");
  features->add_option("--audio", st.features.audio,
                       "PCM 16-bit mono 44.1 kHz WAV input")
      ->required();
  features->add_option("--out", st.features.out,
                       "Output binary spectrogram path")
      ->required();
  features->add_option("--start-sample", st.features.start_sample,
                       "First sample of the analysis window");
  features->add_option("--num-samples", st.features.num_samples,
                       "Window length in samples (default: to end)");
  features->callback(
      [&st] { st.action = [&st] { return cmd_features(st.shared, st.features); }; });

  CLI::App* train = app->add_subcommand(
      "train", "Train a classifier on a dataset manifest");
  train->add_option("--model", st.train.model_id,
                    "Model id: frame|vivit|ast|fusion|fusion-l|"
                    "binary:<Label>")
      ->required();
  train->add_option("--data", st.train.data, "Dataset manifest JSON")
      ->required();
  train->add_option("--out", st.train.out, "Output weight file");
  train->add_option("--log-out", st.train.log_out, "Epoch log CSV path");
  train->add_option("--lr", st.train.lr, "Learning rate override");
  train->add_option("--batch-size", st.train.batch_size,
                    "Batch size override");
  train->add_option("--max-epochs", st.train.max_epochs,
                    "Epoch limit override");
  train->add_option("--patience", st.train.patience,
                    "Early-stop patience override (-1 disables)");
  train->callback([&st] { st.action = [&st] { return cmd_train(st.shared, st.train); }; });

  CLI::App* segment = app->add_subcommand(
      "segment", "Segment a video into a labeled timeline");
  segment->add_option("--frames", st.segment.frames,
                      "Raw RGB24 file or PNG directory (seekable)")
      ->required();
  segment->add_option("--audio", st.segment.audio,
                      "Aligned WAV track (enables audio models)");
  segment->add_option("--width", st.segment.width,
                      "Frame width in pixels (raw streams)");
  segment->add_option("--height", st.segment.height,
                      "Frame height in pixels (raw streams)");
  segment->add_option("--fps", st.segment.fps, "Frames per second metadata");
  segment->add_option("--model", st.segment.model,
                      "Trained weight file (.nsg)")
      ->required();
  segment->add_option("--out", st.segment.out, "Output timeline JSON");
  segment->add_option("--threshold", st.segment.threshold,
                      "Content score cut threshold");
  segment->add_option("--min-shot-frames", st.segment.min_shot_frames,
                      "Minimum frames per shot");
  segment->callback([&st] { st.action = [&st] { return cmd_segment(st.shared, st.segment); }; });

  CLI::App* evaluate = app->add_subcommand(
      "evaluate", "Score predicted timelines against annotations");
  evaluate->add_option("--annotations", st.evaluate.annotations,
                       "Annotation JSON document")
      ->required();
  evaluate->add_option("--pred-dir", st.evaluate.pred_dir,
                       "Directory of <video_id>.json predicted timelines")
      ->required();
  evaluate->add_option("--report", st.evaluate.report,
                       "Output report CSV (default stdout)");
  evaluate->add_option("--model-name", st.evaluate.model_name,
                       "Model column value in the report");
  evaluate->callback(
      [&st] { st.action = [&st] { return cmd_evaluate(st.shared, st.evaluate); }; });

  // Global flags (--seed, --json-errors, ...) may follow the subcommand.
  for (CLI::App* sub : app->get_subcommands([](CLI::App*) { return true; })) {
    sub->fallthrough();
  }
  return app;
}

void report_error(const AppState& st, ErrorCode code,
                  const std::string& message) {
  if (st.shared.json_errors) {
    nlohmann::json j;
    j["error"] = {{"code", error_code_name(code)}, {"message", message}};
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "newsseg: error: " << message << "\n";
  }
}

}  // namespace

std::string help_text(const std::string& subcommand) {
  AppState st;
  auto app = build_app(st);
  if (subcommand.empty()) return app->help();
  return app->get_subcommand(subcommand)->help();
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  AppState st;
  auto app = build_app(st);
  try {
    app->parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    // Print help for the deepest parsed subcommand.
    CLI::App* target = app.get();
    while (!target->get_subcommands().empty()) {
      target = target->get_subcommands().front();
    }
    std::cout << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app->help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app->help();
    return 1;
  }
  if (!st.action) {
    std::cout << app->help();
    return 1;
  }
  apply_log_level(st.shared);
  try {
    return st.action();
  } catch (const Error& e) {
    report_error(st, e.code(), e.what());
    return is_validation_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    report_error(st, ErrorCode::Usage, e.what());
    return 1;
  }
}

}  // namespace newsseg::cli
