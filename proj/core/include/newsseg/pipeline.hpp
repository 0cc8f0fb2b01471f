#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "newsseg/features.hpp"
#include "newsseg/ingest.hpp"
#include "newsseg/models.hpp"
#include "newsseg/shotdetect.hpp"
#include "newsseg/timeline.hpp"
#include "newsseg/wav.hpp"

namespace newsseg {

struct PipelineConfig {
  DetectorConfig detector;
  SamplingSpec sampling{16, 10, SamplingMode::Clamp};
  int64_t samples_per_video_frame = 1728;
  bool use_audio = false;
  int workers = 1;
  std::string model_name = "model";  // report label
};

/// Everything one shot hands to a classifier: sampled frames at source
/// resolution plus the aligned audio window (empty when audio is off).
struct ShotInput {
  FrameSpan span;
  std::vector<Image> frames;
  std::vector<float> audio_samples;
  double fps = 25.0;
  int sample_rate = 44100;
};

/// Per-shot classifier surface; the pipeline is agnostic to what is behind
/// it (a trained model, or an oracle in tests).
class ShotClassifier {
 public:
  virtual ~ShotClassifier() = default;
  virtual ProbVector classify(const ShotInput& shot) = 0;
  virtual int arity() const = 0;
};

/// Wraps a trained Model: frames resized to the model input, audio turned
/// into a log-mel spectrogram, frame models aggregated with frame_vote.
class ModelShotClassifier : public ShotClassifier {
 public:
  ModelShotClassifier(std::shared_ptr<Model> model, const ModelSpec& spec);
  ProbVector classify(const ShotInput& shot) override;
  int arity() const override { return spec_.num_classes; }

 private:
  std::shared_ptr<Model> model_;
  ModelSpec spec_;
};

struct RunResult {
  std::string video_id;
  ShotList shots;
  std::vector<ProbVector> shot_probs;
  Timeline predicted;
  double wall_time_s = 0.0;
};

/// Two-step segmentation: detect shots, classify each (argmax, ties broken
/// by canonical label order), merge same-label neighbours. The frame source
/// must be seekable (classification revisits sampled frames).
RunResult segment_video(const std::string& video_id, FrameSource& frames,
                        double fps, const AudioBuffer* audio,
                        const PipelineConfig& cfg, ShotClassifier& classifier);

struct EvaluationReport {
  std::vector<std::pair<std::string, DurationConfusion>> per_video;
  DurationConfusion pooled;
  MetricsReport pooled_metrics;
  int64_t excluded_frames = 0;  // labeled in exactly one timeline
  double excluded_s = 0.0;
};

/// Duration-weighted evaluation of predicted timelines against annotations.
/// Throws MissingMediaError when a video has no prediction.
EvaluationReport evaluate_predictions(
    const std::vector<VideoRecord>& annotations,
    const std::map<std::string, Timeline>& predictions);

/// Media access for full-corpus evaluation runs.
class MediaProvider {
 public:
  virtual ~MediaProvider() = default;
  /// Throws MissingMediaError when the video has no frames.
  virtual std::unique_ptr<FrameSource> frames(const std::string& video_id) = 0;
  virtual std::optional<AudioBuffer> audio(const std::string& video_id) = 0;
};

/// Runs segment_video over every annotated video and pools the confusion
/// matrices. Throws EmptyInputError for an empty corpus.
EvaluationReport evaluate_corpus(const std::vector<VideoRecord>& annotations,
                                 MediaProvider& media,
                                 const PipelineConfig& cfg,
                                 ShotClassifier& classifier);

/// Report CSV mirroring the per-label precision/recall table plus the
/// accuracy summary row and the excluded-duration flag.
std::string evaluation_report_csv(const std::string& model_name,
                                  const EvaluationReport& report);

}  // namespace newsseg
