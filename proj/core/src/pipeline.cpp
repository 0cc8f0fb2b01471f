#include "newsseg/pipeline.hpp"

#include <chrono>
#include <sstream>
#include <thread>

#include "newsseg/error.hpp"
#include "newsseg/log.hpp"

namespace newsseg {

ModelShotClassifier::ModelShotClassifier(std::shared_ptr<Model> model,
                                         const ModelSpec& spec)
    : model_(std::move(model)), spec_(spec) {}

ProbVector ModelShotClassifier::classify(const ShotInput& shot) {
  const bool needs_video = spec_.kind != "ast";
  const bool needs_audio =
      spec_.kind == "ast" || spec_.kind == "fusion" || spec_.kind == "fusion-l";

  Example ex;
  if (needs_audio) {
    if (shot.audio_samples.empty()) {
      throw ShapeError("model \"" + spec_.kind +
                       "\" needs audio but the pipeline has none; pass "
                       "use_audio with a WAV input");
    }
    MelSpectrogram mel = mel_spectrogram(shot.audio_samples, shot.sample_rate);
    ex.audio = TensorF({mel.n_mels, mel.n_frames});
    ex.audio.data.assign(mel.values.begin(), mel.values.end());
  }

  if (spec_.kind == "frame") {
    // Classify each sampled frame independently, then average.
    std::vector<ProbVector> votes;
    votes.reserve(shot.frames.size());
    for (const Image& f : shot.frames) {
      Image resized =
          resize_bilinear(f, spec_.cnn.input_size, spec_.cnn.input_size);
      Example fx;
      fx.image = TensorF({resized.height, resized.width, 3});
      std::vector<float> vals = image_to_float(resized);
      fx.image.data.assign(vals.begin(), vals.end());
      votes.push_back(softmax(model_->forward(fx, /*training=*/false)));
    }
    return frame_vote(votes);
  }

  if (needs_video) {
    const int h = spec_.geometry.height;
    const int w = spec_.geometry.width;
    ex.video = TensorF({static_cast<int64_t>(shot.frames.size()), h, w, 3});
    float* dst = ex.video.ptr();
    for (const Image& f : shot.frames) {
      Image resized = resize_bilinear(f, w, h);
      std::vector<float> vals = image_to_float(resized);
      std::copy(vals.begin(), vals.end(), dst);
      dst += vals.size();
    }
  }
  return softmax(model_->forward(ex, /*training=*/false));
}

RunResult segment_video(const std::string& video_id, FrameSource& frames,
                        double fps, const AudioBuffer* audio,
                        const PipelineConfig& cfg,
                        ShotClassifier& classifier) {
  auto t0 = std::chrono::steady_clock::now();
  if (classifier.arity() != kNumLabels) {
    throw ShapeError("segmentation needs a 5-way classifier (binary models "
                     "are evaluated separately)");
  }
  ShotList shots = detect_shots(frames, cfg.detector, fps);
  if (!frames.seekable()) {
    throw IoError("segmentation needs a seekable frame source (file or "
                  "PNG directory, not stdin)");
  }

  const std::vector<FrameSpan> shot_spans = shots.spans();
  const int64_t implied_rate =
      cfg.samples_per_video_frame * static_cast<int64_t>(fps);
  if (cfg.use_audio && audio != nullptr &&
      implied_rate != audio->sample_rate) {
    log::info("samples_per_frame " +
              std::to_string(cfg.samples_per_video_frame) + " at " +
              std::to_string(fps) + " fps implies " +
              std::to_string(implied_rate) + " Hz; audio is " +
              std::to_string(audio->sample_rate) + " Hz");
  }

  // Gather shot inputs sequentially (the source is not thread-safe), then
  // classify with optional fan-out; slot-per-shot keeps output order fixed.
  std::vector<ShotInput> inputs(shot_spans.size());
  for (size_t i = 0; i < shot_spans.size(); ++i) {
    ShotInput& in = inputs[i];
    in.span = shot_spans[i];
    in.fps = fps;
    std::vector<int64_t> indices =
        sample_frame_indices(in.span, cfg.sampling);
    in.frames.reserve(indices.size());
    for (int64_t idx : indices) {
      in.frames.push_back(frames.frame_at(idx));
    }
    if (cfg.use_audio && audio != nullptr) {
      AudioMeta meta{audio->sample_rate,
                     static_cast<int64_t>(audio->samples.size()),
                     cfg.samples_per_video_frame};
      AudioWindow window = audio_window_for_span(in.span, cfg.sampling, meta);
      in.audio_samples = extract_audio_window(*audio, window);
      in.sample_rate = audio->sample_rate;
    }
  }

  std::vector<ProbVector> probs(inputs.size());
  std::vector<std::string> failures(inputs.size());
  const int workers =
      std::max(1, std::min<int>(cfg.workers,
                                static_cast<int>(inputs.size() ? inputs.size()
                                                               : 1)));
  auto run_range = [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      try {
        probs[i] = classifier.classify(inputs[i]);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  if (workers <= 1) {
    run_range(0, inputs.size());
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (inputs.size() + static_cast<size_t>(workers) - 1) /
                   static_cast<size_t>(workers);
    for (int t = 0; t < workers; ++t) {
      size_t lo = static_cast<size_t>(t) * chunk;
      size_t hi = std::min(inputs.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  for (size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      throw ShapeError("classification failed at shot " + std::to_string(i) +
                       ": " + failures[i]);
    }
  }

  std::vector<FrameSpan> labeled = shot_spans;
  for (size_t i = 0; i < labeled.size(); ++i) {
    probs[i].validate();
    labeled[i].label = label_from_index(probs[i].argmax());
  }
  Timeline predicted = merge_adjacent(normalize_timeline(labeled, fps));

  RunResult result;
  result.video_id = video_id;
  result.shots = std::move(shots);
  result.shot_probs = std::move(probs);
  result.predicted = std::move(predicted);
  result.wall_time_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  return result;
}

EvaluationReport evaluate_predictions(
    const std::vector<VideoRecord>& annotations,
    const std::map<std::string, Timeline>& predictions) {
  if (annotations.empty()) {
    throw EmptyInputError("no annotated videos to evaluate");
  }
  EvaluationReport report;
  bool first = true;
  for (const VideoRecord& rec : annotations) {
    auto it = predictions.find(rec.video_id);
    if (it == predictions.end()) {
      throw MissingMediaError("no prediction for video " + rec.video_id);
    }
    DurationConfusion cm = confusion_durations(it->second, rec.annotation);
    report.excluded_frames +=
        uncovered_overlap_frames(it->second, rec.annotation);
    if (first) {
      report.pooled = cm;
      first = false;
    } else {
      report.pooled += cm;
    }
    report.per_video.emplace_back(rec.video_id, std::move(cm));
  }
  report.pooled_metrics = metrics(report.pooled);
  report.excluded_s =
      static_cast<double>(report.excluded_frames) / report.pooled.fps;
  if (report.excluded_frames > 0) {
    log::info("evaluation excluded " + std::to_string(report.excluded_s) +
              " s labeled in only one timeline");
  }
  return report;
}

EvaluationReport evaluate_corpus(const std::vector<VideoRecord>& annotations,
                                 MediaProvider& media,
                                 const PipelineConfig& cfg,
                                 ShotClassifier& classifier) {
  if (annotations.empty()) {
    throw EmptyInputError("no annotated videos to evaluate");
  }
  std::map<std::string, Timeline> predictions;
  for (const VideoRecord& rec : annotations) {
    std::unique_ptr<FrameSource> frames = media.frames(rec.video_id);
    std::optional<AudioBuffer> audio = media.audio(rec.video_id);
    RunResult run =
        segment_video(rec.video_id, *frames, rec.fps,
                      audio ? &*audio : nullptr, cfg, classifier);
    predictions.emplace(rec.video_id, std::move(run.predicted));
  }
  return evaluate_predictions(annotations, predictions);
}

std::string evaluation_report_csv(const std::string& model_name,
                                  const EvaluationReport& report) {
  std::ostringstream os;
  os << "model,label,precision,recall\n";
  for (int c = 0; c < kNumLabels; ++c) {
    os << model_name << "," << label_name(static_cast<SceneLabel>(c)) << ","
       << metric_to_string(report.pooled_metrics.precision[
              static_cast<size_t>(c)])
       << ","
       << metric_to_string(report.pooled_metrics.recall[
              static_cast<size_t>(c)])
       << "\n";
  }
  os << "model,accuracy,total_s\n";
  std::ostringstream total;
  total.setf(std::ios::fixed);
  total.precision(2);
  total << report.pooled_metrics.total_evaluated_s;
  os << model_name << "," << metric_to_string(report.pooled_metrics.accuracy)
     << "," << total.str() << "\n";
  std::ostringstream excluded;
  excluded.setf(std::ios::fixed);
  excluded.precision(2);
  excluded << report.excluded_s;
  os << "model,excluded_s\n" << model_name << "," << excluded.str() << "\n";
  return os.str();
}

}  // namespace newsseg
