#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "newsseg/models.hpp"

namespace newsseg {

enum class OptimizerKind { Adam, AdamW };

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled; AdamW presets use 0.01
  int batch_size = 32;
  int max_epochs = 100;
  std::optional<int> early_stop_patience = 15;
  bool weighted_sampling = false;
};

/// Optimizer/batch presets matching the per-model training recipes:
/// frame: Adam lr 1e-4 batch 32; vivit/ast/fusion: AdamW lr 5e-3 batch 16;
/// fusion-l and its binary wrappers: batch 8.
TrainConfig train_preset_for(const std::string& model_id);

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> log;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  bool early_stopped = false;
};

/// Mean cross-entropy and accuracy of the model over a dataset (eval mode).
std::pair<double, double> evaluate_model(Model& model,
                                         const std::vector<Example>& data);

/// Deterministic mini-batch training with early stopping on validation
/// loss. Gradients are averaged per batch; a non-finite loss aborts with
/// DivergenceError. lr = 0 leaves parameters bitwise unchanged.
TrainResult train(Model& model, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const TrainConfig& cfg,
                  uint64_t seed);

/// One Adam/AdamW step over registered parameters; exposed for tests.
class AdamOptimizer {
 public:
  AdamOptimizer(Model& model, const TrainConfig& cfg);
  void step();

 private:
  Model& model_;
  TrainConfig cfg_;
  int64_t t_ = 0;
  std::vector<std::vector<float>> m_;
  std::vector<std::vector<float>> v_;
};

std::string epoch_log_csv(const std::vector<EpochStats>& log);

}  // namespace newsseg
