#include "newsseg/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "newsseg/error.hpp"
#include "newsseg/log.hpp"
#include "newsseg/rng.hpp"

namespace newsseg {

namespace {

/// Cross-entropy from logits; returns loss and writes dlogits (softmax - y).
double cross_entropy_grad(const TensorF& logits, int label, TensorF& dlogits) {
  const int64_t k = logits.numel();
  if (label < 0 || label >= k) {
    throw ShapeError("label " + std::to_string(label) +
                     " outside model arity " + std::to_string(k));
  }
  float mx = logits.data[0];
  for (float v : logits.data) mx = std::max(mx, v);
  double sum = 0.0;
  for (int64_t i = 0; i < k; ++i) {
    sum += std::exp(static_cast<double>(logits.data[static_cast<size_t>(i)]) -
                    mx);
  }
  double log_z = std::log(sum) + mx;
  double loss =
      log_z - static_cast<double>(logits.data[static_cast<size_t>(label)]);
  dlogits = TensorF({k});
  for (int64_t i = 0; i < k; ++i) {
    double p = std::exp(
        static_cast<double>(logits.data[static_cast<size_t>(i)]) - log_z);
    dlogits.data[static_cast<size_t>(i)] = static_cast<float>(p);
  }
  dlogits.data[static_cast<size_t>(label)] -= 1.0f;
  return loss;
}

int argmax_logits(const TensorF& logits) {
  int best = 0;
  for (int64_t i = 1; i < logits.numel(); ++i) {
    if (logits.data[static_cast<size_t>(i)] >
        logits.data[static_cast<size_t>(best)]) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<size_t> epoch_order(const std::vector<Example>& train_set,
                                const TrainConfig& cfg, RngStream& rng) {
  std::vector<size_t> order(train_set.size());
  if (cfg.weighted_sampling) {
    // Inverse-frequency weights over the labels present in the epoch.
    std::vector<int64_t> counts;
    for (const Example& ex : train_set) {
      if (static_cast<size_t>(ex.label) >= counts.size()) {
        counts.resize(static_cast<size_t>(ex.label) + 1, 0);
      }
      counts[static_cast<size_t>(ex.label)] += 1;
    }
    std::vector<double> cdf(train_set.size());
    double acc = 0.0;
    for (size_t i = 0; i < train_set.size(); ++i) {
      acc += 1.0 /
             static_cast<double>(counts[static_cast<size_t>(
                 train_set[i].label)]);
      cdf[i] = acc;
    }
    for (size_t i = 0; i < order.size(); ++i) {
      double u = rng.uniform() * acc;
      order[i] = static_cast<size_t>(
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (order[i] >= train_set.size()) order[i] = train_set.size() - 1;
    }
  } else {
    std::iota(order.begin(), order.end(), size_t{0});
    rng.shuffle(order);
  }
  return order;
}

}  // namespace

TrainConfig train_preset_for(const std::string& model_id) {
  TrainConfig cfg;
  if (model_id == "frame") {
    cfg.optimizer = OptimizerKind::Adam;
    cfg.learning_rate = 1e-4;
    cfg.batch_size = 32;
    cfg.max_epochs = 100;
    cfg.early_stop_patience = 15;
    cfg.weighted_sampling = true;
    return cfg;
  }
  cfg.optimizer = OptimizerKind::AdamW;
  cfg.learning_rate = 5e-3;
  cfg.weight_decay = 0.01;
  cfg.batch_size = 16;
  cfg.max_epochs = 100;
  cfg.early_stop_patience = 15;
  if (model_id == "fusion-l" || model_id.rfind("binary:", 0) == 0) {
    cfg.batch_size = 8;
  }
  return cfg;
}

std::pair<double, double> evaluate_model(Model& model,
                                         const std::vector<Example>& data) {
  if (data.empty()) return {0.0, 0.0};
  double loss_sum = 0.0;
  int64_t correct = 0;
  TensorF scratch;
  for (const Example& ex : data) {
    TensorF logits = model.forward(ex, /*training=*/false);
    loss_sum += cross_entropy_grad(logits, ex.label, scratch);
    if (argmax_logits(logits) == ex.label) ++correct;
  }
  return {loss_sum / static_cast<double>(data.size()),
          static_cast<double>(correct) / static_cast<double>(data.size())};
}

AdamOptimizer::AdamOptimizer(Model& model, const TrainConfig& cfg)
    : model_(model), cfg_(cfg) {
  model_.visit_params([&](const std::string&, TensorF* p, TensorF*) {
    m_.emplace_back(p->data.size(), 0.0f);
    v_.emplace_back(p->data.size(), 0.0f);
  });
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double wd =
      cfg_.optimizer == OptimizerKind::AdamW ? cfg_.weight_decay : 0.0;
  size_t slot = 0;
  model_.visit_params([&](const std::string&, TensorF* p, TensorF* g) {
    std::vector<float>& m = m_[slot];
    std::vector<float>& v = v_[slot];
    ++slot;
    for (size_t i = 0; i < p->data.size(); ++i) {
      double grad = g->data[i];
      double mi = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * grad;
      double vi = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * grad * grad;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      double mhat = mi / bc1;
      double vhat = vi / bc2;
      double update = cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.eps);
      // Decoupled weight decay (inactive for plain Adam).
      double decayed = cfg_.learning_rate * wd * p->data[i];
      p->data[i] = static_cast<float>(p->data[i] - update - decayed);
    }
  });
}

TrainResult train(Model& model, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const TrainConfig& cfg,
                  uint64_t seed) {
  if (train_set.empty()) throw EmptyInputError("training set is empty");
  if (cfg.batch_size < 1) throw SchemaError("batch_size must be >= 1");
  if (cfg.learning_rate < 0.0) {
    throw SchemaError("learning rate must be non-negative");
  }
  for (const Example& ex : train_set) {
    if (ex.label < 0 || ex.label >= model.num_classes()) {
      throw ShapeError("training label " + std::to_string(ex.label) +
                       " outside model arity " +
                       std::to_string(model.num_classes()));
    }
  }

  AdamOptimizer optimizer(model, cfg);
  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  int epochs_since_improvement = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    RngStream epoch_rng(seed, static_cast<uint64_t>(epoch));
    model.seed_dropout(seed * 1315423911ULL +
                       static_cast<uint64_t>(epoch));
    std::vector<size_t> order = epoch_order(train_set, cfg, epoch_rng);

    double train_loss = 0.0;
    int64_t train_correct = 0;
    size_t cursor = 0;
    while (cursor < order.size()) {
      size_t batch_end =
          std::min(cursor + static_cast<size_t>(cfg.batch_size), order.size());
      const double batch_n = static_cast<double>(batch_end - cursor);
      model.zero_grads();
      for (size_t i = cursor; i < batch_end; ++i) {
        const Example& ex = train_set[order[i]];
        TensorF logits = model.forward(ex, /*training=*/true);
        TensorF dlogits;
        double loss = cross_entropy_grad(logits, ex.label, dlogits);
        if (!std::isfinite(loss)) {
          throw DivergenceError("non-finite loss at epoch " +
                                std::to_string(epoch) + ", example " +
                                std::to_string(order[i]));
        }
        train_loss += loss;
        if (argmax_logits(logits) == ex.label) ++train_correct;
        for (float& g : dlogits.data) g /= static_cast<float>(batch_n);
        model.backward(dlogits);
      }
      optimizer.step();
      cursor = batch_end;
    }
    train_loss /= static_cast<double>(order.size());

    auto [val_loss, val_acc] = evaluate_model(model, val_set);
    if (!val_set.empty() && !std::isfinite(val_loss)) {
      throw DivergenceError("non-finite validation loss at epoch " +
                            std::to_string(epoch));
    }
    auto t1 = std::chrono::steady_clock::now();

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = train_loss;
    stats.train_accuracy = static_cast<double>(train_correct) /
                           static_cast<double>(order.size());
    stats.val_loss = val_loss;
    stats.val_accuracy = val_acc;
    stats.seconds = std::chrono::duration<double>(t1 - t0).count();
    result.log.push_back(stats);
    log::info("epoch " + std::to_string(epoch) + ": train loss " +
              std::to_string(train_loss) + ", val loss " +
              std::to_string(val_loss));

    // Early stopping: strict improvement resets the patience counter.
    if (!val_set.empty() && cfg.early_stop_patience.has_value()) {
      if (val_loss < best_val) {
        best_val = val_loss;
        result.best_epoch = epoch;
        epochs_since_improvement = 0;
      } else {
        ++epochs_since_improvement;
        if (epochs_since_improvement >= *cfg.early_stop_patience) {
          result.early_stopped = true;
          break;
        }
      }
    } else if (val_loss < best_val) {
      best_val = val_loss;
      result.best_epoch = epoch;
    }
  }
  result.best_val_loss = best_val;
  return result;
}

std::string epoch_log_csv(const std::vector<EpochStats>& log) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << "epoch,train_loss,train_acc,val_loss,val_acc,seconds\n";
  for (const EpochStats& e : log) {
    os << e.epoch << "," << e.train_loss << "," << e.train_accuracy << ","
       << e.val_loss << "," << e.val_accuracy << "," << e.seconds << "\n";
  }
  return os.str();
}

}  // namespace newsseg
