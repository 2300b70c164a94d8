#include "augmod/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "augmod/runtime.hpp"

namespace augmod {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int argmax_lowest(const nn::VecX<float>& p) {
  int best = 0;
  for (int i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

void validate_against_dataset(const nn::ModelConfig& model, const DatasetView& train,
                              const DatasetView& test, const TrainConfig& config) {
  if (train.size() == 0) throw std::invalid_argument("training set is empty");
  if (test.size() == 0) throw std::invalid_argument("test set is empty");
  if (model.n_classes != train.data->n_classes())
    throw std::invalid_argument("model expects " + std::to_string(model.n_classes) +
                                " classes but the dataset has " +
                                std::to_string(train.data->n_classes()));
  if (config.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (config.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  const auto stored = static_cast<Eigen::Index>(train.data->n_samples);
  if (config.length.kind == LengthMode::Kind::Fixed) {
    if (config.length.fixed > stored)
      throw std::invalid_argument("fixed length exceeds stored sample count");
  } else {
    if (!(16 <= config.length.min && config.length.min <= config.length.max))
      throw std::invalid_argument("variable length bounds must satisfy 16 <= min <= max");
    if (config.length.max > stored)
      throw std::invalid_argument("variable length max exceeds stored sample count");
  }
}

}  // namespace

EpochStats train_epoch(nn::Network<float>& net, nn::AdamState<float>& opt, const DatasetView& train,
                       const TrainConfig& config, int epoch_index) {
  const std::int64_t n = train.size();
  const std::int64_t batch_size = config.batch_size;
  const auto epoch_u = static_cast<std::uint64_t>(epoch_index);

  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng shuffle_rng = derive_rng(config.master_seed, {stream::kShuffle, epoch_u});
  for (std::int64_t i = n - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(shuffle_rng.below(static_cast<std::uint64_t>(i + 1)))]);

  Rng length_rng = derive_rng(config.master_seed, {stream::kBatchLength, epoch_u});

  // per-example gradient slots, reduced in index order after the parallel part
  std::vector<std::vector<nn::ParamBlob<float>>> example_grads(
      static_cast<std::size_t>(std::min(batch_size, n)));
  for (auto& g : example_grads) g = net.make_grads();
  std::vector<nn::ParamBlob<float>> grad_sum = net.make_grads();
  std::vector<double> losses(example_grads.size());
  std::vector<char> correct(example_grads.size());

  double loss_total = 0.0;
  std::int64_t correct_total = 0;

  const std::int64_t n_batches = (n + batch_size - 1) / batch_size;
  for (std::int64_t b = 0; b < n_batches; ++b) {
    const std::int64_t begin = b * batch_size;
    const std::int64_t count = std::min(batch_size, n - begin);

    Eigen::Index steps = config.length.kind == LengthMode::Kind::VariableUniform
                             ? static_cast<Eigen::Index>(
                                   length_rng.uniform_int(config.length.min, config.length.max))
                             : config.length.fixed;

    parallel_for(count, [&](std::int64_t i) {
      const Example& ex = train.example(order[static_cast<std::size_t>(begin + i)]);
      nn::MatX<float> x = steps > 0 ? ex.iq.leftCols(steps) : ex.iq;
      Rng dropout_rng =
          derive_rng(config.master_seed, {stream::kDropout, epoch_u, static_cast<std::uint64_t>(b),
                                          static_cast<std::uint64_t>(i)});
      nn::VecX<float> probs;
      const float loss = net.loss_and_grad(x, ex.label, true, &dropout_rng,
                                           example_grads[static_cast<std::size_t>(i)], &probs);
      losses[static_cast<std::size_t>(i)] = loss;
      correct[static_cast<std::size_t>(i)] = argmax_lowest(probs) == ex.label;
    });

    for (auto& blob : grad_sum) {
      blob.w.setZero();
      blob.b.setZero();
    }
    double batch_loss = 0.0;
    for (std::int64_t i = 0; i < count; ++i) {
      const auto& g = example_grads[static_cast<std::size_t>(i)];
      for (std::size_t s = 0; s < grad_sum.size(); ++s) {
        grad_sum[s].w += g[s].w;
        grad_sum[s].b += g[s].b;
      }
      batch_loss += losses[static_cast<std::size_t>(i)];
      correct_total += correct[static_cast<std::size_t>(i)];
    }
    const float inv = 1.0f / static_cast<float>(count);
    for (auto& blob : grad_sum) {
      blob.w *= inv;
      blob.b *= inv;
    }

    if (!std::isfinite(batch_loss))
      throw std::runtime_error("training aborted: non-finite loss in epoch " +
                               std::to_string(epoch_index) + ", batch " + std::to_string(b));
    loss_total += batch_loss;

    nn::adam_step(net.params(), grad_sum, opt, static_cast<float>(config.lr),
                  static_cast<float>(config.beta1), static_cast<float>(config.beta2),
                  static_cast<float>(config.epsilon));
  }

  EpochStats stats;
  stats.train_loss = loss_total / static_cast<double>(n);
  stats.train_err = 1.0 - static_cast<double>(correct_total) / static_cast<double>(n);
  return stats;
}

double evaluate_error(const nn::Network<float>& net, const DatasetView& view, std::int64_t limit) {
  const std::int64_t total = view.size();
  if (total == 0) throw std::invalid_argument("evaluate_error: empty view");
  // a capped evaluation strides across the view, which is usually ordered by
  // (class, snr); taking the first examples instead would score one class only
  const std::int64_t n = limit > 0 ? std::min(limit, total) : total;
  const std::int64_t stride = total / n;
  std::vector<char> correct(static_cast<std::size_t>(n));
  parallel_for(n, [&](std::int64_t i) {
    nn::MatX<float> x = view.signal(i * stride);
    correct[static_cast<std::size_t>(i)] =
        argmax_lowest(net.predict(x)) == view.example(i * stride).label;
  });
  std::int64_t right = 0;
  for (char c : correct) right += c;
  return 1.0 - static_cast<double>(right) / static_cast<double>(n);
}

namespace {

FitResult run_training(nn::Network<float> net, const DatasetView& train, const DatasetView& test,
                       const TrainConfig& config, std::int64_t epochs_already_seen) {
  validate_against_dataset(net.config(), train, test, config);

  nn::AdamState<float> opt = nn::AdamState<float>::like(net.params());
  TrainHistory history;
  history.reserve(static_cast<std::size_t>(config.epochs));

  for (int e = 0; e < config.epochs; ++e) {
    const auto t0 = Clock::now();
    EpochStats stats = train_epoch(net, opt, train, config, e);
    stats.test_err = evaluate_error(net, test, config.test_limit);
    stats.seconds = seconds_since(t0);
    if (config.verbose)
      std::fprintf(stderr, "[train] epoch %d/%d loss=%.4f train_err=%.4f test_err=%.4f (%.1fs)\n",
                   e + 1, config.epochs, stats.train_loss, stats.train_err, stats.test_err,
                   stats.seconds);
    history.push_back(stats);
  }

  CheckpointMeta meta;
  meta.epochs_seen = epochs_already_seen + config.epochs;
  meta.master_seed = config.master_seed;
  return {std::move(net), meta, std::move(history)};
}

}  // namespace

FitResult fit(const nn::ModelConfig& model, const DatasetView& train, const DatasetView& test,
              const TrainConfig& config) {
  nn::Network<float> net(model);
  Rng init_rng = derive_rng(config.master_seed, {stream::kInit});
  net.init_weights(init_rng);
  return run_training(std::move(net), train, test, config, 0);
}

FitResult fine_tune(const Checkpoint& base, const DatasetView& train, const DatasetView& test,
                    const TrainConfig& config) {
  return run_training(base.net, train, test, config, base.meta.epochs_seen);
}

void write_history_csv(const TrainHistory& history, const std::string& path, bool deterministic) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
    os << "epoch,train_loss,train_err,test_err,seconds\n";
    char line[160];
    for (std::size_t e = 0; e < history.size(); ++e) {
      const EpochStats& s = history[e];
      std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g,%.9g,%.3f\n", e + 1, s.train_loss,
                    s.train_err, s.test_err, deterministic ? 0.0 : s.seconds);
      os << line;
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace augmod
