// augmod: generate impaired I/Q modulation datasets, train the light
// length-invariant classifiers on them, and evaluate/sweep the results.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "augmod/dataset.hpp"
#include "augmod/metrics.hpp"
#include "augmod/model.hpp"
#include "augmod/runtime.hpp"
#include "augmod/trainer.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

using namespace augmod;

void log_line(const std::string& msg) { std::fprintf(stderr, "[augmod] %s\n", msg.c_str()); }

void log_run_header(const std::string& command, std::uint64_t seed, const std::string& dataset_path) {
  log_line("command: " + command);
  log_line("version: " + std::string(kToolVersion) + " (dataset format v" +
           std::to_string(kDatasetFormatVersion) + ", checkpoint format v" +
           std::to_string(kCheckpointFormatVersion) + ")");
  log_line("seed: " + std::to_string(seed));
  log_line("threads: " + std::to_string(max_threads()));
  if (!dataset_path.empty()) {
    const std::string digest = file_digest(manifest_path_for(dataset_path));
    log_line("dataset: " + dataset_path +
             (digest.empty() ? " (no manifest)" : " (manifest " + digest + ")"));
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) return "";
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

LengthMode parse_length_flag(const std::string& text) {
  if (text == "variable") return LengthMode::variable();
  if (text == "full") return LengthMode::fixed_full();
  if (text.rfind("fixed:", 0) == 0) {
    const long n = std::stol(text.substr(6));
    if (n < 1) throw CLI::ValidationError("--length", "fixed length must be >= 1");
    return LengthMode::fixed_n(n);
  }
  throw CLI::ValidationError("--length", "expected fixed:N, variable, or full");
}

int run_generate(const std::string& out, std::uint64_t seed, std::uint32_t per_pair,
                 std::uint32_t samples, const std::string& freq_flag) {
  GenConfig config;
  config.master_seed = seed;
  config.examples_per_pair = per_pair;
  config.n_samples = samples;
  config.freq_offset_enabled = freq_flag == "on";
  config.validate();

  log_run_header("generate", seed, "");
  log_line("config: per-pair=" + std::to_string(per_pair) + " samples=" + std::to_string(samples) +
           " freq-offset=" + freq_flag + " total=" + std::to_string(config.total_examples()));
  generate_dataset(config, out);
  log_line("wrote " + out + " (" + std::to_string(config.total_examples()) + " examples) and " +
           manifest_path_for(out));
  return 0;
}

int run_train(const std::string& dataset_path, const std::string& arch, int epochs, int batch,
              double lr, const std::string& length_flag, std::uint64_t seed,
              const std::string& init_path, const std::string& out_path,
              const std::string& history_path, bool deterministic, std::int64_t test_limit) {
  log_run_header("train", seed, dataset_path);

  const Dataset dataset = load_dataset(dataset_path);
  auto [train_view, test_view] = split_half(dataset);
  log_line("config: model=" + arch + " epochs=" + std::to_string(epochs) +
           " batch=" + std::to_string(batch) + " lr=" + std::to_string(lr) + " length=" +
           length_flag + " train=" + std::to_string(train_view.size()) + " test=" +
           std::to_string(test_view.size()));

  TrainConfig tc;
  tc.epochs = epochs;
  tc.batch_size = batch;
  tc.lr = lr;
  tc.length = parse_length_flag(length_flag);
  tc.master_seed = seed;
  tc.deterministic = deterministic;
  tc.test_limit = test_limit;

  FitResult result;
  if (init_path.empty()) {
    result = fit(build_model(arch, dataset.n_classes()), train_view, test_view, tc);
  } else {
    Checkpoint base = load_checkpoint(init_path);
    if (nn::architecture_name(base.net.config().arch) != arch)
      throw std::invalid_argument("--model disagrees with the architecture stored in " + init_path);
    result = fine_tune(base, train_view, test_view, tc);
  }
  result.meta.dataset_manifest_hash = file_digest(manifest_path_for(dataset_path));

  save_checkpoint(result.net, result.meta, out_path);
  log_line("wrote checkpoint " + out_path);
  if (!history_path.empty()) {
    write_history_csv(result.history, history_path, deterministic);
    log_line("wrote history " + history_path);
  }
  if (!result.history.empty()) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "final test error: %.4f", result.history.back().test_err);
    log_line(buf);
  }
  return 0;
}

int run_eval(const std::string& ckpt_path, const std::string& dataset_path, long length,
             const std::string& csv_path) {
  log_run_header("eval", 0, dataset_path);
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const Dataset dataset = load_dataset(dataset_path);
  auto [train_view, test_view] = split_half(dataset);
  const MetricsReport report = evaluate(ckpt.net, test_view, length);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "accuracy: %.4f over %lld test examples",
                report.overall.accuracy(), static_cast<long long>(report.overall.count));
  log_line(buf);
  if (!csv_path.empty()) {
    emit_csv(report, csv_path);
    log_line("wrote " + csv_path);
  }
  std::printf("%.6f\n", report.overall.accuracy());
  return 0;
}

int run_sweep(const std::string& kind, const std::string& ckpt_path,
              const std::string& dataset_path, const std::string& csv_path, bool sign_split) {
  log_run_header("sweep", 0, dataset_path);
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const Dataset dataset = load_dataset(dataset_path);
  auto [train_view, test_view] = split_half(dataset);

  MetricsReport report;
  if (kind == "snr")
    report = sweep_snr(ckpt.net, test_view);
  else if (kind == "length")
    report = sweep_length(ckpt.net, test_view);
  else if (kind == "freq")
    report = sweep_freq_offset(ckpt.net, test_view, half_decade_edges(), sign_split);
  else
    throw CLI::ValidationError("--kind", "expected snr, length, or freq");

  for (const auto& g : report.groups)
    std::printf("%s,%lld,%.6f\n", g.label.c_str(), static_cast<long long>(g.count), g.accuracy());
  if (!csv_path.empty()) {
    emit_csv(report, csv_path);
    log_line("wrote " + csv_path);
  }
  return 0;
}

int run_infer(const std::string& ckpt_path, const std::string& iq_path, long samples) {
  log_run_header("infer", 0, "");
  const Checkpoint ckpt = load_checkpoint(ckpt_path);

  std::ifstream is(iq_path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open I/Q file: " + iq_path);
  std::vector<float> raw;
  float v;
  while (is.read(reinterpret_cast<char*>(&v), sizeof(float))) raw.push_back(v);
  if (raw.size() < 2 || raw.size() % 2 != 0)
    throw std::runtime_error("I/Q file must hold interleaved f32 pairs: " + iq_path);

  long n = static_cast<long>(raw.size() / 2);
  if (samples > 0) {
    if (samples > n)
      throw std::runtime_error("--samples exceeds the " + std::to_string(n) + " pairs in the file");
    n = samples;
  }
  Eigen::MatrixXf x(2, n);
  for (long t = 0; t < n; ++t) {
    x(0, t) = raw[static_cast<std::size_t>(2 * t)];
    x(1, t) = raw[static_cast<std::size_t>(2 * t) + 1];
  }

  const nn::VecX<float> probs = ckpt.net.predict(x);
  const auto& names = [&] {
    std::vector<std::string> fallback;
    for (ModulationScheme s : all_schemes()) fallback.emplace_back(scheme_name(s));
    return fallback;
  }();
  int best = 0;
  for (int c = 0; c < probs.size(); ++c) {
    if (probs[c] > probs[best]) best = c;
    const std::string name =
        c < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(c)] : std::to_string(c);
    std::printf("%s %.6f\n", name.c_str(), probs[c]);
  }
  std::printf("predicted: %s\n",
              best < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(best)].c_str()
                                                    : std::to_string(best).c_str());
  return 0;
}

int run_inspect(const std::string& dataset_path) {
  log_run_header("inspect", 0, dataset_path);
  const Dataset dataset = load_dataset(dataset_path);
  const std::string manifest = read_text_file(manifest_path_for(dataset_path));
  std::fputs(inspect_summary(dataset, manifest).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AugMod dataset generator and modulation classifier"};
  app.require_subcommand(1);

  int threads = 0;
  bool deterministic = false;
  app.add_option("--threads", threads, "worker threads (default: AUGMOD_THREADS or hardware)");
  app.add_flag("--deterministic", deterministic,
               "bit-reproducible artifacts for identical flags and seeds");

  auto* gen = app.add_subcommand("generate", "synthesize a labeled impaired-signal dataset");
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  std::uint32_t per_pair = 5000, samples = 1024;
  std::string freq_flag = "off";
  gen->add_option("--out", gen_out, "output dataset path")->required();
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--per-pair", per_pair, "examples per (modulation, SNR) pair");
  gen->add_option("--samples", samples, "samples per example");
  gen->add_option("--freq-offset", freq_flag, "simulate carrier frequency offset")
      ->check(CLI::IsMember({"on", "off"}));

  auto* train = app.add_subcommand("train", "train a classifier on a generated dataset");
  std::string train_dataset, train_model = "lrcnn", train_length = "full";
  std::string train_init, train_out, train_history;
  int train_epochs = 200, train_batch = 512;
  double train_lr = 1e-3;
  std::uint64_t train_seed = 0;
  std::int64_t train_test_limit = 0;
  train->add_option("--dataset", train_dataset, "dataset path")->required();
  train->add_option("--model", train_model, "architecture")->check(CLI::IsMember({"lcnn", "lrcnn"}));
  train->add_option("--epochs", train_epochs, "training epochs");
  train->add_option("--batch", train_batch, "batch size");
  train->add_option("--lr", train_lr, "Adam learning rate");
  train->add_option("--length", train_length, "fixed:N, variable, or full");
  train->add_option("--seed", train_seed, "master seed");
  train->add_option("--init", train_init, "checkpoint to fine-tune from");
  train->add_option("--out", train_out, "output checkpoint path")->required();
  train->add_option("--history", train_history, "per-epoch history CSV path");
  train->add_option("--test-limit", train_test_limit,
                    "cap test examples scored per epoch (0 = all)");

  auto* eval = app.add_subcommand("eval", "score a checkpoint on a dataset's test half");
  std::string eval_ckpt, eval_dataset, eval_csv;
  long eval_length = 0;
  eval->add_option("--checkpoint", eval_ckpt)->required();
  eval->add_option("--dataset", eval_dataset)->required();
  eval->add_option("--length", eval_length, "truncate signals to the first N samples");
  eval->add_option("--csv", eval_csv, "metrics CSV path");

  auto* sweep = app.add_subcommand("sweep", "error rate versus SNR, length, or frequency offset");
  std::string sweep_kind, sweep_ckpt, sweep_dataset, sweep_csv;
  bool sweep_sign_split = false;
  sweep->add_option("--kind", sweep_kind)->required()->check(CLI::IsMember({"snr", "length", "freq"}));
  sweep->add_option("--checkpoint", sweep_ckpt)->required();
  sweep->add_option("--dataset", sweep_dataset)->required();
  sweep->add_option("--csv", sweep_csv, "metrics CSV path");
  sweep->add_flag("--sign-split", sweep_sign_split, "separate +/- offsets in the freq sweep");

  auto* infer = app.add_subcommand("infer", "classify one raw interleaved-f32 I/Q capture");
  std::string infer_ckpt, infer_iq;
  long infer_samples = 0;
  infer->add_option("--checkpoint", infer_ckpt)->required();
  infer->add_option("--iq-file", infer_iq, "raw little-endian f32 I/Q pairs")->required();
  infer->add_option("--samples", infer_samples, "use only the first N pairs (0 = whole file)");

  auto* inspect = app.add_subcommand("inspect", "summarize a dataset file");
  std::string inspect_dataset;
  inspect->add_option("dataset", inspect_dataset, "dataset path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints usage to stderr
    return 1;
  }

  if (threads > 0) set_max_threads(threads);

  try {
    if (*gen) return run_generate(gen_out, gen_seed, per_pair, samples, freq_flag);
    if (*train)
      return run_train(train_dataset, train_model, train_epochs, train_batch, train_lr,
                       train_length, train_seed, train_init, train_out, train_history,
                       deterministic, train_test_limit);
    if (*eval) return run_eval(eval_ckpt, eval_dataset, eval_length, eval_csv);
    if (*sweep) return run_sweep(sweep_kind, sweep_ckpt, sweep_dataset, sweep_csv, sweep_sign_split);
    if (*infer) return run_infer(infer_ckpt, infer_iq, infer_samples);
    if (*inspect) return run_inspect(inspect_dataset);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "[augmod] error: %s\n", e.what());
    return 2;
  }
  return 1;
}
