/*
 * Copyright 2026 The vseens Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <vseens/cli.hpp>
#include <vseens/errors.hpp>
#include <vseens/evaluation.hpp>
#include <vseens/io.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace vseens {

namespace fs = std::filesystem;

std::vector<BenchRow> run_bench(const Dataset& dataset, const TrainConfig& base,
                                int epochs) {
  std::vector<BenchRow> rows;
  for (Method m : {Method::VseEns, Method::Warp, Method::OptAuc}) {
    TrainConfig config = base;
    config.method = m;
    config.epochs = epochs;
    config.validate();
    Trainer trainer(dataset, config);
    for (int e = 0; e < epochs; ++e) {
      rows.push_back({m, trainer.run_epoch()});
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out =
    "method,epoch,mean_trials,ns_per_draw,updates,skipped,wall_time_seconds\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.method)) + ',' + std::to_string(r.stats.epoch) +
           ',' + format_double(r.stats.mean_trials) + ',' +
           format_double(r.stats.ns_per_draw()) + ',' +
           std::to_string(r.stats.updates) + ',' + std::to_string(r.stats.skipped) +
           ',' + format_double(r.stats.wall_time) + '\n';
  }
  return out;
}

namespace cli {

namespace {

constexpr const char* kImagesVocab = "images.vocab";
constexpr const char* kAnnotationsVocab = "annotations.vocab";

struct TrainFlags {
  std::string method = "vse-ens";
  std::optional<int> epochs;
  std::string weighting = "harmonic";
  TrainConfig config;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_method) {
  if (with_method) {
    cmd->add_option("--method", f.method, "vse-ens | warp | opt-auc")
      ->check(CLI::IsMember({"vse-ens", "warp", "opt-auc"}));
  }
  cmd->add_option("--epochs", f.epochs,
                  "epochs (default: 200 vse-ens, 150 warp, 800 opt-auc)");
  cmd->add_option("--k", f.config.k, "embedding dimension")->capture_default_str();
  cmd->add_option("--eta", f.config.eta, "learning rate")->capture_default_str();
  cmd->add_option("--reg", f.config.reg, "L2 coefficient")->capture_default_str();
  cmd->add_option("--init-std", f.config.init_std, "std of N(0, s^2) init")
    ->capture_default_str();
  cmd->add_option("--seed", f.config.seed, "random seed")->capture_default_str();
  cmd->add_option("--lambda", f.config.sampler.lambda,
                  "rank distribution shape, fraction of |A|")
    ->capture_default_str();
  cmd->add_option("--refresh-interval", f.config.sampler.refresh_interval,
                  "draws between ranking refreshes (0 = |A| log2 |A|)")
    ->capture_default_str();
  cmd->add_option("--max-rejects", f.config.sampler.max_rejects,
                  "adaptive redraws on positive collisions")
    ->capture_default_str();
  cmd->add_option("--weighting", f.weighting, "WARP rank weighting")
    ->check(CLI::IsMember({"harmonic", "mean-rank"}))
    ->capture_default_str();
  cmd->add_flag("--exact-rank", f.config.exact_rank,
                "exact WARP rank instead of the trial-count estimate");
}

TrainConfig resolve(const TrainFlags& f) {
  TrainConfig c = f.config;
  c.method = parse_method(f.method);
  c.epochs = f.epochs;
  c.weighting = f.weighting == "mean-rank" ? RankWeighting::Kind::MeanRank
                                           : RankWeighting::Kind::Harmonic;
  c.validate();
  return c;
}

struct Vocabs {
  Vocabulary images;
  Vocabulary annotations;
  bool found = false;
};

// Explicit --vocab-dir, else the pairs file's directory when it holds both
// vocabulary files.
Vocabs find_vocabs(const std::string& explicit_dir, const fs::path& pairs_path) {
  Vocabs v;
  fs::path dir = explicit_dir;
  if (dir.empty()) {
    dir = pairs_path.parent_path();
    if (dir.empty()) dir = ".";
    if (!fs::exists(dir / kImagesVocab) || !fs::exists(dir / kAnnotationsVocab)) {
      return v;
    }
  }
  v.images = load_vocabulary(dir / kImagesVocab);
  v.annotations = load_vocabulary(dir / kAnnotationsVocab);
  v.found = true;
  return v;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  }
}

int cmd_gen(const SyntheticSpec& spec, const std::string& out_dir,
            std::ostream& out) {
  const SyntheticData data = gen_synthetic(spec);
  const fs::path dir = out_dir;
  ensure_dir(dir);
  const Vocabulary images = numbered_vocabulary("img", spec.num_images);
  const Vocabulary annotations = numbered_vocabulary("tag", spec.num_annotations);
  write_pairs(dir / "pairs.tsv", data.dataset.pairs(), images, annotations);
  write_vocabulary(dir / kImagesVocab, images);
  write_vocabulary(dir / kAnnotationsVocab, annotations);
  save_model(dir / "truth.txt", data.truth);
  out << "wrote " << data.dataset.size() << " pairs to " << (dir / "pairs.tsv").string()
      << '\n';
  return kOk;
}

int cmd_split(const std::string& pairs_path, const std::string& vocab_dir,
              std::uint64_t seed, const std::string& out_dir, std::ostream& out) {
  Vocabs v = find_vocabs(vocab_dir, pairs_path);
  const PairsFile file = load_pairs(pairs_path, std::move(v.images),
                                    std::move(v.annotations));
  const Split split = leave_one_out_split(to_dataset(file), seed);

  const fs::path dir = out_dir;
  ensure_dir(dir);
  write_pairs(dir / "train.tsv", split.train.pairs(), file.images, file.annotations);
  std::vector<Pair> test;
  test.reserve(split.test.size());
  for (const auto& tc : split.test) {
    test.push_back({tc.image, tc.held_out});
  }
  write_pairs(dir / "test.tsv", test, file.images, file.annotations);
  write_vocabulary(dir / kImagesVocab, file.images);
  write_vocabulary(dir / kAnnotationsVocab, file.annotations);
  out << "train pairs " << split.train.size() << ", test images "
      << split.test.size() << '\n';
  return kOk;
}

int cmd_train(const std::string& train_path, const std::string& vocab_dir,
              const TrainFlags& flags, const std::string& out_dir,
              std::ostream& out) {
  const TrainConfig config = resolve(flags);
  Vocabs v = find_vocabs(vocab_dir, train_path);
  const PairsFile file = load_pairs(train_path, std::move(v.images),
                                    std::move(v.annotations));
  const Dataset dataset = to_dataset(file);

  const fs::path dir = out_dir;
  ensure_dir(dir);
  const TrainResult result = train(dataset, config);
  save_model(dir / "model.txt", result.model);
  write_trial_log(dir / "trials.csv", result.epochs);
  out << to_string(config.method) << ": " << result.epochs.size()
      << " epochs, final mean_trials "
      << format_double(result.epochs.back().mean_trials) << '\n';
  return kOk;
}

int cmd_eval(const std::string& model_path, const std::string& train_path,
             const std::string& test_path, const std::string& vocab_dir,
             bool include_train_positives, unsigned threads,
             const std::string& out_dir, std::ostream& out) {
  Vocabs v = find_vocabs(vocab_dir, train_path);
  const PairsFile train_file = load_pairs(train_path, std::move(v.images),
                                          std::move(v.annotations));
  const PairsFile test_file =
    load_pairs(test_path, train_file.images, train_file.annotations, true);
  const Dataset train_set = to_dataset(train_file);
  const auto model = load_model(model_path);
  if (model.num_images() != train_set.num_images() ||
      model.num_annotations() != train_set.num_annotations()) {
    throw ConfigError("model shape does not match the vocabulary");
  }

  std::vector<TestCase> test;
  test.reserve(test_file.pairs.size());
  for (const Pair& p : test_file.pairs) {
    test.push_back({p.image, p.annotation});
  }
  EvalOptions options;
  options.exclude_train_positives = !include_train_positives;
  options.threads = threads;
  const MetricsReport report = evaluate(model, train_set, test, options);
  const std::string json = metrics_json(report);
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_text(fs::path(out_dir) / "metrics.json", json);
  }
  out << json;
  return kOk;
}

int cmd_bench(const std::string& train_path, const std::string& vocab_dir,
              const SyntheticSpec& spec, const TrainFlags& flags, int epochs,
              const std::string& out_dir, std::ostream& out) {
  if (epochs < 1) {
    throw ConfigError("epochs must be at least 1");
  }
  const TrainConfig config = resolve(flags);
  Dataset dataset;
  if (!train_path.empty()) {
    Vocabs v = find_vocabs(vocab_dir, train_path);
    dataset = to_dataset(load_pairs(train_path, std::move(v.images),
                                    std::move(v.annotations)));
  } else {
    dataset = gen_synthetic(spec).dataset;
  }

  const fs::path dir = out_dir;
  ensure_dir(dir);
  const auto rows = run_bench(dataset, config, epochs);
  write_text(dir / "bench.csv", bench_csv(rows));
  for (Method m : {Method::VseEns, Method::Warp, Method::OptAuc}) {
    const EpochStats* first = nullptr;
    const EpochStats* last = nullptr;
    double wall = 0.0;
    for (const auto& r : rows) {
      if (r.method != m) continue;
      if (!first) first = &r.stats;
      last = &r.stats;
      wall += r.stats.wall_time;
    }
    out << to_string(m) << ": mean_trials " << format_double(first->mean_trials)
        << " -> " << format_double(last->mean_trials) << ", ns/draw "
        << format_double(first->ns_per_draw()) << " -> "
        << format_double(last->ns_per_draw()) << ", wall " << format_double(wall)
        << " s\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Visual-semantic embedding trainer with adaptive negative sampling",
               "vseens"};
  app.require_subcommand(1);

  SyntheticSpec spec;
  std::string out_dir = ".";
  auto add_synthetic = [&](CLI::App* cmd) {
    cmd->add_option("--images", spec.num_images, "number of images")
      ->capture_default_str();
    cmd->add_option("--annotations", spec.num_annotations, "dictionary size")
      ->capture_default_str();
    cmd->add_option("--true-rank", spec.true_rank, "planted factor rank")
      ->capture_default_str();
    cmd->add_option("--positives", spec.positives_per_image, "positives per image")
      ->capture_default_str();
    cmd->add_option("--noise", spec.noise, "probability of swapping a positive")
      ->capture_default_str();
  };

  auto* gen = app.add_subcommand("gen", "generate a planted synthetic dataset");
  add_synthetic(gen);
  gen->add_option("--seed", spec.seed, "random seed")->capture_default_str();
  gen->add_option("--out", out_dir, "output directory")->capture_default_str();

  std::string pairs_path;
  std::string vocab_dir;
  std::uint64_t split_seed = 42;
  auto* split = app.add_subcommand("split", "leave-one-out train/test split");
  split->add_option("--pairs", pairs_path, "pairs TSV")->required();
  split->add_option("--vocab-dir", vocab_dir, "directory with *.vocab files");
  split->add_option("--seed", split_seed, "random seed")->capture_default_str();
  split->add_option("--out", out_dir, "output directory")->capture_default_str();

  TrainFlags train_flags;
  std::string train_path;
  auto* train_cmd = app.add_subcommand("train", "train one method");
  train_cmd->add_option("--train", train_path, "training pairs TSV")->required();
  train_cmd->add_option("--vocab-dir", vocab_dir, "directory with *.vocab files");
  train_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
  add_train_flags(train_cmd, train_flags, true);

  std::string model_path;
  std::string test_path;
  std::string eval_out;
  bool include_train_positives = false;
  unsigned threads = 1;
  auto* eval = app.add_subcommand("eval", "leave-one-out ranking metrics");
  eval->add_option("--model", model_path, "checkpoint")->required();
  eval->add_option("--train", train_path, "training pairs TSV")->required();
  eval->add_option("--test", test_path, "held-out pairs TSV")->required();
  eval->add_option("--vocab-dir", vocab_dir, "directory with *.vocab files");
  eval->add_option("--out", eval_out, "also write metrics.json here");
  eval->add_flag("--include-train-positives", include_train_positives,
                 "rank training positives as candidates");
  eval->add_option("--threads", threads, "evaluation workers")->capture_default_str();

  TrainFlags bench_flags;
  constexpr int kBenchEpochs = 30;
  auto* bench = app.add_subcommand("bench", "sampler cost benchmark, all methods");
  bench->add_option("--train", train_path, "pairs TSV (default: synthetic)");
  bench->add_option("--vocab-dir", vocab_dir, "directory with *.vocab files");
  add_synthetic(bench);
  bench->add_option("--data-seed", spec.seed, "synthetic data seed")
    ->capture_default_str();
  bench->add_option("--out", out_dir, "output directory")->capture_default_str();
  add_train_flags(bench, bench_flags, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (gen->parsed()) return cmd_gen(spec, out_dir, out);
    if (split->parsed()) return cmd_split(pairs_path, vocab_dir, split_seed, out_dir, out);
    if (train_cmd->parsed()) {
      return cmd_train(train_path, vocab_dir, train_flags, out_dir, out);
    }
    if (eval->parsed()) {
      return cmd_eval(model_path, train_path, test_path, vocab_dir,
                      include_train_positives, threads, eval_out, out);
    }
    if (bench->parsed()) {
      const int epochs = bench_flags.epochs.value_or(kBenchEpochs);
      return cmd_bench(train_path, vocab_dir, spec, bench_flags, epochs, out_dir, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace cli
}  // namespace vseens
