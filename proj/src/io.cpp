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

#include <vseens/errors.hpp>
#include <vseens/io.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <numeric>
#include <fstream>
#include <random>
#include <sstream>

namespace vseens {

namespace fs = std::filesystem;

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  for (auto& t : tokens) {
    if (!index_.emplace(t, static_cast<Index>(tokens_.size())).second) {
      throw ConfigError("duplicate vocabulary token '" + t + "'");
    }
    tokens_.push_back(std::move(t));
  }
}

Index Vocabulary::intern(std::string_view token) {
  const auto [it, inserted] =
    index_.emplace(std::string(token), static_cast<Index>(tokens_.size()));
  if (inserted) {
    tokens_.emplace_back(token);
  }
  return it->second;
}

std::optional<Index> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

const std::string& Vocabulary::token(Index index) const {
  return tokens_.at(static_cast<std::size_t>(index));
}

Vocabulary numbered_vocabulary(std::string_view prefix, Index n) {
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    tokens.push_back(std::string(prefix) + std::to_string(i));
  }
  return Vocabulary(std::move(tokens));
}

void write_text(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  return in;
}

}  // namespace

PairsFile load_pairs(const fs::path& path, Vocabulary images,
                     Vocabulary annotations, bool frozen) {
  std::ifstream in = open_input(path);
  PairsFile file;
  file.images = std::move(images);
  file.annotations = std::move(annotations);

  std::vector<Pair> pairs;
  std::string line;
  std::size_t line_no = 0;
  auto resolve = [&](Vocabulary& vocab, std::string_view token,
                     const char* kind) -> Index {
    if (!frozen) {
      return vocab.intern(token);
    }
    if (const auto idx = vocab.find(token)) {
      return *idx;
    }
    throw ParseError(path.string() + ": unknown " + kind + " token '" +
                       std::string(token) + "'",
                     line_no);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(path.string() + ": expected exactly two tab-separated fields",
                       line_no);
    }
    const std::string_view image_token(line.data(), tab);
    const std::string_view annotation_token(line.data() + tab + 1,
                                            line.size() - tab - 1);
    if (image_token.empty() || annotation_token.empty()) {
      throw ParseError(path.string() + ": empty token", line_no);
    }
    pairs.push_back({resolve(file.images, image_token, "image"),
                     resolve(file.annotations, annotation_token, "annotation")});
  }
  if (in.bad()) {
    throw IoError("failed reading '" + path.string() + "'");
  }
  if (pairs.empty()) {
    throw ConfigError(path.string() + ": no pairs");
  }

  std::vector<Pair> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  file.pairs.reserve(pairs.size());
  std::vector<bool> taken(sorted.size(), false);
  for (const Pair& p : pairs) {
    const auto pos = static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), p) - sorted.begin());
    if (taken[pos]) {
      ++file.duplicates;
      continue;
    }
    taken[pos] = true;
    file.pairs.push_back(p);
  }
  return file;
}

Dataset to_dataset(const PairsFile& file) {
  return Dataset::from_pairs(file.images.size(), file.annotations.size(),
                             file.pairs);
}

void write_pairs(const fs::path& path, std::span<const Pair> pairs,
                 const Vocabulary& images, const Vocabulary& annotations) {
  std::string out;
  for (const Pair& p : pairs) {
    out += images.token(p.image);
    out += '\t';
    out += annotations.token(p.annotation);
    out += '\n';
  }
  write_text(path, out);
}

void write_vocabulary(const fs::path& path, const Vocabulary& vocab) {
  std::string out;
  for (const auto& t : vocab.tokens()) {
    out += t;
    out += '\n';
  }
  write_text(path, out);
}

Vocabulary load_vocabulary(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.find('\t') != std::string::npos) {
      throw ParseError(path.string() + ": invalid vocabulary token", line_no);
    }
    tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  if (spec.num_images < 1 || spec.num_annotations < 2) {
    throw ConfigError("synthetic data needs >= 1 image and >= 2 annotations");
  }
  if (spec.true_rank < 1) {
    throw ConfigError("true_rank must be at least 1");
  }
  if (spec.positives_per_image < 1 ||
      spec.positives_per_image >= spec.num_annotations) {
    throw ConfigError("positives_per_image must be in [1, num_annotations)");
  }
  if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) {
    throw ConfigError("noise must be in [0, 1]");
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  EmbeddingModel<double> truth(spec.num_images, spec.num_annotations,
                               spec.true_rank);
  truth.fill([&] { return normal(rng); });

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<Index> any(0, spec.num_annotations - 1);
  const auto top = static_cast<std::size_t>(spec.positives_per_image);

  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(spec.num_images) * top);
  std::vector<Index> order(static_cast<std::size_t>(spec.num_annotations));
  std::vector<char> chosen(order.size());
  for (Index i = 0; i < spec.num_images; ++i) {
    const Eigen::VectorXd scores =
      truth.annotation_factors() * truth.image(i).transpose();
    std::iota(order.begin(), order.end(), Index(0));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top),
                      order.end(), [&](Index a, Index b) {
                        return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                      });

    std::fill(chosen.begin(), chosen.end(), 0);
    std::vector<Index> kept;
    std::size_t swapped = 0;
    for (std::size_t j = 0; j < top; ++j) {
      if (coin(rng) < spec.noise) {
        ++swapped;
      } else {
        kept.push_back(order[j]);
        chosen[static_cast<std::size_t>(order[j])] = 1;
      }
    }
    // Replacements are uniform over everything not already chosen.
    while (swapped > 0) {
      const Index a = any(rng);
      if (chosen[static_cast<std::size_t>(a)]) {
        continue;
      }
      chosen[static_cast<std::size_t>(a)] = 1;
      kept.push_back(a);
      --swapped;
    }
    for (Index a : kept) {
      pairs.push_back({i, a});
    }
  }
  return {Dataset::from_pairs(spec.num_images, spec.num_annotations,
                              std::move(pairs)),
          std::move(truth)};
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string trial_log_csv(std::span<const EpochStats> epochs) {
  std::string out = "epoch,mean_trials,updates,skipped,wall_time_seconds\n";
  for (const auto& e : epochs) {
    out += std::to_string(e.epoch) + ',' + format_double(e.mean_trials) + ',' +
           std::to_string(e.updates) + ',' + std::to_string(e.skipped) + ',' +
           format_double(e.wall_time) + '\n';
  }
  return out;
}

void write_trial_log(const fs::path& path, std::span<const EpochStats> epochs) {
  for (std::size_t j = 1; j < epochs.size(); ++j) {
    if (epochs[j].epoch <= epochs[j - 1].epoch) {
      throw std::invalid_argument("trial log epochs must be strictly increasing");
    }
  }
  write_text(path, trial_log_csv(epochs));
}

std::string metrics_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["pre5"] = report.pre5;
  j["rec5"] = report.rec5;
  j["pre10"] = report.pre10;
  j["rec10"] = report.rec10;
  j["map"] = report.map;
  j["auc"] = report.auc;
  return j.dump() + "\n";
}

void write_metrics(const fs::path& path, const MetricsReport& report) {
  write_text(path, metrics_json(report));
}

void save_model(const fs::path& path, const EmbeddingModel<double>& model) {
  std::string out = "VSEENS 1 " + std::to_string(model.num_images()) + ' ' +
                    std::to_string(model.num_annotations()) + ' ' +
                    std::to_string(model.dim()) + '\n';
  char buf[64];
  auto emit = [&](const auto& matrix) {
    for (Index r = 0; r < matrix.rows(); ++r) {
      for (Index c = 0; c < matrix.cols(); ++c) {
        if (c > 0) out += ' ';
        const auto res = std::to_chars(buf, buf + sizeof(buf), matrix(r, c),
                                       std::chars_format::general, 17);
        out.append(buf, res.ptr);
      }
      out += '\n';
    }
  };
  emit(model.image_factors());
  emit(model.annotation_factors());
  write_text(path, out);
}

EmbeddingModel<double> load_model(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": missing checkpoint header", 1);
  }
  std::istringstream header(line);
  std::string magic;
  int version = 0;
  Index images = -1, annotations = -1, k = 0;
  if (!(header >> magic >> version >> images >> annotations >> k) ||
      magic != "VSEENS" || version != 1 || images < 0 || annotations < 0 || k < 1) {
    throw ParseError(path.string() + ": bad checkpoint header", 1);
  }

  using Matrix = EmbeddingModel<double>::Matrix;
  Matrix image_factors(images, k);
  Matrix annotation_factors(annotations, k);
  std::size_t line_no = 1;
  auto read_rows = [&](Matrix& m) {
    for (Index r = 0; r < m.rows(); ++r) {
      ++line_no;
      if (!std::getline(in, line)) {
        throw ParseError(path.string() + ": truncated checkpoint", line_no);
      }
      const char* p = line.data();
      const char* end = line.data() + line.size();
      for (Index c = 0; c < k; ++c) {
        while (p < end && *p == ' ') ++p;
        double v = 0.0;
        const auto res = std::from_chars(p, end, v);
        if (res.ec != std::errc{}) {
          throw ParseError(path.string() + ": bad number", line_no);
        }
        m(r, c) = v;
        p = res.ptr;
      }
      while (p < end && (*p == ' ' || *p == '\r')) ++p;
      if (p != end) {
        throw ParseError(path.string() + ": expected " + std::to_string(k) +
                           " values",
                         line_no);
      }
    }
  };
  read_rows(image_factors);
  read_rows(annotation_factors);
  return EmbeddingModel<double>(std::move(image_factors),
                                std::move(annotation_factors));
}

}  // namespace vseens
