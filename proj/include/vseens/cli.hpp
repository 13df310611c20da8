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

#pragma once

#include <vseens/dataset.hpp>
#include <vseens/training.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace vseens {

struct BenchRow {
  Method method = Method::VseEns;
  EpochStats stats;
};

// Trains every method from the same seed and schedule, one row per
// (method, epoch).
std::vector<BenchRow> run_bench(const Dataset& dataset, const TrainConfig& base,
                                int epochs);

// Header: method,epoch,mean_trials,ns_per_draw,updates,skipped,wall_time_seconds
std::string bench_csv(const std::vector<BenchRow>& rows);

namespace cli {

// Exit codes: 0 success, 1 I/O failure, 2 configuration or parse error.
inline constexpr int kOk = 0;
inline constexpr int kIoError = 1;
inline constexpr int kConfigError = 2;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace vseens
