// Copyright 2026 The ovlm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OVLM_EVAL_HPP_
#define OVLM_EVAL_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ovlm/completion.hpp"
#include "ovlm/corpus.hpp"

namespace ovlm {

enum class Scenario { Static, Dynamic, Maintenance };
const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

struct EvalReport {
  double entropy_bits_per_token = 0.0;
  double mrr = 0.0;
  double r_at_1 = 0.0;
  double r_at_10 = 0.0;
  double identifier_mrr = 0.0;
  double identifier_r_at_1 = 0.0;
  double identifier_r_at_10 = 0.0;
  std::size_t tokens_evaluated = 0;
  Scenario scenario = Scenario::Static;
};

struct ScenarioOptions {
  int k = 10;
  int beam_size = 50;  // 5 * k
  std::size_t mrr_max_tokens = 1000000;  // ranking metrics stop after this
  int adapt_unroll = 20;
  double adapt_lr = 0.0;  // 0: fall back to the model's learning rate
};

// Audit trail of scenario runs: Dynamic must predict a file before any
// gradient step on it.
struct OpEvent {
  enum Kind { Predict, Adapt } kind;
  std::string file;
};
using OperationLog = std::vector<OpEvent>;

// Entropy of one token in bits given the context: -log2 of the product of
// its unit probabilities, each conditioned on context_units plus the token's
// own preceding units.
double token_entropy(const GruLm& model, const std::string& token,
                     std::span<const int> context_units, const BpeModel& bpe);

// Mean token entropy in bits. Hidden state carried across each file and
// reset at file boundaries; files weighted by their token counts.
double corpus_entropy(const GruLm& model,
                      const std::vector<SegmentedFile>& files);

// Ranking metrics from per-position prediction lists and ground truths.
// Reciprocal rank is 0 when the truth is absent; identifier-only variants
// cover positions where identifier_mask is true. Throws Error("misaligned")
// on length mismatch.
EvalReport mrr_and_recall(const std::vector<CompletionList>& predictions,
                          const std::vector<std::string>& truths,
                          const std::vector<bool>& identifier_mask);

// Runs one scenario over the test corpus.
//   Static: the frozen model evaluates everything.
//   Dynamic: per project, each file is predicted and then adapted on; the
//     model reverts to the global one at project end.
//   Maintenance: each file is evaluated by the global model adapted for one
//     epoch on its project's other files.
// Entropy covers all tokens; ranking metrics cover at most the first
// options.mrr_max_tokens tokens in corpus order.
EvalReport run_scenario(Scenario scenario, const GruLm& model,
                        const Corpus& test, const BpeModel& bpe,
                        const ScenarioOptions& options,
                        OperationLog* log = nullptr);

struct BugPair {
  std::string id;
  TokenStream buggy;
  TokenStream fixed;
};

// Mean per-token entropy of the buggy snippet minus the fixed one, both
// under the same frozen model. Throws Error("bad-config") when a snippet
// prepares to zero tokens.
double bug_entropy_delta(const GruLm& model, const BpeModel& bpe,
                         const PrepConfig& prep, const BugPair& pair);

// Report serialization: key=value lines, scenario and provenance first.
std::string to_report_file(const EvalReport& report, const std::string& model,
                           int bpe_merges, const std::string& test_manifest);

}  // namespace ovlm

#endif  // OVLM_EVAL_HPP_
