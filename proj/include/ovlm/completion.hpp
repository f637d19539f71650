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

#ifndef OVLM_COMPLETION_HPP_
#define OVLM_COMPLETION_HPP_

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ovlm/bpe.hpp"
#include "ovlm/nlm.hpp"

namespace ovlm {

// A trained model bundled with the unit vocabulary it predicts over.
struct GruLm {
  NlmConfig config;
  NlmParams params;
  UnitVocab vocab;
};

struct Completion {
  std::string token;   // complete token text (end marker stripped)
  double probability;  // product of its derivation's unit probabilities
};
using CompletionList = std::vector<Completion>;

// Complete-token beam search from the given context state. Keeps a
// candidates queue (partial unit sequences) and a bestTokens queue capped at
// k; each iteration expands the beam_size best candidates by one unit.
// Expansions ending in the end-of-token marker become complete tokens. Search
// stops once the best candidate's probability falls below the k-th best
// complete token's, or when candidates run out; candidates longer than
// max_units are dropped. Duplicate token texts keep their best derivation.
// Results are ordered by probability descending, ties lexicographic
// ascending.
CompletionList predict_top_k(const GruLm& model, const HiddenState& state,
                             int k, int beam_size, int max_units = 12);

// Convenience wrapper: consumes history_units from a zero state first.
CompletionList predict_top_k(const GruLm& model,
                             std::span<const int> history_units, int k,
                             int beam_size, int max_units = 12);

// Maps exact 5-token histories to the identifiers that followed them.
// Entries keep first-seen order with occurrence counts.
class IdentifierCache {
 public:
  // Throws Error("bad-config") unless history has exactly 5 tokens.
  void observe(const std::vector<std::string>& history,
               const std::string& identifier);

  // Null when the history was never observed.
  const std::vector<std::pair<std::string, int>>* lookup(
      const std::vector<std::string>& history) const;

  std::size_t size() const { return entries_.size(); }

 private:
  static std::string key_of(const std::vector<std::string>& history);
  std::unordered_map<std::string, std::vector<std::pair<std::string, int>>>
      entries_;
};

// Convex combination of a beam completion list and a normalized cache
// distribution: merged[t] = beam[t] * (1 - w) + cache[t] * w over the union
// of supports, ranked as in predict_top_k, truncated to min(k, 10).
CompletionList merge_cache_predictions(
    const CompletionList& beam,
    const std::vector<std::pair<std::string, double>>& cache_pred,
    double cache_weight, int k);

// Beam predictions blended with cached identifiers for the current 5-token
// history. Cached identifiers are scored by the model from the context state
// (probability of their unit sequence), normalized to sum to 1, then merged.
// A cache miss returns the plain beam result.
CompletionList predict_with_cache(const GruLm& model, const BpeModel& bpe,
                                  const IdentifierCache& cache,
                                  const std::vector<std::string>& history,
                                  const HiddenState& state, int k,
                                  int beam_size, double cache_weight);

// Same, consuming history_units from a zero state first.
CompletionList predict_with_cache(const GruLm& model, const BpeModel& bpe,
                                  const IdentifierCache& cache,
                                  const std::vector<std::string>& history,
                                  std::span<const int> history_units, int k,
                                  int beam_size, double cache_weight);

// One adaptation pass: for each file stream, a single SGD step per
// contiguous window of adapt_unroll units (state carried within the file,
// reset between files). Returns an adapted copy; the base model is untouched.
GruLm adapt(const GruLm& base,
            const std::vector<std::vector<int>>& file_unit_streams,
            int adapt_unroll = 20, double learning_rate = 0.1);

}  // namespace ovlm

#endif  // OVLM_COMPLETION_HPP_
