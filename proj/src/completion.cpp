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

#include "ovlm/completion.hpp"

#include <algorithm>
#include <memory>
#include <queue>

#include "ovlm/error.hpp"

namespace ovlm {
namespace {

bool ends_with_marker(const std::string& s) {
  const std::string& m = kEndOfToken;
  return s.size() >= m.size() &&
         s.compare(s.size() - m.size(), m.size(), m) == 0;
}

// Partial derivation. The hidden state is materialized lazily: a candidate
// stores its parent's state plus the unit that led here, and advances only
// when popped for expansion. last_unit < 0 marks the root.
struct Candidate {
  double prob = 1.0;
  std::string text;  // concatenated units, markers included
  int len = 0;       // units consumed so far
  int last_unit = -1;
  std::shared_ptr<const HiddenState> parent_state;
};

struct CandidateWorse {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.prob != b.prob) return a.prob < b.prob;
    return a.text > b.text;  // max-heap pops the lexicographically smaller
  }
};

// Complete tokens found so far, capped at k, deduplicated by text keeping
// the best derivation. k is small, so linear scans are fine.
class BestTokens {
 public:
  explicit BestTokens(int k) : k_(static_cast<std::size_t>(k)) {}

  void insert(const std::string& text, double prob) {
    auto it = by_text_.find(text);
    if (it != by_text_.end()) {
      if (prob > it->second) it->second = prob;
      return;
    }
    by_text_.emplace(text, prob);
    if (by_text_.size() > k_) {
      auto worst_it = by_text_.begin();
      for (auto scan = std::next(by_text_.begin()); scan != by_text_.end();
           ++scan) {
        if (scan->second < worst_it->second ||
            (scan->second == worst_it->second &&
             scan->first > worst_it->first)) {
          worst_it = scan;
        }
      }
      by_text_.erase(worst_it);
    }
  }

  // Probability a new token must reach to matter; 0 until k are known.
  double threshold() const {
    if (by_text_.size() < k_) return 0.0;
    return worst()->second;
  }

  CompletionList sorted() const {
    CompletionList out;
    out.reserve(by_text_.size());
    for (const auto& [text, prob] : by_text_) out.push_back({text, prob});
    std::sort(out.begin(), out.end(), [](const Completion& a,
                                         const Completion& b) {
      if (a.probability != b.probability) return a.probability > b.probability;
      return a.token < b.token;
    });
    return out;
  }

 private:
  using Map = std::unordered_map<std::string, double>;

  Map::const_iterator worst() const {
    auto worst_it = by_text_.begin();
    for (auto it = std::next(by_text_.begin()); it != by_text_.end(); ++it) {
      if (it->second < worst_it->second ||
          (it->second == worst_it->second && it->first > worst_it->first)) {
        worst_it = it;
      }
    }
    return worst_it;
  }
  std::size_t k_;
  Map by_text_;
};

std::string strip_marker(const std::string& s) {
  return s.substr(0, s.size() - std::string(kEndOfToken).size());
}

}  // namespace

CompletionList predict_top_k(const GruLm& model, const HiddenState& state,
                             int k, int beam_size, int max_units) {
  if (k < 1 || beam_size < 1 || max_units < 1)
    throw Error("bad-config", "k, beam size and unit cap must be positive");
  const int vocab = static_cast<int>(model.vocab.units.size());

  std::priority_queue<Candidate, std::vector<Candidate>, CandidateWorse>
      candidates;
  BestTokens best(k);

  Candidate root;
  root.parent_state = std::make_shared<HiddenState>(state);
  candidates.push(std::move(root));

  while (!candidates.empty()) {
    if (best.threshold() > 0.0 && candidates.top().prob < best.threshold())
      break;  // no remaining candidate can beat the k-th complete token
    for (int popped = 0; popped < beam_size && !candidates.empty(); ++popped) {
      Candidate cand = candidates.top();
      candidates.pop();
      if (cand.prob < best.threshold()) continue;
      if (cand.len >= max_units) continue;

      std::shared_ptr<const HiddenState> cur;
      if (cand.last_unit < 0) {
        cur = cand.parent_state;
      } else {
        auto advanced = std::make_shared<HiddenState>(*cand.parent_state);
        advance_state(model.params, model.config, cand.last_unit, *advanced);
        cur = std::move(advanced);
      }
      const std::vector<double> probs = probs_from_state(model.params, *cur);

      const double thresh = best.threshold();
      for (int v = 0; v < vocab; ++v) {
        const double p = cand.prob * probs[v];
        if (p <= 0.0 || (thresh > 0.0 && p < thresh)) continue;
        const std::string& unit = model.vocab.units[v];
        if (ends_with_marker(unit)) {
          best.insert(strip_marker(cand.text + unit), p);
        } else {
          Candidate next;
          next.prob = p;
          next.text = cand.text + unit;
          next.len = cand.len + 1;
          next.last_unit = v;
          next.parent_state = cur;
          candidates.push(std::move(next));
        }
      }
    }
  }
  return best.sorted();
}

CompletionList predict_top_k(const GruLm& model,
                             std::span<const int> history_units, int k,
                             int beam_size, int max_units) {
  HiddenState h(model.config.hidden_dim, 0.0);
  for (int id : history_units)
    advance_state(model.params, model.config, id, h);
  return predict_top_k(model, h, k, beam_size, max_units);
}

void IdentifierCache::observe(const std::vector<std::string>& history,
                              const std::string& identifier) {
  if (history.size() != 5)
    throw Error("bad-config", "cache histories are exactly 5 tokens");
  auto& ids = entries_[key_of(history)];
  for (auto& [text, count] : ids) {
    if (text == identifier) {
      ++count;
      return;
    }
  }
  ids.emplace_back(identifier, 1);
}

const std::vector<std::pair<std::string, int>>* IdentifierCache::lookup(
    const std::vector<std::string>& history) const {
  if (history.size() != 5) return nullptr;
  auto it = entries_.find(key_of(history));
  return it == entries_.end() ? nullptr : &it->second;
}

std::string IdentifierCache::key_of(const std::vector<std::string>& history) {
  std::string key;
  for (const auto& tok : history) {
    key += tok;
    key += '\x1f';  // unit separator, cannot appear inside a token
  }
  return key;
}

CompletionList merge_cache_predictions(
    const CompletionList& beam,
    const std::vector<std::pair<std::string, double>>& cache_pred,
    double cache_weight, int k) {
  if (k < 1 || cache_weight < 0.0 || cache_weight > 1.0)
    throw Error("bad-config", "k must be positive, weight within [0, 1]");
  std::unordered_map<std::string, double> merged;
  for (const auto& c : beam)
    merged[c.token] += c.probability * (1.0 - cache_weight);
  for (const auto& [text, p] : cache_pred) merged[text] += p * cache_weight;

  CompletionList out;
  out.reserve(merged.size());
  for (const auto& [text, prob] : merged) out.push_back({text, prob});
  std::sort(out.begin(), out.end(),
            [](const Completion& a, const Completion& b) {
              if (a.probability != b.probability)
                return a.probability > b.probability;
              return a.token < b.token;
            });
  const std::size_t cap = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                10);
  if (out.size() > cap) out.resize(cap);
  return out;
}

CompletionList predict_with_cache(const GruLm& model, const BpeModel& bpe,
                                  const IdentifierCache& cache,
                                  const std::vector<std::string>& history,
                                  const HiddenState& state, int k,
                                  int beam_size, double cache_weight) {
  CompletionList beam = predict_top_k(model, state, k, beam_size);
  const auto* hit = cache.lookup(history);
  if (hit == nullptr || hit->empty()) return beam;

  // Score each cached identifier from the context state: the product of its
  // unit probabilities, then normalize across the cache hit.
  std::vector<std::pair<std::string, double>> cache_pred;
  cache_pred.reserve(hit->size());
  double total = 0.0;
  for (const auto& [text, count] : *hit) {
    (void)count;  // counts record recurrence; scoring is the model's job
    std::vector<std::string> units = segment(text, bpe);
    double p = 1.0;
    HiddenState h = state;
    for (const std::string& unit : units) {
      const int id = model.vocab.id_of(unit);
      p *= probs_from_state(model.params, h)[static_cast<std::size_t>(id)];
      advance_state(model.params, model.config, id, h);
    }
    total += p;
    cache_pred.emplace_back(text, p);
  }
  if (total > 0.0) {
    for (auto& [text, p] : cache_pred) p /= total;
  }
  return merge_cache_predictions(beam, cache_pred, cache_weight, k);
}

CompletionList predict_with_cache(const GruLm& model, const BpeModel& bpe,
                                  const IdentifierCache& cache,
                                  const std::vector<std::string>& history,
                                  std::span<const int> history_units, int k,
                                  int beam_size, double cache_weight) {
  HiddenState h(model.config.hidden_dim, 0.0);
  for (int id : history_units)
    advance_state(model.params, model.config, id, h);
  return predict_with_cache(model, bpe, cache, history, h, k, beam_size,
                            cache_weight);
}

GruLm adapt(const GruLm& base,
            const std::vector<std::vector<int>>& file_unit_streams,
            int adapt_unroll, double learning_rate) {
  if (adapt_unroll < 1 || learning_rate <= 0.0)
    throw Error("bad-config", "unroll and learning rate must be positive");
  GruLm model = base;
  Rng rng(model.config.seed);
  for (const auto& stream : file_unit_streams) {
    if (stream.size() < 2) continue;
    HiddenState h(model.config.hidden_dim, 0.0);
    const std::size_t last = stream.size() - 1;
    for (std::size_t pos = 0; pos < last;
         pos += static_cast<std::size_t>(adapt_unroll)) {
      const std::size_t t =
          std::min<std::size_t>(static_cast<std::size_t>(adapt_unroll),
                                last - pos);
      train_window_step(model.params, model.config,
                        std::span<const int>(stream.data() + pos, t + 1), h,
                        learning_rate, &rng);
    }
  }
  return model;
}

}  // namespace ovlm
