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

#ifndef OVLM_NLM_HPP_
#define OVLM_NLM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ovlm/bpe.hpp"
#include "ovlm/mat.hpp"
#include "ovlm/util.hpp"

namespace ovlm {

struct NlmConfig {
  int vocab_size = 0;
  int embed_dim = 128;
  int hidden_dim = 128;
  double dropout_rate = 0.5;    // on embedding output and pre-projection
  double learning_rate = 0.1;   // plain SGD
  int batch_size = 32;
  int unroll_len = 200;         // truncated BPTT length
  int max_epochs = 50;
  int max_lr_halvings = 4;
  double grad_clip = 5.0;       // global norm
  std::uint64_t seed = 1;

  // Throws Error("bad-config") unless dims are positive and dropout_rate is
  // in [0, 1).
  void validate() const;
};

// Single-layer GRU language model over subword units:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   hc = tanh(Wh x + Uh (r . h) + bh)
//   h' = (1 - z) . h + z . hc
// with a tied pipeline: embedding lookup -> GRU -> output projection.
struct NlmParams {
  MatF embedding;        // vocab x embed
  MatF wz, uz, bz;       // embed x hidden, hidden x hidden, 1 x hidden
  MatF wr, ur, br;
  MatF wh, uh, bh;
  MatF w_out;            // hidden x vocab
  MatF b_out;            // 1 x vocab

  // Serialization order; also the initialization draw order.
  std::vector<MatF*> ordered();
  std::vector<const MatF*> ordered() const;
};

// Gradients mirror the parameters at double precision.
struct NlmGrads {
  MatD embedding, wz, uz, bz, wr, ur, br, wh, uh, bh, w_out, b_out;

  explicit NlmGrads(const NlmConfig& config);
  std::vector<MatD*> ordered();
  void zero();
  double global_norm() const;
};

using HiddenState = std::vector<double>;  // size hidden_dim

// Uniform [-0.05, 0.05] weights, zero biases, from the seeded generator.
// Throws Error("empty-vocab") when vocab_size < 1.
NlmParams init_model(const NlmConfig& config);

// Distribution over the next unit given the current state (softmax of the
// output projection). Deterministic; sums to one.
std::vector<double> probs_from_state(const NlmParams& params,
                                     const HiddenState& state);

// Consumes one unit: state <- GRU(embed(unit_id), state). Throws
// Error("bad-id") for ids outside [0, vocab_size).
void advance_state(const NlmParams& params, const NlmConfig& config,
                   int unit_id, HiddenState& state);

// advance_state + probs_from_state. train_mode applies inverted dropout with
// masks drawn from rng (required then); eval mode is deterministic.
std::vector<double> forward_step(const NlmParams& params,
                                 const NlmConfig& config, int unit_id,
                                 HiddenState& state, bool train_mode = false,
                                 Rng* rng = nullptr);

// Mean negative log likelihood (nats) of predicting units[t+1] from
// units[0..t], plus parameter gradients from truncated BPTT over windows of
// at most unroll_len steps (state carried, gradients stop at window edges).
// Eval mode: no dropout, deterministic. Requires at least 2 units.
std::pair<double, NlmGrads> loss_and_grads(const NlmParams& params,
                                           const NlmConfig& config,
                                           std::span<const int> unit_ids);

// Per-position NLLs (nats) for targets units[1..]; state carried in/out.
// Evaluation mode.
std::vector<double> sequence_nlls(const NlmParams& params,
                                  const NlmConfig& config,
                                  std::span<const int> unit_ids,
                                  HiddenState& state);

// One truncated-BPTT SGD step (batch 1) over window (inputs window[0..n-2],
// targets window[1..]); clips at config.grad_clip, updates params in place,
// advances state past the window inputs. Dropout active when rng is given.
// Returns the window's mean NLL in nats.
double train_window_step(NlmParams& params, const NlmConfig& config,
                         std::span<const int> window, HiddenState& state,
                         double learning_rate, Rng* rng);

// Halve-on-degradation learning-rate schedule: an epoch whose validation
// entropy fails to improve on the previous epoch halves the rate, at most
// max_halvings times; the next degradation after that stops training.
struct LrSchedule {
  double lr;
  int max_halvings;
  int halvings = 0;
  bool first = true;
  double prev = 0.0;

  LrSchedule(double initial_lr, int max_h)
      : lr(initial_lr), max_halvings(max_h) {}

  // Feeds one epoch's validation entropy; false means stop training.
  bool observe(double val_entropy);
};

struct TrainResult {
  NlmParams params;                      // epoch with best validation entropy
  std::vector<double> val_entropy_bits;  // one entry per completed epoch
  std::vector<double> lr_used;           // rate in effect during each epoch
  int best_epoch = -1;
};

// Full training run: the unit stream is split into batch_size contiguous
// lanes, hidden state carries across windows within an epoch and resets at
// epoch start. Same seed, same data: identical history.
TrainResult train(const NlmParams& start, const NlmConfig& config,
                  std::span<const int> train_units,
                  std::span<const int> valid_units);

// ".nlm" checkpoints: "key=value" text header (format_version, vocab_size,
// embed_dim, hidden_dim, vocab_sha256, seed), a blank line, then the
// parameters as little-endian float32 in NlmParams::ordered() order.
struct Checkpoint {
  NlmParams params;
  NlmConfig config;  // dims and seed; training knobs keep their defaults
  std::string vocab_sha256;
};

void save_checkpoint(const std::string& path, const NlmParams& params,
                     const NlmConfig& config, const std::string& vocab_sha256);
// Throws Error("bad-version") for unknown format versions, Error("corrupt")
// for truncated or malformed files, and Error("vocab-mismatch") when
// expect_vocab_sha256 is non-empty and differs from the stored hash.
Checkpoint load_checkpoint(const std::string& path,
                           const std::string& expect_vocab_sha256 = "");

}  // namespace ovlm

#endif  // OVLM_NLM_HPP_
