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

#include "ovlm/nlm.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "ovlm/error.hpp"
#include "ovlm/textio.hpp"

namespace ovlm {

void addmm(MatD& y, const MatD& x, const MatF& w) {
  for (int b = 0; b < x.rows; ++b) {
    const double* xr = x.row(b);
    double* yr = y.row(b);
    for (int e = 0; e < x.cols; ++e) {
      double xv = xr[e];
      if (xv == 0.0) continue;
      const float* wr = w.row(e);
      for (int h = 0; h < w.cols; ++h) yr[h] += xv * wr[h];
    }
  }
}

void add_at_b(MatD& dw, const MatD& x, const MatD& dy) {
  for (int b = 0; b < x.rows; ++b) {
    const double* xr = x.row(b);
    const double* dyr = dy.row(b);
    for (int e = 0; e < x.cols; ++e) {
      double xv = xr[e];
      if (xv == 0.0) continue;
      double* dwr = dw.row(e);
      for (int h = 0; h < dy.cols; ++h) dwr[h] += xv * dyr[h];
    }
  }
}

void add_bt(MatD& dx, const MatD& dy, const MatF& w) {
  for (int b = 0; b < dx.rows; ++b) {
    const double* dyr = dy.row(b);
    double* dxr = dx.row(b);
    for (int e = 0; e < dx.cols; ++e) {
      const float* wr = w.row(e);
      double sum = 0.0;
      for (int h = 0; h < dy.cols; ++h) sum += dyr[h] * wr[h];
      dxr[e] += sum;
    }
  }
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void add_bias(MatD& y, const MatF& bias) {
  for (int b = 0; b < y.rows; ++b) {
    double* yr = y.row(b);
    const float* br = bias.row(0);
    for (int h = 0; h < y.cols; ++h) yr[h] += br[h];
  }
}

// Softmax over one row of logits; returns -ln p[target] and, when dlogits is
// non-null, writes scale * (p - onehot(target)) into it.
double softmax_nll_row(double* logits, int n, int target, double* dlogits,
                       double scale) {
  double mx = logits[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    logits[i] = std::exp(logits[i] - mx);
    sum += logits[i];
  }
  double inv = 1.0 / sum;
  double pt = logits[target] * inv;
  if (dlogits) {
    for (int i = 0; i < n; ++i) {
      dlogits[i] = scale * (logits[i] * inv - (i == target ? 1.0 : 0.0));
    }
  }
  return -std::log(std::max(pt, 1e-300));
}

struct StepCache {
  std::vector<int> ids;          // B inputs
  MatD x, mask_x;                // B x E
  MatD h_prev, z, r, c, d_o, mask_o;  // B x H
};

void draw_mask(MatD& mask, double p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double keep = 1.0 - p;
  for (auto& m : mask.v) m = u(rng) < keep ? 1.0 / keep : 0.0;
}

// T GRU steps over a B-lane window; ids is row-major B x (T+1). Returns the
// summed NLL over the B*T predictions. State h advances past the window.
// With grads, accumulates BPTT gradients using dlogits scaled by `scale`;
// with rng, applies inverted dropout.
double run_window(const NlmParams& p, const NlmConfig& cfg,
                  const std::vector<int>& ids, int B, int T, MatD& h,
                  Rng* rng, NlmGrads* grads, double scale) {
  const int E = cfg.embed_dim;
  const int H = cfg.hidden_dim;
  const int V = cfg.vocab_size;
  const bool drop = rng != nullptr && cfg.dropout_rate > 0.0;

  std::vector<StepCache> steps(static_cast<std::size_t>(T));
  MatD logits(B, V);
  MatD dlogits;
  if (grads) dlogits.resize(B, V);
  MatD o(B, H);
  double nll = 0.0;

  for (int t = 0; t < T; ++t) {
    StepCache& s = steps[static_cast<std::size_t>(t)];
    s.ids.resize(static_cast<std::size_t>(B));
    s.x.resize(B, E);
    s.h_prev = h;
    s.z.resize(B, H);
    s.r.resize(B, H);
    s.c.resize(B, H);

    for (int b = 0; b < B; ++b) {
      int id = ids[static_cast<std::size_t>(b) * (T + 1) + t];
      if (id < 0 || id >= V) throw Error("bad-id", "unit id out of range");
      s.ids[static_cast<std::size_t>(b)] = id;
      const float* er = p.embedding.row(id);
      double* xr = s.x.row(b);
      for (int e = 0; e < E; ++e) xr[e] = er[e];
    }
    if (drop) {
      s.mask_x.resize(B, E);
      draw_mask(s.mask_x, cfg.dropout_rate, *rng);
      for (std::size_t i = 0; i < s.x.size(); ++i) s.x.v[i] *= s.mask_x.v[i];
    }

    // Gate pre-activations share the x/h inputs.
    s.z.zero();
    addmm(s.z, s.x, p.wz);
    addmm(s.z, s.h_prev, p.uz);
    add_bias(s.z, p.bz);
    s.r.zero();
    addmm(s.r, s.x, p.wr);
    addmm(s.r, s.h_prev, p.ur);
    add_bias(s.r, p.br);
    for (std::size_t i = 0; i < s.z.size(); ++i) s.z.v[i] = sigmoid(s.z.v[i]);
    for (std::size_t i = 0; i < s.r.size(); ++i) s.r.v[i] = sigmoid(s.r.v[i]);

    MatD rh(B, H);
    for (std::size_t i = 0; i < rh.size(); ++i) {
      rh.v[i] = s.r.v[i] * s.h_prev.v[i];
    }
    s.c.zero();
    addmm(s.c, s.x, p.wh);
    addmm(s.c, rh, p.uh);
    add_bias(s.c, p.bh);
    for (std::size_t i = 0; i < s.c.size(); ++i) s.c.v[i] = std::tanh(s.c.v[i]);

    for (std::size_t i = 0; i < h.size(); ++i) {
      h.v[i] = (1.0 - s.z.v[i]) * s.h_prev.v[i] + s.z.v[i] * s.c.v[i];
    }

    if (drop) {
      s.mask_o.resize(B, H);
      draw_mask(s.mask_o, cfg.dropout_rate, *rng);
      for (std::size_t i = 0; i < o.size(); ++i) o.v[i] = h.v[i] * s.mask_o.v[i];
    } else {
      o = h;
    }

    logits.zero();
    addmm(logits, o, p.w_out);
    add_bias(logits, p.b_out);
    for (int b = 0; b < B; ++b) {
      int target = ids[static_cast<std::size_t>(b) * (T + 1) + t + 1];
      if (target < 0 || target >= V) throw Error("bad-id", "target id");
      nll += softmax_nll_row(logits.row(b), V, target,
                             grads ? dlogits.row(b) : nullptr, scale);
    }

    if (grads) {
      // The output layer is position-local, so its gradient and the
      // backpropagated d_o are settled during the forward pass; only the
      // recurrent part needs the reverse sweep.
      add_at_b(grads->w_out, o, dlogits);
      for (int b = 0; b < B; ++b) {
        const double* dr = dlogits.row(b);
        double* gb = grads->b_out.row(0);
        for (int v = 0; v < V; ++v) gb[v] += dr[v];
      }
      s.d_o.resize(B, H);
      add_bt(s.d_o, dlogits, p.w_out);
    }
  }

  if (!grads) return nll;

  MatD dh_next(B, H);
  MatD dh(B, H), dz(B, H), dc(B, H), da(B, H), d_rh(B, H), dr(B, H);
  MatD dx(B, E);
  for (int t = T - 1; t >= 0; --t) {
    StepCache& s = steps[static_cast<std::size_t>(t)];
    // dh: gradient w.r.t. this step's new hidden state.
    for (std::size_t i = 0; i < dh.size(); ++i) {
      double g = s.d_o.v[i];
      if (drop) g *= s.mask_o.v[i];
      dh.v[i] = g + dh_next.v[i];
    }
    for (std::size_t i = 0; i < dh.size(); ++i) {
      dz.v[i] = dh.v[i] * (s.c.v[i] - s.h_prev.v[i]);
      dc.v[i] = dh.v[i] * s.z.v[i];
      dh_next.v[i] = dh.v[i] * (1.0 - s.z.v[i]);  // toward h_prev
    }
    dx.zero();

    // candidate: c = tanh(a_c)
    for (std::size_t i = 0; i < da.size(); ++i) {
      da.v[i] = dc.v[i] * (1.0 - s.c.v[i] * s.c.v[i]);
    }
    add_at_b(grads->wh, s.x, da);
    for (int b = 0; b < B; ++b) {
      const double* dar = da.row(b);
      double* gb = grads->bh.row(0);
      for (int i = 0; i < H; ++i) gb[i] += dar[i];
    }
    MatD rh(B, H);
    for (std::size_t i = 0; i < rh.size(); ++i) {
      rh.v[i] = s.r.v[i] * s.h_prev.v[i];
    }
    add_at_b(grads->uh, rh, da);
    d_rh.zero();
    add_bt(d_rh, da, p.uh);
    for (std::size_t i = 0; i < d_rh.size(); ++i) {
      dr.v[i] = d_rh.v[i] * s.h_prev.v[i];
      dh_next.v[i] += d_rh.v[i] * s.r.v[i];
    }
    add_bt(dx, da, p.wh);

    // update gate: z = sigmoid(a_z)
    for (std::size_t i = 0; i < da.size(); ++i) {
      da.v[i] = dz.v[i] * s.z.v[i] * (1.0 - s.z.v[i]);
    }
    add_at_b(grads->wz, s.x, da);
    add_at_b(grads->uz, s.h_prev, da);
    for (int b = 0; b < B; ++b) {
      const double* dar = da.row(b);
      double* gb = grads->bz.row(0);
      for (int i = 0; i < H; ++i) gb[i] += dar[i];
    }
    add_bt(dx, da, p.wz);
    add_bt(dh_next, da, p.uz);

    // reset gate: r = sigmoid(a_r)
    for (std::size_t i = 0; i < da.size(); ++i) {
      da.v[i] = dr.v[i] * s.r.v[i] * (1.0 - s.r.v[i]);
    }
    add_at_b(grads->wr, s.x, da);
    add_at_b(grads->ur, s.h_prev, da);
    for (int b = 0; b < B; ++b) {
      const double* dar = da.row(b);
      double* gb = grads->br.row(0);
      for (int i = 0; i < H; ++i) gb[i] += dar[i];
    }
    add_bt(dx, da, p.wr);
    add_bt(dh_next, da, p.ur);

    if (drop) {
      for (std::size_t i = 0; i < dx.size(); ++i) dx.v[i] *= s.mask_x.v[i];
    }
    for (int b = 0; b < B; ++b) {
      double* ge = grads->embedding.row(s.ids[static_cast<std::size_t>(b)]);
      const double* dxr = dx.row(b);
      for (int e = 0; e < E; ++e) ge[e] += dxr[e];
    }
  }
  return nll;
}

void clip_and_apply(NlmParams& params, NlmGrads& grads, double clip,
                    double lr) {
  double norm = grads.global_norm();
  double scale = (clip > 0.0 && norm > clip) ? clip / norm : 1.0;
  double step = lr * scale;
  auto ps = params.ordered();
  auto gs = grads.ordered();
  for (std::size_t m = 0; m < ps.size(); ++m) {
    MatF& p = *ps[m];
    const MatD& g = *gs[m];
    for (std::size_t i = 0; i < p.v.size(); ++i) {
      p.v[i] = static_cast<float>(static_cast<double>(p.v[i]) -
                                  step * g.v[i]);
    }
  }
}

}  // namespace

void NlmConfig::validate() const {
  if (vocab_size < 1) throw Error("empty-vocab", "vocab_size must be >= 1");
  if (embed_dim < 1 || hidden_dim < 1) {
    throw Error("bad-config", "dims must be positive");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw Error("bad-config", "dropout_rate must be in [0, 1)");
  }
  if (batch_size < 1 || unroll_len < 1 || max_epochs < 1 ||
      max_lr_halvings < 0 || learning_rate <= 0.0) {
    throw Error("bad-config", "bad training hyperparameters");
  }
}

std::vector<MatF*> NlmParams::ordered() {
  return {&embedding, &wz, &uz, &bz, &wr, &ur, &br,
          &wh, &uh, &bh, &w_out, &b_out};
}

std::vector<const MatF*> NlmParams::ordered() const {
  return {&embedding, &wz, &uz, &bz, &wr, &ur, &br,
          &wh, &uh, &bh, &w_out, &b_out};
}

NlmGrads::NlmGrads(const NlmConfig& c)
    : embedding(c.vocab_size, c.embed_dim),
      wz(c.embed_dim, c.hidden_dim),
      uz(c.hidden_dim, c.hidden_dim),
      bz(1, c.hidden_dim),
      wr(c.embed_dim, c.hidden_dim),
      ur(c.hidden_dim, c.hidden_dim),
      br(1, c.hidden_dim),
      wh(c.embed_dim, c.hidden_dim),
      uh(c.hidden_dim, c.hidden_dim),
      bh(1, c.hidden_dim),
      w_out(c.hidden_dim, c.vocab_size),
      b_out(1, c.vocab_size) {}

std::vector<MatD*> NlmGrads::ordered() {
  return {&embedding, &wz, &uz, &bz, &wr, &ur, &br,
          &wh, &uh, &bh, &w_out, &b_out};
}

void NlmGrads::zero() {
  for (MatD* m : ordered()) m->zero();
}

double NlmGrads::global_norm() const {
  double sum = 0.0;
  for (const MatD* m : const_cast<NlmGrads*>(this)->ordered()) {
    for (double v : m->v) sum += v * v;
  }
  return std::sqrt(sum);
}

NlmParams init_model(const NlmConfig& config) {
  config.validate();
  NlmParams p;
  p.embedding.resize(config.vocab_size, config.embed_dim);
  p.wz.resize(config.embed_dim, config.hidden_dim);
  p.uz.resize(config.hidden_dim, config.hidden_dim);
  p.bz.resize(1, config.hidden_dim);
  p.wr.resize(config.embed_dim, config.hidden_dim);
  p.ur.resize(config.hidden_dim, config.hidden_dim);
  p.br.resize(1, config.hidden_dim);
  p.wh.resize(config.embed_dim, config.hidden_dim);
  p.uh.resize(config.hidden_dim, config.hidden_dim);
  p.bh.resize(1, config.hidden_dim);
  p.w_out.resize(config.hidden_dim, config.vocab_size);
  p.b_out.resize(1, config.vocab_size);

  Rng rng(config.seed);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  const MatF* biases[] = {&p.bz, &p.br, &p.bh, &p.b_out};
  for (MatF* m : p.ordered()) {
    bool is_bias = false;
    for (const MatF* b : biases) is_bias = is_bias || b == m;
    if (is_bias) continue;  // biases start at zero
    for (float& w : m->v) w = static_cast<float>(u(rng));
  }
  return p;
}

std::vector<double> probs_from_state(const NlmParams& params,
                                     const HiddenState& state) {
  const int H = params.w_out.rows;
  const int V = params.w_out.cols;
  std::vector<double> logits(static_cast<std::size_t>(V));
  for (int v = 0; v < V; ++v) logits[static_cast<std::size_t>(v)] =
      params.b_out.row(0)[v];
  for (int h = 0; h < H; ++h) {
    double hv = state[static_cast<std::size_t>(h)];
    if (hv == 0.0) continue;
    const float* wr = params.w_out.row(h);
    for (int v = 0; v < V; ++v) logits[static_cast<std::size_t>(v)] +=
        hv * wr[v];
  }
  double mx = logits[0];
  for (double l : logits) mx = std::max(mx, l);
  double sum = 0.0;
  for (double& l : logits) {
    l = std::exp(l - mx);
    sum += l;
  }
  for (double& l : logits) l /= sum;
  return logits;
}

namespace {

// One GRU step for a single row; x is the (possibly dropout-scaled)
// embedding vector of the consumed unit.
void gru_step_row(const NlmParams& params, const NlmConfig& config,
                  const double* x, HiddenState& state) {
  const int E = config.embed_dim;
  const int H = config.hidden_dim;
  if (state.empty()) state.assign(static_cast<std::size_t>(H), 0.0);

  std::vector<double> az(params.bz.row(0), params.bz.row(0) + H);
  std::vector<double> ar(params.br.row(0), params.br.row(0) + H);
  std::vector<double> ac(params.bh.row(0), params.bh.row(0) + H);
  for (int e = 0; e < E; ++e) {
    double xv = x[e];
    if (xv == 0.0) continue;
    const float* wz = params.wz.row(e);
    const float* wr = params.wr.row(e);
    const float* wh = params.wh.row(e);
    for (int h = 0; h < H; ++h) {
      az[static_cast<std::size_t>(h)] += xv * wz[h];
      ar[static_cast<std::size_t>(h)] += xv * wr[h];
      ac[static_cast<std::size_t>(h)] += xv * wh[h];
    }
  }
  for (int i = 0; i < H; ++i) {
    double hv = state[static_cast<std::size_t>(i)];
    if (hv == 0.0) continue;
    const float* uz = params.uz.row(i);
    const float* ur = params.ur.row(i);
    for (int h = 0; h < H; ++h) {
      az[static_cast<std::size_t>(h)] += hv * uz[h];
      ar[static_cast<std::size_t>(h)] += hv * ur[h];
    }
  }
  std::vector<double> z(static_cast<std::size_t>(H));
  std::vector<double> rh(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h) {
    z[static_cast<std::size_t>(h)] = sigmoid(az[static_cast<std::size_t>(h)]);
    rh[static_cast<std::size_t>(h)] =
        sigmoid(ar[static_cast<std::size_t>(h)]) *
        state[static_cast<std::size_t>(h)];
  }
  for (int i = 0; i < H; ++i) {
    double rhv = rh[static_cast<std::size_t>(i)];
    if (rhv == 0.0) continue;
    const float* uh = params.uh.row(i);
    for (int h = 0; h < H; ++h) ac[static_cast<std::size_t>(h)] += rhv * uh[h];
  }
  for (int h = 0; h < H; ++h) {
    double c = std::tanh(ac[static_cast<std::size_t>(h)]);
    double zv = z[static_cast<std::size_t>(h)];
    state[static_cast<std::size_t>(h)] =
        (1.0 - zv) * state[static_cast<std::size_t>(h)] + zv * c;
  }
}

}  // namespace

void advance_state(const NlmParams& params, const NlmConfig& config,
                   int unit_id, HiddenState& state) {
  if (unit_id < 0 || unit_id >= config.vocab_size) {
    throw Error("bad-id", "unit id out of range");
  }
  const float* er = params.embedding.row(unit_id);
  std::vector<double> x(er, er + config.embed_dim);
  gru_step_row(params, config, x.data(), state);
}

std::vector<double> forward_step(const NlmParams& params,
                                 const NlmConfig& config, int unit_id,
                                 HiddenState& state, bool train_mode,
                                 Rng* rng) {
  if (!train_mode) {
    advance_state(params, config, unit_id, state);
    return probs_from_state(params, state);
  }
  if (rng == nullptr) {
    throw Error("bad-config", "train_mode forward requires an RNG");
  }
  if (unit_id < 0 || unit_id >= config.vocab_size) {
    throw Error("bad-id", "unit id out of range");
  }
  // Inverted dropout on the embedding output and on the pre-projection
  // hidden; the carried state itself is not dropped.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double keep = 1.0 - config.dropout_rate;
  const float* er = params.embedding.row(unit_id);
  std::vector<double> x(er, er + config.embed_dim);
  for (double& v : x) v = u(*rng) < keep ? v / keep : 0.0;
  gru_step_row(params, config, x.data(), state);
  HiddenState dropped = state;
  for (double& v : dropped) v = u(*rng) < keep ? v / keep : 0.0;
  return probs_from_state(params, dropped);
}

std::pair<double, NlmGrads> loss_and_grads(const NlmParams& params,
                                           const NlmConfig& config,
                                           std::span<const int> unit_ids) {
  config.validate();
  if (unit_ids.size() < 2) {
    throw Error("bad-config", "need at least 2 units for a prediction");
  }
  NlmGrads grads(config);
  const std::size_t total = unit_ids.size() - 1;
  double scale = 1.0 / static_cast<double>(total);
  MatD h(1, config.hidden_dim);
  double nll = 0.0;
  std::vector<int> ids;
  for (std::size_t start = 0; start + 1 < unit_ids.size();
       start += static_cast<std::size_t>(config.unroll_len)) {
    int T = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(config.unroll_len),
                              unit_ids.size() - 1 - start));
    ids.assign(unit_ids.begin() + static_cast<std::ptrdiff_t>(start),
               unit_ids.begin() + static_cast<std::ptrdiff_t>(start + T + 1));
    nll += run_window(params, config, ids, 1, T, h, nullptr, &grads, scale);
  }
  return {nll * scale, std::move(grads)};
}

std::vector<double> sequence_nlls(const NlmParams& params,
                                  const NlmConfig& config,
                                  std::span<const int> unit_ids,
                                  HiddenState& state) {
  if (state.empty()) {
    state.assign(static_cast<std::size_t>(config.hidden_dim), 0.0);
  }
  std::vector<double> nlls;
  if (unit_ids.size() < 2) return nlls;
  nlls.reserve(unit_ids.size() - 1);
  for (std::size_t i = 0; i + 1 < unit_ids.size(); ++i) {
    advance_state(params, config, unit_ids[i], state);
    std::vector<double> probs = probs_from_state(params, state);
    double p = probs[static_cast<std::size_t>(unit_ids[i + 1])];
    nlls.push_back(-std::log(std::max(p, 1e-300)));
  }
  return nlls;
}

double train_window_step(NlmParams& params, const NlmConfig& config,
                         std::span<const int> window, HiddenState& state,
                         double learning_rate, Rng* rng) {
  if (window.size() < 2) {
    throw Error("bad-config", "window needs at least 2 units");
  }
  const int H = config.hidden_dim;
  MatD h(1, H);
  if (!state.empty()) {
    for (int i = 0; i < H; ++i) {
      h.v[static_cast<std::size_t>(i)] = state[static_cast<std::size_t>(i)];
    }
  }
  int T = static_cast<int>(window.size()) - 1;
  std::vector<int> ids(window.begin(), window.end());
  NlmGrads grads(config);
  double nll = run_window(params, config, ids, 1, T, h, rng, &grads,
                          1.0 / static_cast<double>(T));
  clip_and_apply(params, grads, config.grad_clip, learning_rate);
  state.assign(h.v.begin(), h.v.end());
  return nll / static_cast<double>(T);
}

bool LrSchedule::observe(double val_entropy) {
  if (first) {
    first = false;
    prev = val_entropy;
    return true;
  }
  // Only a strict increase counts as a degradation; an equal value
  // continues at the current rate.
  if (val_entropy <= prev) {
    prev = val_entropy;
    return true;
  }
  if (halvings >= max_halvings) return false;
  lr /= 2.0;
  ++halvings;
  prev = val_entropy;
  return true;
}

TrainResult train(const NlmParams& start, const NlmConfig& config,
                  std::span<const int> train_units,
                  std::span<const int> valid_units) {
  config.validate();
  if (train_units.size() < 2 || valid_units.size() < 2) {
    throw Error("bad-config", "train and valid streams need >= 2 units");
  }

  const std::size_t L = train_units.size();
  int B = std::min<int>(config.batch_size, static_cast<int>(L / 2));
  if (B < 1) B = 1;
  const std::size_t lane_len = L / static_cast<std::size_t>(B);
  const int H = config.hidden_dim;

  TrainResult result;
  result.params = start;
  Rng rng(config.seed);
  LrSchedule sched(config.learning_rate, config.max_lr_halvings);
  NlmGrads grads(config);
  MatD h(B, H);
  std::vector<int> ids;
  double best_val = std::numeric_limits<double>::infinity();
  NlmParams best = start;
  int best_epoch = -1;
  const double ln2 = std::log(2.0);

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    h.zero();
    for (std::size_t pos = 0; pos + 1 < lane_len;
         pos += static_cast<std::size_t>(config.unroll_len)) {
      int T = static_cast<int>(
          std::min<std::size_t>(static_cast<std::size_t>(config.unroll_len),
                                lane_len - 1 - pos));
      ids.resize(static_cast<std::size_t>(B) * (T + 1));
      for (int b = 0; b < B; ++b) {
        const int* lane =
            train_units.data() + static_cast<std::size_t>(b) * lane_len + pos;
        for (int t = 0; t <= T; ++t) {
          ids[static_cast<std::size_t>(b) * (T + 1) + t] = lane[t];
        }
      }
      grads.zero();
      run_window(result.params, config, ids, B, T, h, &rng, &grads,
                 1.0 / static_cast<double>(B * T));
      clip_and_apply(result.params, grads, config.grad_clip, sched.lr);
    }

    HiddenState vh;
    std::vector<double> nlls =
        sequence_nlls(result.params, config, valid_units, vh);
    double sum = 0.0;
    for (double n : nlls) sum += n;
    double val_bits = sum / (static_cast<double>(nlls.size()) * ln2);

    result.lr_used.push_back(sched.lr);
    result.val_entropy_bits.push_back(val_bits);
    if (val_bits < best_val) {
      best_val = val_bits;
      best = result.params;
      best_epoch = epoch;
    }
    if (!sched.observe(val_bits)) break;
  }

  result.params = std::move(best);
  result.best_epoch = best_epoch;
  return result;
}

namespace {

constexpr std::size_t kHeaderMax = 4096;

void append_le_f32(std::string& out, const std::vector<float>& v) {
  static_assert(sizeof(float) == 4);
  if constexpr (std::endian::native == std::endian::little) {
    out.append(reinterpret_cast<const char*>(v.data()), v.size() * 4);
  } else {
    for (float f : v) {
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
      }
    }
  }
}

void read_le_f32(const std::string& in, std::size_t& off,
                 std::vector<float>& v) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(v.data(), in.data() + off, v.size() * 4);
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::uint32_t bits = 0;
      for (int k = 0; k < 4; ++k) {
        bits |= static_cast<std::uint32_t>(
                    static_cast<unsigned char>(in[off + 4 * i + k]))
                << (8 * k);
      }
      std::memcpy(&v[i], &bits, 4);
    }
  }
  off += v.size() * 4;
}

}  // namespace

void save_checkpoint(const std::string& path, const NlmParams& params,
                     const NlmConfig& config,
                     const std::string& vocab_sha256) {
  std::string out;
  out += "format_version=1\n";
  out += "vocab_size=" + std::to_string(config.vocab_size) + "\n";
  out += "embed_dim=" + std::to_string(config.embed_dim) + "\n";
  out += "hidden_dim=" + std::to_string(config.hidden_dim) + "\n";
  out += "vocab_sha256=" + vocab_sha256 + "\n";
  out += "seed=" + std::to_string(config.seed) + "\n";
  out += "\n";
  for (const MatF* m : params.ordered()) append_le_f32(out, m->v);
  write_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path,
                           const std::string& expect_vocab_sha256) {
  std::string data = read_file(path);
  std::size_t sep = data.find("\n\n");
  if (sep == std::string::npos || sep > kHeaderMax) {
    throw Error("corrupt", "checkpoint header not found");
  }

  Checkpoint ck;
  bool have_version = false;
  for (const auto& line : split_lines(data.substr(0, sep))) {
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw Error("corrupt", "bad header line");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    try {
      if (key == "format_version") {
        have_version = true;
        if (value != "1") throw Error("bad-version", "format " + value);
      } else if (key == "vocab_size") {
        ck.config.vocab_size = std::stoi(value);
      } else if (key == "embed_dim") {
        ck.config.embed_dim = std::stoi(value);
      } else if (key == "hidden_dim") {
        ck.config.hidden_dim = std::stoi(value);
      } else if (key == "vocab_sha256") {
        ck.vocab_sha256 = value;
      } else if (key == "seed") {
        ck.config.seed = std::stoull(value);
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error("corrupt", "bad header value: " + line);
    }
  }
  if (!have_version) throw Error("corrupt", "missing format_version");
  ck.config.validate();
  if (!expect_vocab_sha256.empty() &&
      expect_vocab_sha256 != ck.vocab_sha256) {
    throw Error("vocab-mismatch", "checkpoint was trained on a different "
                                  "unit vocabulary");
  }

  NlmParams p;
  p.embedding.resize(ck.config.vocab_size, ck.config.embed_dim);
  p.wz.resize(ck.config.embed_dim, ck.config.hidden_dim);
  p.uz.resize(ck.config.hidden_dim, ck.config.hidden_dim);
  p.bz.resize(1, ck.config.hidden_dim);
  p.wr.resize(ck.config.embed_dim, ck.config.hidden_dim);
  p.ur.resize(ck.config.hidden_dim, ck.config.hidden_dim);
  p.br.resize(1, ck.config.hidden_dim);
  p.wh.resize(ck.config.embed_dim, ck.config.hidden_dim);
  p.uh.resize(ck.config.hidden_dim, ck.config.hidden_dim);
  p.bh.resize(1, ck.config.hidden_dim);
  p.w_out.resize(ck.config.hidden_dim, ck.config.vocab_size);
  p.b_out.resize(1, ck.config.vocab_size);

  std::size_t expected = 0;
  for (const MatF* m : p.ordered()) expected += m->size() * 4;
  std::size_t off = sep + 2;
  if (data.size() - off != expected) {
    throw Error("corrupt", "checkpoint payload size mismatch");
  }
  for (MatF* m : p.ordered()) read_le_f32(data, off, m->v);
  ck.params = std::move(p);
  return ck;
}

}  // namespace ovlm
