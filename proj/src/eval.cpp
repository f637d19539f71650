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

#include "ovlm/eval.hpp"

#include <cmath>
#include <numeric>

#include "ovlm/error.hpp"
#include "ovlm/textio.hpp"
#include "ovlm/util.hpp"

namespace ovlm {
namespace {

constexpr double kLn2 = 0.6931471805599453;

// Evaluation record for one file: entropy over every token, prediction
// lists only for the ranked positions (those under the global token cap).
struct FileEval {
  double nll_bits = 0.0;
  std::size_t tokens = 0;
  std::vector<CompletionList> preds;
  std::vector<std::string> truths;
  std::vector<bool> id_mask;
};

// NLL in nats of unit id from state h, then consumes it.
double score_and_advance(const GruLm& model, int id, HiddenState& h) {
  const std::vector<double> probs = probs_from_state(model.params, h);
  const double p = probs[static_cast<std::size_t>(id)];
  advance_state(model.params, model.config, id, h);
  return -std::log(std::max(p, 1e-300));
}

FileEval eval_file(const GruLm& model, const SegmentedFile& seg,
                   const ScenarioOptions& opts, std::size_t global_offset) {
  FileEval out;
  out.tokens = seg.tokens.size();
  HiddenState h(model.config.hidden_dim, 0.0);
  for (std::size_t i = 0; i < seg.tokens.size(); ++i) {
    if (global_offset + i < opts.mrr_max_tokens) {
      out.preds.push_back(
          predict_top_k(model, h, opts.k, opts.beam_size));
      out.truths.push_back(seg.tokens[i].text);
      out.id_mask.push_back(seg.tokens[i].category ==
                            TokenCategory::Identifier);
    }
    double nats = 0.0;
    for (std::size_t u = seg.token_first[i]; u < seg.token_first[i + 1]; ++u)
      nats += score_and_advance(model, seg.units[u], h);
    out.nll_bits += nats / kLn2;
  }
  return out;
}

void check_options(const ScenarioOptions& opts) {
  if (opts.k < 1 || opts.beam_size < opts.k || opts.adapt_unroll < 1 ||
      opts.adapt_lr < 0.0)
    throw Error("bad-config", "bad scenario options");
}

std::vector<std::string> prep_texts(const TokenStream& stream,
                                    const PrepConfig& prep) {
  std::vector<std::string> texts;
  for (const PrepToken& tok : apply_prep_tagged(stream, prep))
    texts.push_back(tok.text);
  return texts;
}

// Mean per-token entropy in bits of one prepared snippet.
double snippet_entropy(const GruLm& model, const BpeModel& bpe,
                       const std::vector<std::string>& texts) {
  if (texts.empty())
    throw Error("bad-config", "snippet prepares to zero tokens");
  HiddenState h(model.config.hidden_dim, 0.0);
  double nats = 0.0;
  for (const std::string& text : texts) {
    for (const std::string& unit : segment(text, bpe))
      nats += score_and_advance(model, model.vocab.id_of(unit), h);
  }
  return nats / kLn2 / static_cast<double>(texts.size());
}

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Static: return "Static";
    case Scenario::Dynamic: return "Dynamic";
    case Scenario::Maintenance: return "Maintenance";
  }
  return "Static";
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "Static" || name == "static") return Scenario::Static;
  if (name == "Dynamic" || name == "dynamic") return Scenario::Dynamic;
  if (name == "Maintenance" || name == "maintenance")
    return Scenario::Maintenance;
  throw Error("bad-config", "unknown scenario: " + name);
}

double token_entropy(const GruLm& model, const std::string& token,
                     std::span<const int> context_units, const BpeModel& bpe) {
  HiddenState h(model.config.hidden_dim, 0.0);
  for (int id : context_units)
    advance_state(model.params, model.config, id, h);
  double nats = 0.0;
  for (const std::string& unit : segment(token, bpe))
    nats += score_and_advance(model, model.vocab.id_of(unit), h);
  return nats / kLn2;
}

double corpus_entropy(const GruLm& model,
                      const std::vector<SegmentedFile>& files) {
  std::vector<double> bits(files.size(), 0.0);
  std::vector<std::size_t> tokens(files.size(), 0);
  parallel_for(files.size(), [&](std::size_t i) {
    const SegmentedFile& seg = files[i];
    HiddenState h(model.config.hidden_dim, 0.0);
    double nats = 0.0;
    for (int id : seg.units) nats += score_and_advance(model, id, h);
    bits[i] = nats / kLn2;
    tokens[i] = seg.tokens.size();
  });
  const std::size_t total = std::accumulate(tokens.begin(), tokens.end(),
                                            std::size_t{0});
  if (total == 0) return 0.0;
  return std::accumulate(bits.begin(), bits.end(), 0.0) /
         static_cast<double>(total);
}

EvalReport mrr_and_recall(const std::vector<CompletionList>& predictions,
                          const std::vector<std::string>& truths,
                          const std::vector<bool>& identifier_mask) {
  if (predictions.size() != truths.size() ||
      predictions.size() != identifier_mask.size())
    throw Error("misaligned", "predictions, truths and mask lengths differ");

  double rr_sum = 0.0, id_rr_sum = 0.0;
  std::size_t hit1 = 0, hit10 = 0, id_hit1 = 0, id_hit10 = 0, ids = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    std::size_t rank = 0;  // 1-based; 0 means absent
    const CompletionList& list = predictions[i];
    for (std::size_t j = 0; j < list.size(); ++j) {
      if (list[j].token == truths[i]) {
        rank = j + 1;
        break;
      }
    }
    const double rr = rank == 0 ? 0.0 : 1.0 / static_cast<double>(rank);
    rr_sum += rr;
    if (rank == 1) ++hit1;
    if (rank >= 1 && rank <= 10) ++hit10;
    if (identifier_mask[i]) {
      ++ids;
      id_rr_sum += rr;
      if (rank == 1) ++id_hit1;
      if (rank >= 1 && rank <= 10) ++id_hit10;
    }
  }

  EvalReport rep;
  rep.tokens_evaluated = predictions.size();
  const double n = static_cast<double>(predictions.size());
  if (n > 0) {
    rep.mrr = rr_sum / n;
    rep.r_at_1 = static_cast<double>(hit1) / n;
    rep.r_at_10 = static_cast<double>(hit10) / n;
  }
  if (ids > 0) {
    const double m = static_cast<double>(ids);
    rep.identifier_mrr = id_rr_sum / m;
    rep.identifier_r_at_1 = static_cast<double>(id_hit1) / m;
    rep.identifier_r_at_10 = static_cast<double>(id_hit10) / m;
  }
  return rep;
}

EvalReport run_scenario(Scenario scenario, const GruLm& model,
                        const Corpus& test, const BpeModel& bpe,
                        const ScenarioOptions& options, OperationLog* log) {
  check_options(options);
  const double lr = options.adapt_lr > 0.0 ? options.adapt_lr
                                           : model.config.learning_rate;

  // Segment everything once: adaptation changes weights, not segmentation.
  struct SegProject {
    std::vector<SegmentedFile> files;
    std::vector<std::string> paths;
  };
  std::vector<SegProject> projects(test.size());
  for (std::size_t p = 0; p < test.size(); ++p) {
    projects[p].files.resize(test[p].files.size());
    projects[p].paths.resize(test[p].files.size());
    for (std::size_t f = 0; f < test[p].files.size(); ++f)
      projects[p].paths[f] = test[p].files[f].path;
  }
  {
    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t p = 0; p < test.size(); ++p)
      for (std::size_t f = 0; f < test[p].files.size(); ++f)
        work.emplace_back(p, f);
    parallel_for(work.size(), [&](std::size_t i) {
      const auto [p, f] = work[i];
      projects[p].files[f] = segment_file(test[p].files[f], bpe, model.vocab);
    });
  }

  // Global token offsets in corpus order drive the ranking cap.
  std::vector<std::vector<std::size_t>> offsets(test.size());
  std::size_t running = 0;
  for (std::size_t p = 0; p < test.size(); ++p) {
    for (const SegmentedFile& seg : projects[p].files) {
      offsets[p].push_back(running);
      running += seg.tokens.size();
    }
  }

  std::vector<std::vector<FileEval>> evals(test.size());
  for (std::size_t p = 0; p < test.size(); ++p)
    evals[p].resize(projects[p].files.size());

  if (scenario == Scenario::Static) {
    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t p = 0; p < test.size(); ++p)
      for (std::size_t f = 0; f < projects[p].files.size(); ++f)
        work.emplace_back(p, f);
    parallel_for(work.size(), [&](std::size_t i) {
      const auto [p, f] = work[i];
      evals[p][f] =
          eval_file(model, projects[p].files[f], options, offsets[p][f]);
    });
    if (log != nullptr) {
      for (std::size_t p = 0; p < test.size(); ++p)
        for (const std::string& path : projects[p].paths)
          log->push_back({OpEvent::Predict, path});
    }
  } else if (scenario == Scenario::Dynamic) {
    for (std::size_t p = 0; p < test.size(); ++p) {
      GruLm local = model;  // reverts to the global model per project
      for (std::size_t f = 0; f < projects[p].files.size(); ++f) {
        evals[p][f] =
            eval_file(local, projects[p].files[f], options, offsets[p][f]);
        if (log != nullptr) log->push_back({OpEvent::Predict,
                                            projects[p].paths[f]});
        local = adapt(local, {projects[p].files[f].units},
                      options.adapt_unroll, lr);
        if (log != nullptr) log->push_back({OpEvent::Adapt,
                                            projects[p].paths[f]});
      }
    }
  } else {
    for (std::size_t p = 0; p < test.size(); ++p) {
      for (std::size_t f = 0; f < projects[p].files.size(); ++f) {
        std::vector<std::vector<int>> others;
        for (std::size_t g = 0; g < projects[p].files.size(); ++g)
          if (g != f) others.push_back(projects[p].files[g].units);
        GruLm local = model;
        if (!others.empty()) {
          local = adapt(local, others, options.adapt_unroll, lr);
          if (log != nullptr) {
            for (std::size_t g = 0; g < projects[p].files.size(); ++g)
              if (g != f)
                log->push_back({OpEvent::Adapt, projects[p].paths[g]});
          }
        }
        evals[p][f] =
            eval_file(local, projects[p].files[f], options, offsets[p][f]);
        if (log != nullptr) log->push_back({OpEvent::Predict,
                                            projects[p].paths[f]});
      }
    }
  }

  double bits = 0.0;
  std::size_t tokens = 0;
  std::vector<CompletionList> preds;
  std::vector<std::string> truths;
  std::vector<bool> mask;
  for (std::size_t p = 0; p < test.size(); ++p) {
    for (const FileEval& fe : evals[p]) {
      bits += fe.nll_bits;
      tokens += fe.tokens;
      preds.insert(preds.end(), fe.preds.begin(), fe.preds.end());
      truths.insert(truths.end(), fe.truths.begin(), fe.truths.end());
      mask.insert(mask.end(), fe.id_mask.begin(), fe.id_mask.end());
    }
  }

  EvalReport rep = mrr_and_recall(preds, truths, mask);
  rep.scenario = scenario;
  rep.tokens_evaluated = tokens;
  if (tokens > 0) rep.entropy_bits_per_token = bits / static_cast<double>(tokens);
  return rep;
}

double bug_entropy_delta(const GruLm& model, const BpeModel& bpe,
                         const PrepConfig& prep, const BugPair& pair) {
  const double buggy = snippet_entropy(model, bpe, prep_texts(pair.buggy,
                                                              prep));
  const double fixed = snippet_entropy(model, bpe, prep_texts(pair.fixed,
                                                              prep));
  return buggy - fixed;
}

std::string to_report_file(const EvalReport& report, const std::string& model,
                           int bpe_merges, const std::string& test_manifest) {
  std::string out;
  out += "scenario=" + std::string(to_string(report.scenario)) + "\n";
  out += "model=" + model + "\n";
  out += "bpe_merges=" + std::to_string(bpe_merges) + "\n";
  out += "test_manifest=" + test_manifest + "\n";
  out += "entropy_bits_per_token=" +
         format_double(report.entropy_bits_per_token) + "\n";
  out += "mrr=" + format_double(report.mrr) + "\n";
  out += "r_at_1=" + format_double(report.r_at_1) + "\n";
  out += "r_at_10=" + format_double(report.r_at_10) + "\n";
  out += "identifier_mrr=" + format_double(report.identifier_mrr) + "\n";
  out += "identifier_r_at_1=" + format_double(report.identifier_r_at_1) +
         "\n";
  out += "identifier_r_at_10=" + format_double(report.identifier_r_at_10) +
         "\n";
  out += "tokens_evaluated=" + std::to_string(report.tokens_evaluated) + "\n";
  return out;
}

}  // namespace ovlm
