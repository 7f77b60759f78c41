// Copyright 2026 The vdr Authors.
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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "vdr/corpus.hpp"

namespace vdr {

// Token <-> index map with reserved specials.
class Seq2SeqVocab {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kBos = 1;
  static constexpr std::int32_t kEos = 2;
  static constexpr std::int32_t kUnk = 3;

  Seq2SeqVocab();
  static Seq2SeqVocab build(const std::vector<std::vector<std::string>>& corpus,
                            int min_count);

  std::int32_t id(const std::string& token) const;
  const std::string& token(std::int32_t id) const { return tokens_[id]; }
  std::size_t size() const { return tokens_.size(); }
  int min_count() const { return min_count_; }
  std::uint64_t fingerprint() const;

  const std::vector<std::string>& tokens() const { return tokens_; }
  static Seq2SeqVocab from_tokens(std::vector<std::string> tokens);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
  int min_count_ = 1;
};

// (source vocab over stripped tokens, target vocab over diacritized ones)
std::pair<Seq2SeqVocab, Seq2SeqVocab> build_vocab(const ParallelCorpus& corpus,
                                                  int min_count);

struct Tensor {
  std::vector<double> v;
  std::size_t rows = 0, cols = 1;
  void resize(std::size_t r, std::size_t c) {
    rows = r;
    cols = c;
    v.assign(r * c, 0.0);
  }
  double* data() { return v.data(); }
  const double* data() const { return v.data(); }
};

struct GruParams {
  Tensor Wz, Wr, Wc;  // input weights, hidden x input
  Tensor Uz, Ur, Uc;  // recurrent weights, hidden x hidden
  Tensor bz, br, bc;  // biases, hidden
  void resize(std::size_t hidden, std::size_t input);
};

struct Seq2SeqConfig {
  int embed_dim = 64;
  int hidden_dim = 128;
  int min_count = 1;
};

struct TrainConfig {
  double learning_rate = 0.1;
  int batch_size = 8;
  int max_epochs = 30;
  int patience = 3;       // dev evaluations without improvement
  double clip_norm = 5.0;
  std::uint64_t seed = 42;
};

struct TrainLogEntry {
  int epoch = 0;
  double train_loss = 0;
  double dev_loss = 0;
  bool improved = false;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, int batch)
      : std::runtime_error("training diverged at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch)),
        epoch_(epoch),
        batch_(batch) {}
  int epoch() const { return epoch_; }
  int batch() const { return batch_; }

 private:
  int epoch_, batch_;
};

struct EncodeResult {
  std::vector<std::vector<double>> hidden_states;  // one per source token
  std::vector<double> summary;                     // s = final hidden state
};

struct StepResult {
  std::vector<double> probs;   // over the target vocabulary, sums to 1
  std::vector<double> hidden;  // next decoder hidden state
};

// Single-layer GRU encoder/decoder with the encoder summary vector
// initializing the decoder state; output layer is one projection to the
// target vocabulary followed by softmax. Double precision throughout.
class Seq2SeqModel {
 public:
  Seq2SeqModel() = default;
  Seq2SeqModel(Seq2SeqVocab src_vocab, Seq2SeqVocab tgt_vocab,
               const Seq2SeqConfig& config, std::uint64_t init_seed);

  const Seq2SeqVocab& source_vocab() const { return src_vocab_; }
  const Seq2SeqVocab& target_vocab() const { return tgt_vocab_; }
  int embed_dim() const { return embed_; }
  int hidden_dim() const { return hidden_; }

  // Runs the encoder over source token indices. Throws std::out_of_range
  // on an invalid index. An empty input yields the zero summary.
  EncodeResult encode(const std::vector<std::int32_t>& source_ids) const;

  // One decoder step conditioned on the previous target token.
  StepResult decode_step(std::int32_t prev_target_id,
                         const std::vector<double>& hidden) const;

  // Mean per-token negative log likelihood of the pair (teacher forcing,
  // end symbol included).
  double pair_loss(const std::vector<std::int32_t>& src,
                   const std::vector<std::int32_t>& tgt) const;

  std::vector<std::int32_t> source_ids(const std::vector<std::string>& tokens) const;
  std::vector<std::int32_t> target_ids(const std::vector<std::string>& tokens) const;

  double corpus_loss(const ParallelCorpus& corpus) const;

  // Registry in serialization order.
  std::vector<std::pair<std::string, Tensor*>> tensors();
  std::vector<std::pair<std::string, const Tensor*>> tensors() const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static Seq2SeqModel load(std::istream& in);
  static Seq2SeqModel load_file(const std::string& path);

  // Internal but stable surfaces used by training/checking code.
  struct Gradients;
  double accumulate_pair_gradients(const std::vector<std::int32_t>& src,
                                   const std::vector<std::int32_t>& tgt,
                                   Gradients& grads, double scale) const;

  Tensor emb_src, emb_tgt;
  GruParams encoder, decoder;
  Tensor w_out, b_out;

 private:
  Seq2SeqVocab src_vocab_, tgt_vocab_;
  int embed_ = 0, hidden_ = 0;
};

struct Seq2SeqModel::Gradients {
  Tensor emb_src, emb_tgt;
  GruParams encoder, decoder;
  Tensor w_out, b_out;
  void resize_like(const Seq2SeqModel& model);
  void zero();
  std::vector<Tensor*> flat();
};

// SGD with gradient-norm clipping and dev-loss early stopping; returns the
// best dev-loss checkpoint. Throws TrainingDiverged on NaN/inf loss.
Seq2SeqModel train_seq2seq(const ParallelCorpus& train_corpus,
                           const ParallelCorpus& dev_corpus,
                           const Seq2SeqConfig& model_config,
                           const TrainConfig& train_config,
                           std::vector<TrainLogEntry>* log = nullptr);

// Greedy (beam = 1) or length-normalized beam restoration. Emission stops
// at the end symbol or at twice the source length; <unk> emissions are
// replaced by the same-position source token.
std::vector<std::string> restore_neural(const Seq2SeqModel& model,
                                        const std::vector<std::string>& source,
                                        int beam = 1);

struct GradCheckOptions {
  int samples = 200;
  std::uint64_t seed = 7;
  // Fault-injection hook for harness negative controls: scales the
  // analytic projection gradient.
  double corrupt_projection_scale = 1.0;
};

// Max relative error between analytic and central-difference gradients on
// randomly sampled coordinates.
double gradient_check(Seq2SeqModel& model, const SentencePair& pair,
                      double epsilon, const GradCheckOptions& options = {});

}  // namespace vdr
