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

#include "vdr/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "vdr/kernels.hpp"

namespace vdr {

namespace {

constexpr char kMagic[4] = {'V', 'D', 'S', 'Q'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kEndianTag = 0x01020304;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Implementation-independent uniform double in [lo, hi).
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u =
      static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  return lo + u * (hi - lo);
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Seq2SeqVocab::Seq2SeqVocab() {
  tokens_ = {"<pad>", "<s>", "</s>", "<unk>"};
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(tokens_.size()); ++i)
    index_[tokens_[i]] = i;
}

Seq2SeqVocab Seq2SeqVocab::build(
    const std::vector<std::vector<std::string>>& corpus, int min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sent : corpus)
    for (const auto& tok : sent) ++counts[tok];
  std::vector<std::string> kept;
  for (const auto& [tok, n] : counts)
    if (n >= static_cast<std::uint64_t>(min_count)) kept.push_back(tok);
  std::sort(kept.begin(), kept.end());
  Seq2SeqVocab vocab;
  vocab.min_count_ = min_count;
  for (auto& tok : kept) {
    vocab.index_[tok] = static_cast<std::int32_t>(vocab.tokens_.size());
    vocab.tokens_.push_back(std::move(tok));
  }
  return vocab;
}

Seq2SeqVocab Seq2SeqVocab::from_tokens(std::vector<std::string> tokens) {
  Seq2SeqVocab vocab;
  vocab.tokens_ = std::move(tokens);
  vocab.index_.clear();
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(vocab.tokens_.size());
       ++i)
    vocab.index_[vocab.tokens_[i]] = i;
  return vocab;
}

std::int32_t Seq2SeqVocab::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::uint64_t Seq2SeqVocab::fingerprint() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& tok : tokens_) {
    h = fnv1a(tok.data(), tok.size(), h);
    h = fnv1a("\n", 1, h);
  }
  return h;
}

std::pair<Seq2SeqVocab, Seq2SeqVocab> build_vocab(const ParallelCorpus& corpus,
                                                  int min_count) {
  if (corpus.empty()) throw std::invalid_argument("build_vocab: empty corpus");
  return {Seq2SeqVocab::build(source_sentences(corpus), min_count),
          Seq2SeqVocab::build(target_sentences(corpus), min_count)};
}

void GruParams::resize(std::size_t hidden, std::size_t input) {
  Wz.resize(hidden, input);
  Wr.resize(hidden, input);
  Wc.resize(hidden, input);
  Uz.resize(hidden, hidden);
  Ur.resize(hidden, hidden);
  Uc.resize(hidden, hidden);
  bz.resize(hidden, 1);
  br.resize(hidden, 1);
  bc.resize(hidden, 1);
}

Seq2SeqModel::Seq2SeqModel(Seq2SeqVocab src_vocab, Seq2SeqVocab tgt_vocab,
                           const Seq2SeqConfig& config, std::uint64_t init_seed)
    : src_vocab_(std::move(src_vocab)),
      tgt_vocab_(std::move(tgt_vocab)),
      embed_(config.embed_dim),
      hidden_(config.hidden_dim) {
  if (embed_ < 1 || hidden_ < 1)
    throw std::invalid_argument("seq2seq: dimensions must be >= 1");
  emb_src.resize(src_vocab_.size(), embed_);
  emb_tgt.resize(tgt_vocab_.size(), embed_);
  encoder.resize(hidden_, embed_);
  decoder.resize(hidden_, embed_);
  w_out.resize(tgt_vocab_.size(), hidden_);
  b_out.resize(tgt_vocab_.size(), 1);

  std::mt19937_64 rng(init_seed);
  for (auto& [name, tensor] : tensors()) {
    if (name == "b_out" || name.find(".b") != std::string::npos)
      continue;  // biases start at zero
    for (double& x : tensor->v) x = uniform(rng, -0.08, 0.08);
  }
}

std::vector<std::pair<std::string, Tensor*>> Seq2SeqModel::tensors() {
  return {
      {"emb_src", &emb_src},     {"emb_tgt", &emb_tgt},
      {"enc.Wz", &encoder.Wz},   {"enc.Wr", &encoder.Wr},
      {"enc.Wc", &encoder.Wc},   {"enc.Uz", &encoder.Uz},
      {"enc.Ur", &encoder.Ur},   {"enc.Uc", &encoder.Uc},
      {"enc.bz", &encoder.bz},   {"enc.br", &encoder.br},
      {"enc.bc", &encoder.bc},   {"dec.Wz", &decoder.Wz},
      {"dec.Wr", &decoder.Wr},   {"dec.Wc", &decoder.Wc},
      {"dec.Uz", &decoder.Uz},   {"dec.Ur", &decoder.Ur},
      {"dec.Uc", &decoder.Uc},   {"dec.bz", &decoder.bz},
      {"dec.br", &decoder.br},   {"dec.bc", &decoder.bc},
      {"w_out", &w_out},         {"b_out", &b_out},
  };
}

std::vector<std::pair<std::string, const Tensor*>> Seq2SeqModel::tensors()
    const {
  auto mut = const_cast<Seq2SeqModel*>(this)->tensors();
  std::vector<std::pair<std::string, const Tensor*>> out;
  out.reserve(mut.size());
  for (auto& [name, t] : mut) out.emplace_back(name, t);
  return out;
}

namespace {

// Forward cache for one GRU step.
struct GruStep {
  std::vector<double> x, h_prev, z, r, c, rh, h;
};

GruStep gru_forward(const GruParams& p, std::vector<double> x,
                    const std::vector<double>& h_prev) {
  const std::size_t H = p.Uz.rows;
  const std::size_t E = p.Wz.cols;
  GruStep s;
  s.x = std::move(x);
  s.h_prev = h_prev;
  s.z.assign(H, 0.0);
  s.r.assign(H, 0.0);
  s.c.assign(H, 0.0);
  s.rh.assign(H, 0.0);
  s.h.assign(H, 0.0);

  std::vector<double> a(H);
  // z = sigmoid(Wz x + Uz h_prev + bz)
  kernels::matvec(p.Wz.data(), s.x.data(), a.data(), H, E);
  kernels::matvec_acc(p.Uz.data(), s.h_prev.data(), a.data(), H, H);
  for (std::size_t i = 0; i < H; ++i) s.z[i] = sigmoid(a[i] + p.bz.v[i]);
  // r = sigmoid(Wr x + Ur h_prev + br)
  kernels::matvec(p.Wr.data(), s.x.data(), a.data(), H, E);
  kernels::matvec_acc(p.Ur.data(), s.h_prev.data(), a.data(), H, H);
  for (std::size_t i = 0; i < H; ++i) s.r[i] = sigmoid(a[i] + p.br.v[i]);
  // c = tanh(Wc x + Uc (r.h_prev) + bc)
  for (std::size_t i = 0; i < H; ++i) s.rh[i] = s.r[i] * s.h_prev[i];
  kernels::matvec(p.Wc.data(), s.x.data(), a.data(), H, E);
  kernels::matvec_acc(p.Uc.data(), s.rh.data(), a.data(), H, H);
  for (std::size_t i = 0; i < H; ++i) s.c[i] = std::tanh(a[i] + p.bc.v[i]);
  // h = z.h_prev + (1-z).c
  for (std::size_t i = 0; i < H; ++i)
    s.h[i] = s.z[i] * s.h_prev[i] + (1.0 - s.z[i]) * s.c[i];
  return s;
}

struct GruGradRefs {
  Tensor *Wz, *Wr, *Wc, *Uz, *Ur, *Uc, *bz, *br, *bc;
};

// Backpropagates dh through one step; adds parameter gradients, returns
// dh_prev in place of dh and writes dx.
void gru_backward(const GruParams& p, const GruStep& s, std::vector<double>& dh,
                  const GruGradRefs& g, std::vector<double>& dx) {
  const std::size_t H = p.Uz.rows;
  const std::size_t E = p.Wz.cols;
  std::vector<double> dz(H), dc(H), dh_prev(H), da(H), drh(H);
  for (std::size_t i = 0; i < H; ++i) {
    dz[i] = dh[i] * (s.h_prev[i] - s.c[i]);
    dc[i] = dh[i] * (1.0 - s.z[i]);
    dh_prev[i] = dh[i] * s.z[i];
  }
  dx.assign(E, 0.0);

  // candidate gate
  for (std::size_t i = 0; i < H; ++i) da[i] = dc[i] * (1.0 - s.c[i] * s.c[i]);
  kernels::rank1_acc(g.Wc->data(), da.data(), s.x.data(), H, E);
  kernels::rank1_acc(g.Uc->data(), da.data(), s.rh.data(), H, H);
  for (std::size_t i = 0; i < H; ++i) g.bc->v[i] += da[i];
  kernels::matvec_t_acc(p.Wc.data(), da.data(), dx.data(), H, E);
  std::fill(drh.begin(), drh.end(), 0.0);
  kernels::matvec_t_acc(p.Uc.data(), da.data(), drh.data(), H, H);
  std::vector<double> dr(H);
  for (std::size_t i = 0; i < H; ++i) {
    dr[i] = drh[i] * s.h_prev[i];
    dh_prev[i] += drh[i] * s.r[i];
  }

  // reset gate
  for (std::size_t i = 0; i < H; ++i)
    da[i] = dr[i] * s.r[i] * (1.0 - s.r[i]);
  kernels::rank1_acc(g.Wr->data(), da.data(), s.x.data(), H, E);
  kernels::rank1_acc(g.Ur->data(), da.data(), s.h_prev.data(), H, H);
  for (std::size_t i = 0; i < H; ++i) g.br->v[i] += da[i];
  kernels::matvec_t_acc(p.Wr.data(), da.data(), dx.data(), H, E);
  kernels::matvec_t_acc(p.Ur.data(), da.data(), dh_prev.data(), H, H);

  // update gate
  for (std::size_t i = 0; i < H; ++i)
    da[i] = dz[i] * s.z[i] * (1.0 - s.z[i]);
  kernels::rank1_acc(g.Wz->data(), da.data(), s.x.data(), H, E);
  kernels::rank1_acc(g.Uz->data(), da.data(), s.h_prev.data(), H, H);
  for (std::size_t i = 0; i < H; ++i) g.bz->v[i] += da[i];
  kernels::matvec_t_acc(p.Wz.data(), da.data(), dx.data(), H, E);
  kernels::matvec_t_acc(p.Uz.data(), da.data(), dh_prev.data(), H, H);

  dh = std::move(dh_prev);
}

void softmax_inplace(std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : logits) v /= sum;
}

std::vector<double> embedding_row(const Tensor& emb, std::int32_t id) {
  return std::vector<double>(emb.data() + id * emb.cols,
                             emb.data() + (id + 1) * emb.cols);
}

}  // namespace

EncodeResult Seq2SeqModel::encode(
    const std::vector<std::int32_t>& source_ids) const {
  EncodeResult result;
  std::vector<double> h(hidden_, 0.0);
  for (std::int32_t id : source_ids) {
    if (id < 0 || id >= static_cast<std::int32_t>(src_vocab_.size()))
      throw std::out_of_range("encode: source index out of range: " +
                              std::to_string(id));
    GruStep step = gru_forward(encoder, embedding_row(emb_src, id), h);
    h = step.h;
    result.hidden_states.push_back(h);
  }
  result.summary = std::move(h);
  return result;
}

StepResult Seq2SeqModel::decode_step(std::int32_t prev_target_id,
                                     const std::vector<double>& hidden) const {
  if (prev_target_id < 0 ||
      prev_target_id >= static_cast<std::int32_t>(tgt_vocab_.size()))
    throw std::out_of_range("decode_step: target index out of range");
  if (hidden.size() != static_cast<std::size_t>(hidden_))
    throw std::invalid_argument("decode_step: hidden state has wrong size");
  GruStep step =
      gru_forward(decoder, embedding_row(emb_tgt, prev_target_id), hidden);
  StepResult result;
  result.hidden = step.h;
  result.probs.assign(tgt_vocab_.size(), 0.0);
  kernels::matvec(w_out.data(), step.h.data(), result.probs.data(),
                  tgt_vocab_.size(), hidden_);
  for (std::size_t i = 0; i < result.probs.size(); ++i)
    result.probs[i] += b_out.v[i];
  softmax_inplace(result.probs);
  return result;
}

std::vector<std::int32_t> Seq2SeqModel::source_ids(
    const std::vector<std::string>& tokens) const {
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(src_vocab_.id(t));
  return ids;
}

std::vector<std::int32_t> Seq2SeqModel::target_ids(
    const std::vector<std::string>& tokens) const {
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(tgt_vocab_.id(t));
  return ids;
}

void Seq2SeqModel::Gradients::resize_like(const Seq2SeqModel& model) {
  emb_src.resize(model.emb_src.rows, model.emb_src.cols);
  emb_tgt.resize(model.emb_tgt.rows, model.emb_tgt.cols);
  encoder.resize(model.encoder.Uz.rows, model.encoder.Wz.cols);
  decoder.resize(model.decoder.Uz.rows, model.decoder.Wz.cols);
  w_out.resize(model.w_out.rows, model.w_out.cols);
  b_out.resize(model.b_out.rows, 1);
}

void Seq2SeqModel::Gradients::zero() {
  for (Tensor* t : flat()) std::fill(t->v.begin(), t->v.end(), 0.0);
}

std::vector<Tensor*> Seq2SeqModel::Gradients::flat() {
  return {&emb_src,     &emb_tgt,     &encoder.Wz, &encoder.Wr, &encoder.Wc,
          &encoder.Uz,  &encoder.Ur,  &encoder.Uc, &encoder.bz, &encoder.br,
          &encoder.bc,  &decoder.Wz,  &decoder.Wr, &decoder.Wc, &decoder.Uz,
          &decoder.Ur,  &decoder.Uc,  &decoder.bz, &decoder.br, &decoder.bc,
          &w_out,       &b_out};
}

double Seq2SeqModel::accumulate_pair_gradients(
    const std::vector<std::int32_t>& src, const std::vector<std::int32_t>& tgt,
    Gradients& grads, double scale) const {
  const std::size_t H = hidden_;
  const std::size_t V = tgt_vocab_.size();

  // encoder forward
  std::vector<GruStep> enc_steps;
  enc_steps.reserve(src.size());
  std::vector<double> h(H, 0.0);
  for (std::int32_t id : src) {
    enc_steps.push_back(gru_forward(encoder, embedding_row(emb_src, id), h));
    h = enc_steps.back().h;
  }

  // decoder forward, teacher forcing: inputs <s>, e_1..e_m;
  // gold e_1..e_m, </s>
  std::vector<std::int32_t> inputs;
  inputs.push_back(Seq2SeqVocab::kBos);
  inputs.insert(inputs.end(), tgt.begin(), tgt.end());
  std::vector<std::int32_t> gold = tgt;
  gold.push_back(Seq2SeqVocab::kEos);

  std::vector<GruStep> dec_steps;
  dec_steps.reserve(inputs.size());
  std::vector<std::vector<double>> probs(inputs.size());
  double nll = 0.0;
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    dec_steps.push_back(
        gru_forward(decoder, embedding_row(emb_tgt, inputs[j]), h));
    h = dec_steps.back().h;
    auto& p = probs[j];
    p.assign(V, 0.0);
    kernels::matvec(w_out.data(), h.data(), p.data(), V, H);
    for (std::size_t i = 0; i < V; ++i) p[i] += b_out.v[i];
    softmax_inplace(p);
    nll -= std::log(p[gold[j]]);
  }

  // backward through decoder
  GruGradRefs dec_refs{&grads.decoder.Wz, &grads.decoder.Wr, &grads.decoder.Wc,
                       &grads.decoder.Uz, &grads.decoder.Ur, &grads.decoder.Uc,
                       &grads.decoder.bz, &grads.decoder.br, &grads.decoder.bc};
  GruGradRefs enc_refs{&grads.encoder.Wz, &grads.encoder.Wr, &grads.encoder.Wc,
                       &grads.encoder.Uz, &grads.encoder.Ur, &grads.encoder.Uc,
                       &grads.encoder.bz, &grads.encoder.br, &grads.encoder.bc};
  std::vector<double> dh(H, 0.0), dx;
  std::vector<double> dlogits(V);
  for (std::size_t j = inputs.size(); j-- > 0;) {
    for (std::size_t i = 0; i < V; ++i) dlogits[i] = probs[j][i] * scale;
    dlogits[gold[j]] -= scale;
    kernels::rank1_acc(grads.w_out.data(), dlogits.data(),
                       dec_steps[j].h.data(), V, H);
    for (std::size_t i = 0; i < V; ++i) grads.b_out.v[i] += dlogits[i];
    kernels::matvec_t_acc(w_out.data(), dlogits.data(), dh.data(), V, H);
    gru_backward(decoder, dec_steps[j], dh, dec_refs, dx);
    double* row = grads.emb_tgt.data() + inputs[j] * embed_;
    for (int e = 0; e < embed_; ++e) row[e] += dx[e];
  }

  // dh is now the gradient w.r.t. the encoder summary
  for (std::size_t t = src.size(); t-- > 0;) {
    gru_backward(encoder, enc_steps[t], dh, enc_refs, dx);
    double* row = grads.emb_src.data() + src[t] * embed_;
    for (int e = 0; e < embed_; ++e) row[e] += dx[e];
  }

  return nll;
}

double Seq2SeqModel::pair_loss(const std::vector<std::int32_t>& src,
                               const std::vector<std::int32_t>& tgt) const {
  std::vector<double> h(hidden_, 0.0);
  for (std::int32_t id : src)
    h = gru_forward(encoder, embedding_row(emb_src, id), h).h;
  std::vector<std::int32_t> inputs;
  inputs.push_back(Seq2SeqVocab::kBos);
  inputs.insert(inputs.end(), tgt.begin(), tgt.end());
  std::vector<std::int32_t> gold = tgt;
  gold.push_back(Seq2SeqVocab::kEos);
  const std::size_t V = tgt_vocab_.size();
  std::vector<double> p(V);
  double nll = 0.0;
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    h = gru_forward(decoder, embedding_row(emb_tgt, inputs[j]), h).h;
    p.assign(V, 0.0);
    kernels::matvec(w_out.data(), h.data(), p.data(), V, hidden_);
    for (std::size_t i = 0; i < V; ++i) p[i] += b_out.v[i];
    softmax_inplace(p);
    nll -= std::log(p[gold[j]]);
  }
  return nll / static_cast<double>(inputs.size());
}

double Seq2SeqModel::corpus_loss(const ParallelCorpus& corpus) const {
  double nll = 0.0;
  std::uint64_t tokens = 0;
  for (const auto& pair : corpus.pairs) {
    const auto src = source_ids(pair.source);
    const auto tgt = target_ids(pair.target);
    nll += pair_loss(src, tgt) * static_cast<double>(tgt.size() + 1);
    tokens += tgt.size() + 1;
  }
  return tokens ? nll / static_cast<double>(tokens) : 0.0;
}

Seq2SeqModel train_seq2seq(const ParallelCorpus& train_corpus,
                           const ParallelCorpus& dev_corpus,
                           const Seq2SeqConfig& model_config,
                           const TrainConfig& train_config,
                           std::vector<TrainLogEntry>* log) {
  if (train_corpus.empty() || dev_corpus.empty())
    throw std::invalid_argument("train_seq2seq: corpora must be non-empty");
  if (train_config.learning_rate <= 0)
    throw std::invalid_argument("train_seq2seq: learning rate must be > 0");
  if (train_config.patience < 1)
    throw std::invalid_argument("train_seq2seq: patience must be >= 1");

  auto [src_vocab, tgt_vocab] = build_vocab(train_corpus, model_config.min_count);
  Seq2SeqModel model(std::move(src_vocab), std::move(tgt_vocab), model_config,
                     train_config.seed);

  std::vector<std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>>>
      data;
  data.reserve(train_corpus.size());
  for (const auto& pair : train_corpus.pairs)
    data.emplace_back(model.source_ids(pair.source),
                      model.target_ids(pair.target));

  Seq2SeqModel::Gradients grads;
  grads.resize_like(model);

  Seq2SeqModel best = model;
  double best_dev = std::numeric_limits<double>::infinity();
  int stale = 0;

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= train_config.max_epochs; ++epoch) {
    std::mt19937_64 rng(train_config.seed + static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[rng() % (i + 1)]);

    double epoch_nll = 0.0;
    std::uint64_t epoch_tokens = 0;
    const int bs = std::max(1, train_config.batch_size);
    int batch_index = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += bs, ++batch_index) {
      const std::size_t end = std::min(order.size(), begin + bs);
      std::uint64_t batch_tokens = 0;
      for (std::size_t k = begin; k < end; ++k)
        batch_tokens += data[order[k]].second.size() + 1;
      grads.zero();
      double batch_nll = 0.0;
      const double scale = 1.0 / static_cast<double>(batch_tokens);
      for (std::size_t k = begin; k < end; ++k)
        batch_nll += model.accumulate_pair_gradients(
            data[order[k]].first, data[order[k]].second, grads, scale);
      if (!std::isfinite(batch_nll))
        throw TrainingDiverged(epoch, batch_index);
      epoch_nll += batch_nll;
      epoch_tokens += batch_tokens;

      double norm_sq = 0.0;
      for (Tensor* t : grads.flat())
        for (double g : t->v) norm_sq += g * g;
      double factor = train_config.learning_rate;
      if (train_config.clip_norm > 0) {
        const double norm = std::sqrt(norm_sq);
        if (norm > train_config.clip_norm)
          factor *= train_config.clip_norm / norm;
      }
      auto params = model.tensors();
      auto gflat = grads.flat();
      for (std::size_t t = 0; t < params.size(); ++t) {
        double* p = params[t].second->v.data();
        const double* g = gflat[t]->v.data();
        const std::size_t n = params[t].second->v.size();
        for (std::size_t i = 0; i < n; ++i) p[i] -= factor * g[i];
      }
    }

    const double train_loss =
        epoch_nll / static_cast<double>(std::max<std::uint64_t>(1, epoch_tokens));
    const double dev_loss = model.corpus_loss(dev_corpus);
    const bool improved = dev_loss < best_dev - 1e-12;
    if (log) log->push_back({epoch, train_loss, dev_loss, improved});
    if (improved) {
      best_dev = dev_loss;
      best = model;
      stale = 0;
    } else if (++stale >= train_config.patience) {
      break;
    }
  }
  return best;
}

std::vector<std::string> restore_neural(const Seq2SeqModel& model,
                                        const std::vector<std::string>& source,
                                        int beam) {
  if (beam < 1) throw std::invalid_argument("restore_neural: beam must be >= 1");
  if (source.empty()) return {};
  const auto src_ids = model.source_ids(source);
  const std::size_t cap = 2 * source.size();
  EncodeResult enc = model.encode(src_ids);

  struct Hyp {
    std::vector<std::int32_t> emitted;
    std::vector<double> hidden;
    double logp = 0.0;
    bool done = false;
  };

  std::vector<Hyp> beam_set{{{}, enc.summary, 0.0, false}};
  for (std::size_t step = 0; step <= cap; ++step) {
    bool all_done = true;
    std::vector<Hyp> expanded;
    for (const auto& hyp : beam_set) {
      if (hyp.done || hyp.emitted.size() >= cap) {
        Hyp frozen = hyp;
        frozen.done = true;
        expanded.push_back(std::move(frozen));
        continue;
      }
      all_done = false;
      const std::int32_t prev =
          hyp.emitted.empty() ? Seq2SeqVocab::kBos : hyp.emitted.back();
      StepResult sr = model.decode_step(prev, hyp.hidden);
      // top `beam` next tokens
      std::vector<std::int32_t> ids(sr.probs.size());
      for (std::size_t i = 0; i < ids.size(); ++i)
        ids[i] = static_cast<std::int32_t>(i);
      const int take =
          std::min<int>(beam, static_cast<int>(ids.size()));
      std::partial_sort(ids.begin(), ids.begin() + take, ids.end(),
                        [&](std::int32_t a, std::int32_t b) {
                          if (sr.probs[a] != sr.probs[b])
                            return sr.probs[a] > sr.probs[b];
                          return a < b;
                        });
      for (int k = 0; k < take; ++k) {
        Hyp next = hyp;
        next.logp += std::log(sr.probs[ids[k]]);
        if (ids[k] == Seq2SeqVocab::kEos) {
          next.done = true;
        } else {
          next.emitted.push_back(ids[k]);
          next.hidden = sr.hidden;
        }
        expanded.push_back(std::move(next));
      }
    }
    // keep the best `beam` by running log probability
    std::sort(expanded.begin(), expanded.end(), [](const Hyp& a, const Hyp& b) {
      if (a.logp != b.logp) return a.logp > b.logp;
      return a.emitted < b.emitted;
    });
    if (static_cast<int>(expanded.size()) > beam) expanded.resize(beam);
    beam_set = std::move(expanded);
    if (all_done) break;
  }

  // length-normalized final choice
  const Hyp* best = nullptr;
  double best_norm = -std::numeric_limits<double>::infinity();
  for (const auto& hyp : beam_set) {
    const double norm =
        hyp.logp / static_cast<double>(hyp.emitted.size() + 1);
    if (!best || norm > best_norm ||
        (norm == best_norm && hyp.emitted < best->emitted)) {
      best = &hyp;
      best_norm = norm;
    }
  }

  std::vector<std::string> out;
  out.reserve(best->emitted.size());
  for (std::size_t j = 0; j < best->emitted.size(); ++j) {
    const std::int32_t id = best->emitted[j];
    if (id == Seq2SeqVocab::kUnk || id == Seq2SeqVocab::kPad)
      out.push_back(source[std::min(j, source.size() - 1)]);
    else
      out.push_back(model.target_vocab().token(id));
  }
  return out;
}

double gradient_check(Seq2SeqModel& model, const SentencePair& pair,
                      double epsilon, const GradCheckOptions& options) {
  if (epsilon < 1e-6 || epsilon > 1e-4)
    throw std::invalid_argument("gradient_check: epsilon must be in [1e-6, 1e-4]");
  const auto src = model.source_ids(pair.source);
  const auto tgt = model.target_ids(pair.target);
  const double scale = 1.0 / static_cast<double>(tgt.size() + 1);

  Seq2SeqModel::Gradients grads;
  grads.resize_like(model);
  grads.zero();
  model.accumulate_pair_gradients(src, tgt, grads, scale);
  if (options.corrupt_projection_scale != 1.0)
    for (double& g : grads.w_out.v) g *= options.corrupt_projection_scale;

  auto params = model.tensors();
  auto gflat = grads.flat();
  std::size_t total = 0;
  for (auto& [name, t] : params) {
    (void)name;
    total += t->v.size();
  }

  std::mt19937_64 rng(options.seed);
  double max_rel = 0.0;
  for (int s = 0; s < options.samples; ++s) {
    std::size_t flat_index = rng() % total;
    std::size_t tensor_index = 0;
    while (flat_index >= params[tensor_index].second->v.size()) {
      flat_index -= params[tensor_index].second->v.size();
      ++tensor_index;
    }
    double& theta = params[tensor_index].second->v[flat_index];
    const double saved = theta;
    theta = saved + epsilon;
    const double loss_plus = model.pair_loss(src, tgt);
    theta = saved - epsilon;
    const double loss_minus = model.pair_loss(src, tgt);
    theta = saved;
    const double numeric = (loss_plus - loss_minus) / (2.0 * epsilon);
    const double analytic = gflat[tensor_index]->v[flat_index];
    // The floor keeps central-difference cancellation noise (~1e-10 here)
    // from dominating coordinates whose true gradient is near zero.
    const double rel = std::abs(analytic - numeric) /
                       std::max(1e-3, std::abs(analytic) + std::abs(numeric));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

namespace {

void write_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ostream& out, T value) {
  write_bytes(out, &value, sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* section) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in)
    throw std::runtime_error(std::string("model load: truncated ") + section);
  return value;
}

void write_vocab(std::ostream& out, const Seq2SeqVocab& vocab) {
  std::string blob;
  for (const auto& tok : vocab.tokens()) {
    blob += tok;
    blob.push_back('\n');
  }
  write_pod<std::uint64_t>(out, blob.size());
  write_bytes(out, blob.data(), blob.size());
}

Seq2SeqVocab read_vocab(std::istream& in, std::size_t expected,
                        const char* section) {
  const auto n = read_pod<std::uint64_t>(in, section);
  std::string blob(n, '\0');
  in.read(blob.data(), static_cast<std::streamsize>(n));
  if (!in)
    throw std::runtime_error(std::string("model load: truncated ") + section);
  std::vector<std::string> tokens;
  std::size_t start = 0;
  for (std::size_t i = 0; i < blob.size(); ++i) {
    if (blob[i] == '\n') {
      tokens.push_back(blob.substr(start, i - start));
      start = i + 1;
    }
  }
  if (tokens.size() != expected)
    throw std::runtime_error(std::string("model load: ") + section +
                             " entry count disagrees with header");
  return Seq2SeqVocab::from_tokens(std::move(tokens));
}

}  // namespace

void Seq2SeqModel::save(std::ostream& out) const {
  write_bytes(out, kMagic, 4);
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint32_t>(out, kEndianTag);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(embed_));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(hidden_));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(src_vocab_.size()));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tgt_vocab_.size()));
  write_pod<std::uint64_t>(out, src_vocab_.fingerprint());
  write_pod<std::uint64_t>(out, tgt_vocab_.fingerprint());
  write_vocab(out, src_vocab_);
  write_vocab(out, tgt_vocab_);
  for (const auto& [name, tensor] : tensors()) {
    (void)name;
    write_pod<std::uint64_t>(out, tensor->v.size());
    write_bytes(out, tensor->v.data(), tensor->v.size() * sizeof(double));
  }
}

void Seq2SeqModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  save(out);
}

Seq2SeqModel Seq2SeqModel::load(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("model load: bad magic in header");
  const auto version = read_pod<std::uint32_t>(in, "header");
  if (version != kVersion)
    throw std::runtime_error("model load: unsupported version " +
                             std::to_string(version));
  if (read_pod<std::uint32_t>(in, "header") != kEndianTag)
    throw std::runtime_error("model load: endianness mismatch in header");
  const auto embed = read_pod<std::uint32_t>(in, "header");
  const auto hidden = read_pod<std::uint32_t>(in, "header");
  const auto n_src = read_pod<std::uint32_t>(in, "header");
  const auto n_tgt = read_pod<std::uint32_t>(in, "header");
  const auto hash_src = read_pod<std::uint64_t>(in, "header");
  const auto hash_tgt = read_pod<std::uint64_t>(in, "header");

  Seq2SeqVocab src_vocab = read_vocab(in, n_src, "source vocab");
  Seq2SeqVocab tgt_vocab = read_vocab(in, n_tgt, "target vocab");
  if (src_vocab.fingerprint() != hash_src)
    throw std::runtime_error("model load: source vocab hash mismatch");
  if (tgt_vocab.fingerprint() != hash_tgt)
    throw std::runtime_error("model load: target vocab hash mismatch");

  Seq2SeqConfig config;
  config.embed_dim = static_cast<int>(embed);
  config.hidden_dim = static_cast<int>(hidden);
  Seq2SeqModel model(std::move(src_vocab), std::move(tgt_vocab), config, 0);
  for (auto& [name, tensor] : model.tensors()) {
    const auto n = read_pod<std::uint64_t>(in, name.c_str());
    if (n != tensor->v.size())
      throw std::runtime_error("model load: tensor " + name +
                               " has wrong element count");
    in.read(reinterpret_cast<char*>(tensor->v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in)
      throw std::runtime_error("model load: truncated tensor " + name);
  }
  return model;
}

Seq2SeqModel Seq2SeqModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in);
}

}  // namespace vdr
