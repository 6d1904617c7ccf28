#include "bee/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "bee/rng.hpp"
#include "bee/transformer.hpp"

namespace bee {

std::vector<Param*> Model::core_params() {
  std::vector<Param*> out;
  if (gnn_enabled)
    for (Param* p : gcn.all()) out.push_back(p);
  for (Param* p : mlps.all()) out.push_back(p);
  for (Param* p : tag_head.all()) out.push_back(p);
  for (Param* p : pair_head.all()) out.push_back(p);
  return out;
}

std::vector<Param*> Model::all_params() {
  std::vector<Param*> out = encoder->params();
  for (Param* p : core_params()) out.push_back(p);
  return out;
}

Model build_model(const RunConfig& cfg, const TypeInventory& inv,
                  const std::vector<std::string>* encoder_vocab) {
  Model m;
  m.inventory = inv;
  m.tag_vocab = build_tag_vocabulary(inv);
  m.role_vocab = build_role_vocabulary(inv);
  m.gnn_enabled = cfg.gnn_enabled;

  Rng root(cfg.seed);
  Rng enc_rng = root.fork(fnv1a64("encoder"));
  Rng gcn_rng = root.fork(fnv1a64("gcn"));
  Rng mlp_rng = root.fork(fnv1a64("mlp"));
  Rng head_rng = root.fork(fnv1a64("heads"));

  if (cfg.encoder_kind == "toy") {
    m.encoder = std::make_unique<ToyEncoder>(cfg.encoder_dim, cfg.encoder_max_len, enc_rng.state);
  } else if (cfg.encoder_kind == "pretrained") {
    if (!cfg.encoder_model_name.empty()) {
      auto enc = TransformerEncoder::from_weights_file(cfg.encoder_model_name);
      if (enc->dim() != cfg.encoder_dim)
        throw IncompatibilityError("weights file dim " + std::to_string(enc->dim()) +
                                   " != encoder.dim " + std::to_string(cfg.encoder_dim));
      m.encoder = std::move(enc);
    } else {
      TransformerConfig tc;
      tc.d_model = cfg.encoder_dim;
      tc.n_heads = cfg.encoder_n_heads;
      tc.n_layers = cfg.encoder_n_layers;
      tc.d_ff = cfg.encoder_ff_dim;
      tc.max_pieces = cfg.encoder_max_len;
      tc.seed = enc_rng.state;
      m.encoder = std::make_unique<TransformerEncoder>(
          tc, encoder_vocab ? *encoder_vocab : std::vector<std::string>{});
    }
  } else {
    throw ParseError("unknown encoder.kind '" + cfg.encoder_kind + "'");
  }
  m.encoder->set_trainable_scope(train_scope_from_string(cfg.train_scope));

  const int d = m.encoder->dim();
  int rep = d;
  if (cfg.gnn_enabled) {
    m.gcn = GcnParams(d, cfg.gnn_hidden_dim, cfg.gnn_hidden_dim, gcn_rng);
    rep = cfg.gnn_hidden_dim;
  }
  m.mlps = HeadDepParams(rep, cfg.mlp_hidden_dim, cfg.mlp_out_dim, mlp_rng);
  m.tag_head = TagHeadParams(rep, static_cast<int>(m.tag_vocab.size()), head_rng);
  m.pair_head = PairHeadParams(head_mode_from_string(cfg.head_mode), cfg.mlp_out_dim,
                               static_cast<int>(m.role_vocab.size()), head_rng);
  return m;
}

namespace {

double safe_log(double p) { return std::log(std::max(p, 1e-300)); }

int index_of(const std::vector<std::string>& vocab, const std::string& item,
             const char* what) {
  auto it = std::find(vocab.begin(), vocab.end(), item);
  if (it == vocab.end()) throw DecodeError(std::string(what) + " '" + item + "' not in vocabulary");
  return static_cast<int>(it - vocab.begin());
}

Matrix take_row(const Matrix& m, int i) {
  Matrix out(1, m.cols);
  for (int j = 0; j < m.cols; ++j) out.data[j] = m(i, j);
  return out;
}

std::vector<std::string> token_texts(const Sentence& s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const Token& t : s.tokens) out.push_back(t.text);
  return out;
}

// Stacks MLP inputs for a pair batch: row p = mean of the mention's token rows.
void build_pair_inputs(const Matrix& reps, const Sentence& s,
                       const std::vector<CandidatePair>& pairs, Matrix& h_in, Matrix& d_in) {
  const int np = static_cast<int>(pairs.size());
  h_in = Matrix(np, reps.cols);
  d_in = Matrix(np, reps.cols);
  for (int p = 0; p < np; ++p) {
    const Mention* head = s.find_mention(pairs[p].head_mention);
    const Mention* dep = s.find_mention(pairs[p].dep_mention);
    if (!head || !dep) throw ReferenceError("candidate pair references a missing mention");
    Matrix hv = mention_mean(reps, head->token_start, head->token_end);
    Matrix dv = mention_mean(reps, dep->token_start, dep->token_end);
    for (int j = 0; j < reps.cols; ++j) {
      h_in(p, j) = hv.data[j];
      d_in(p, j) = dv.data[j];
    }
  }
}

}  // namespace

SentenceLoss train_step_sentence(Model& m, const Sentence& s, const DepGraph* g, double lambda) {
  SentenceLoss loss;
  const int n = s.size();
  if (n == 0) return loss;

  EncoderOutput enc = m.encoder->encode_train(token_texts(s), s.doc_id);
  GcnCache gcache;
  Matrix reps = embed(enc, m.gnn_enabled ? g : nullptr, m.gcn, &gcache);

  // tag loss: mean cross-entropy over tokens
  TagSequence gold = encode_tags(s);
  TagHeadCache tcache;
  Matrix tag_probs = tag_distribution(reps, m.tag_head, &tcache);
  Matrix d_tag_act(tag_probs.rows, tag_probs.cols);
  for (int i = 0; i < n; ++i) {
    const int t = index_of(m.tag_vocab, gold.tags[i], "tag");
    loss.tag -= safe_log(tag_probs(i, t));
    for (int j = 0; j < tag_probs.cols; ++j)
      d_tag_act(i, j) = (tag_probs(i, j) - (j == t ? 1.0 : 0.0)) / n;
  }
  loss.tag /= n;
  Matrix d_reps = tag_backward(d_tag_act, m.tag_head, tcache);

  // pair loss: mean cross-entropy over gold-trigger candidate pairs
  const auto pairs = generate_candidate_pairs(s, s.triggers(), s.mentions);
  if (!pairs.empty()) {
    const int np = static_cast<int>(pairs.size());
    Matrix h_in, d_in;
    build_pair_inputs(reps, s, pairs, h_in, d_in);
    MlpCache hcache, dcache;
    Matrix h = mlp_forward(h_in, m.mlps.mlp_h, &hcache);
    Matrix d = mlp_forward(d_in, m.mlps.mlp_d, &dcache);
    PairHeadCache pcache;
    Matrix pair_probs = pair_distribution(h, d, m.pair_head, &pcache);

    Matrix d_pair_act(np, pair_probs.cols);
    for (int p = 0; p < np; ++p) {
      const int r = index_of(m.role_vocab, pairs[p].gold_role, "role");
      loss.pair -= safe_log(pair_probs(p, r));
      for (int j = 0; j < pair_probs.cols; ++j)
        d_pair_act(p, j) = lambda * (pair_probs(p, j) - (j == r ? 1.0 : 0.0)) / np;
    }
    loss.pair /= np;

    Matrix dh, dd;
    pair_backward(d_pair_act, m.pair_head, pcache, dh, dd);
    Matrix dh_in = mlp_backward(dh, m.mlps.mlp_h, hcache);
    Matrix dd_in = mlp_backward(dd, m.mlps.mlp_d, dcache);
    for (int p = 0; p < np; ++p) {
      const Mention* head = s.find_mention(pairs[p].head_mention);
      const Mention* dep = s.find_mention(pairs[p].dep_mention);
      mention_mean_backward(take_row(dh_in, p), head->token_start, head->token_end, d_reps);
      mention_mean_backward(take_row(dd_in, p), dep->token_start, dep->token_end, d_reps);
    }
  }

  Matrix d_enc = embed_backward(d_reps, m.gnn_enabled ? g : nullptr, m.gcn, gcache);
  m.encoder->backward(d_enc);
  return loss;
}

namespace {

void track_softmax(const Matrix& probs, double* max_dev) {
  if (!max_dev) return;
  for (int i = 0; i < probs.rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < probs.cols; ++j) sum += probs(i, j);
    *max_dev = std::max(*max_dev, std::abs(sum - 1.0));
  }
}

}  // namespace

std::vector<Sentence> predict(const Model& m, const std::vector<Sentence>& corpus,
                              const std::vector<std::optional<DepGraph>>& graphs,
                              double* max_softmax_dev) {
  if (m.gnn_enabled && graphs.size() != corpus.size())
    throw AlignmentError("graph list does not match corpus size");
  if (max_softmax_dev) *max_softmax_dev = 0.0;

  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    const Sentence& s = corpus[i];
    Sentence pred;
    pred.doc_id = s.doc_id;
    pred.tokens = s.tokens;
    if (s.size() == 0) {
      out.push_back(std::move(pred));
      continue;
    }
    const DepGraph* g = nullptr;
    if (m.gnn_enabled) {
      if (!graphs[i])
        throw ParseError("no dependency parse for sentence " + std::to_string(i) + " of " +
                         s.doc_id);
      g = &*graphs[i];
    }

    EncoderOutput enc = m.encoder->encode(token_texts(s), s.doc_id);
    Matrix reps = embed(enc, g, m.gcn);
    Matrix tag_probs = tag_distribution(reps, m.tag_head);
    track_softmax(tag_probs, max_softmax_dev);
    pred.mentions = decode_bio(tag_probs, m.tag_vocab, m.inventory);

    const auto triggers = pred.triggers();
    const auto pairs = generate_candidate_pairs(pred, triggers, pred.mentions);
    if (!pairs.empty()) {
      Matrix h_in, d_in;
      build_pair_inputs(reps, pred, pairs, h_in, d_in);
      Matrix h = mlp_forward(h_in, m.mlps.mlp_h);
      Matrix d = mlp_forward(d_in, m.mlps.mlp_d);
      Matrix pair_probs = pair_distribution(h, d, m.pair_head);
      track_softmax(pair_probs, max_softmax_dev);

      std::vector<PredictedEdge> edges;
      for (int p = 0; p < pair_probs.rows; ++p) {
        int best = 0;
        for (int j = 1; j < pair_probs.cols; ++j)
          if (pair_probs(p, j) > pair_probs(p, best)) best = j;
        if (m.role_vocab[best] == NONE_ROLE) continue;
        edges.push_back(
            {pairs[p].head_mention, pairs[p].dep_mention, m.role_vocab[best], pair_probs(p, best)});
      }
      pred.events = assemble_events(triggers, edges);
    }
    out.push_back(std::move(pred));
  }
  return out;
}

}  // namespace bee
