#include "bee/transformer.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "bee/kernels.hpp"
#include "bee/rng.hpp"

namespace bee {

using nlohmann::json;
namespace k = bee::kernels;

namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;
constexpr double kLnEps = 1e-5;

double gelu(double x) {
  const double u = kGeluC * (x + kGeluA * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(u));
}

double gelu_grad(double x) {
  const double u = kGeluC * (x + kGeluA * x * x * x);
  const double t = std::tanh(u);
  const double du = kGeluC * (1.0 + 3.0 * kGeluA * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

}  // namespace

std::vector<std::string> byte_level_vocab() {
  std::vector<std::string> v;
  v.push_back("[UNK]");
  for (int c = 0; c < 256; ++c) v.push_back(std::string(1, static_cast<char>(c)));
  for (int c = 0; c < 256; ++c) v.push_back("##" + std::string(1, static_cast<char>(c)));
  return v;
}

std::vector<Param*> TransformerEncoder::Block::all() {
  return {&wq, &wk, &wv, &wo, &bq, &bk, &bv, &bo, &ln1_g, &ln1_b, &wf1, &bf1, &wf2, &bf2, &ln2_g, &ln2_b};
}

TransformerEncoder::TransformerEncoder(TransformerConfig cfg, std::vector<std::string> vocab)
    : cfg_(cfg), vocab_(vocab.empty() ? byte_level_vocab() : std::move(vocab)) {
  if (cfg_.d_model % cfg_.n_heads != 0) throw ShapeError("d_model must divide by n_heads");
  for (size_t i = 0; i < vocab_.size(); ++i) {
    piece_ids_[vocab_[i]] = static_cast<int>(i);
    size_t body = vocab_[i].rfind("##", 0) == 0 ? vocab_[i].size() - 2 : vocab_[i].size();
    max_piece_chars_ = std::max(max_piece_chars_, body);
  }
  auto unk = piece_ids_.find("[UNK]");
  if (unk == piece_ids_.end()) throw ParseError("vocabulary lacks [UNK]");
  unk_id_ = unk->second;

  const int d = cfg_.d_model;
  Rng rng(cfg_.seed);
  auto make = [&](const std::string& name, int r, int c, double scale) {
    Param p(name, r, c);
    init_uniform(p.value, rng, scale);
    return p;
  };
  const double emb_scale = 1.0 / std::sqrt(static_cast<double>(d));
  tok_emb_ = make("enc.tok_emb", static_cast<int>(vocab_.size()), d, emb_scale);
  pos_emb_ = make("enc.pos_emb", cfg_.max_pieces, d, emb_scale);

  const double ds = 1.0 / std::sqrt(static_cast<double>(d));
  for (int l = 0; l < cfg_.n_layers; ++l) {
    const std::string pre = "enc.block" + std::to_string(l) + ".";
    Block b;
    b.wq = make(pre + "wq", d, d, ds);
    b.wk = make(pre + "wk", d, d, ds);
    b.wv = make(pre + "wv", d, d, ds);
    b.wo = make(pre + "wo", d, d, ds);
    b.bq = Param(pre + "bq", 1, d);
    b.bk = Param(pre + "bk", 1, d);
    b.bv = Param(pre + "bv", 1, d);
    b.bo = Param(pre + "bo", 1, d);
    b.ln1_g = Param(pre + "ln1_g", 1, d);
    b.ln1_g.value.fill(1.0);
    b.ln1_b = Param(pre + "ln1_b", 1, d);
    b.wf1 = make(pre + "wf1", d, cfg_.d_ff, ds);
    b.bf1 = Param(pre + "bf1", 1, cfg_.d_ff);
    b.wf2 = make(pre + "wf2", cfg_.d_ff, d, 1.0 / std::sqrt(static_cast<double>(cfg_.d_ff)));
    b.bf2 = Param(pre + "bf2", 1, d);
    b.ln2_g = Param(pre + "ln2_g", 1, d);
    b.ln2_g.value.fill(1.0);
    b.ln2_b = Param(pre + "ln2_b", 1, d);
    blocks_.push_back(std::move(b));
  }
}

std::pair<std::vector<int>, SubwordAlignment> TransformerEncoder::tokenize(
    const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  SubwordAlignment align;
  for (const auto& tok : tokens) {
    std::vector<int> piece_list;
    std::vector<int> tok_ids;
    size_t i = 0;
    bool failed = tok.empty();
    while (i < tok.size()) {
      size_t best = 0;
      int best_id = -1;
      const size_t remaining = tok.size() - i;
      for (size_t len = std::min(max_piece_chars_, remaining); len >= 1; --len) {
        std::string cand = tok.substr(i, len);
        if (i > 0) cand = "##" + cand;
        auto it = piece_ids_.find(cand);
        if (it != piece_ids_.end()) {
          best = len;
          best_id = it->second;
          break;
        }
      }
      if (best_id < 0) {
        failed = true;
        break;
      }
      tok_ids.push_back(best_id);
      i += best;
    }
    if (failed) tok_ids = {unk_id_};
    for (int id : tok_ids) {
      piece_list.push_back(static_cast<int>(ids.size()));
      ids.push_back(id);
    }
    align.pieces_per_token.push_back(std::move(piece_list));
  }
  return {std::move(ids), std::move(align)};
}

namespace {

Matrix layer_norm(const Matrix& x, const Matrix& g, const Matrix& b, Matrix* xhat_out,
                  std::vector<double>* inv_std_out) {
  Matrix y(x.rows, x.cols);
  Matrix xhat(x.rows, x.cols);
  std::vector<double> inv_std(x.rows);
  for (int i = 0; i < x.rows; ++i) {
    double mean = 0.0;
    for (int j = 0; j < x.cols; ++j) mean += x(i, j);
    mean /= x.cols;
    double var = 0.0;
    for (int j = 0; j < x.cols; ++j) {
      const double c = x(i, j) - mean;
      var += c * c;
    }
    var /= x.cols;
    const double is = 1.0 / std::sqrt(var + kLnEps);
    inv_std[i] = is;
    for (int j = 0; j < x.cols; ++j) {
      xhat(i, j) = (x(i, j) - mean) * is;
      y(i, j) = xhat(i, j) * g.data[j] + b.data[j];
    }
  }
  if (xhat_out) *xhat_out = std::move(xhat);
  if (inv_std_out) *inv_std_out = std::move(inv_std);
  return y;
}

// dx for y = g*xhat + b given dy; accumulates dg, db when given.
Matrix layer_norm_backward(const Matrix& dy, const Matrix& xhat, const std::vector<double>& inv_std,
                           const Matrix& g, Matrix* dg, Matrix* db) {
  Matrix dx(dy.rows, dy.cols);
  const int n = dy.cols;
  for (int i = 0; i < dy.rows; ++i) {
    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
    for (int j = 0; j < n; ++j) {
      const double dxh = dy(i, j) * g.data[j];
      mean_dxhat += dxh;
      mean_dxhat_xhat += dxh * xhat(i, j);
      if (dg) dg->data[j] += dy(i, j) * xhat(i, j);
      if (db) db->data[j] += dy(i, j);
    }
    mean_dxhat /= n;
    mean_dxhat_xhat /= n;
    for (int j = 0; j < n; ++j) {
      const double dxh = dy(i, j) * g.data[j];
      dx(i, j) = inv_std[i] * (dxh - mean_dxhat - xhat(i, j) * mean_dxhat_xhat);
    }
  }
  return dx;
}

Matrix slice_cols(const Matrix& m, int from, int width) {
  Matrix out(m.rows, width);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < width; ++j) out(i, j) = m(i, from + j);
  return out;
}

void add_into_cols(Matrix& dst, const Matrix& src, int from) {
  for (int i = 0; i < src.rows; ++i)
    for (int j = 0; j < src.cols; ++j) dst(i, from + j) += src(i, j);
}

}  // namespace

Matrix TransformerEncoder::block_forward(const Block& b, const Matrix& x, BlockCache* cache) const {
  const int d = cfg_.d_model;
  const int h = cfg_.n_heads;
  const int dk = d / h;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  Matrix q, kk, v;
  k::matmul(x, b.wq.value, q);
  k::add_row_bias(q, b.bq.value);
  k::matmul(x, b.wk.value, kk);
  k::add_row_bias(kk, b.bk.value);
  k::matmul(x, b.wv.value, v);
  k::add_row_bias(v, b.bv.value);

  Matrix attn_out(x.rows, d);
  std::vector<Matrix> attn(h);
  for (int hi = 0; hi < h; ++hi) {
    Matrix qh = slice_cols(q, hi * dk, dk);
    Matrix kh = slice_cols(kk, hi * dk, dk);
    Matrix vh = slice_cols(v, hi * dk, dk);
    Matrix scores;
    k::matmul_a_bt(qh, kh, scores);
    for (auto& s : scores.data) s *= scale;
    Matrix p;
    k::softmax_rows(scores, p);
    Matrix oh;
    k::matmul(p, vh, oh);
    add_into_cols(attn_out, oh, hi * dk);
    attn[hi] = std::move(p);
  }

  Matrix proj;
  k::matmul(attn_out, b.wo.value, proj);
  k::add_row_bias(proj, b.bo.value);

  Matrix res1 = x;
  for (int i = 0; i < res1.size(); ++i) res1.data[i] += proj.data[i];

  Matrix ln1_xhat;
  std::vector<double> ln1_is;
  Matrix x_mid = layer_norm(res1, b.ln1_g.value, b.ln1_b.value, &ln1_xhat, &ln1_is);

  Matrix ff_pre;
  k::matmul(x_mid, b.wf1.value, ff_pre);
  k::add_row_bias(ff_pre, b.bf1.value);
  Matrix ff_act(ff_pre.rows, ff_pre.cols);
  for (int i = 0; i < ff_pre.size(); ++i) ff_act.data[i] = gelu(ff_pre.data[i]);
  Matrix ff_out;
  k::matmul(ff_act, b.wf2.value, ff_out);
  k::add_row_bias(ff_out, b.bf2.value);

  Matrix res2 = x_mid;
  for (int i = 0; i < res2.size(); ++i) res2.data[i] += ff_out.data[i];

  Matrix ln2_xhat;
  std::vector<double> ln2_is;
  Matrix out = layer_norm(res2, b.ln2_g.value, b.ln2_b.value, &ln2_xhat, &ln2_is);

  if (cache) {
    cache->x_in = x;
    cache->q = std::move(q);
    cache->k = std::move(kk);
    cache->v = std::move(v);
    cache->attn = std::move(attn);
    cache->attn_out = std::move(attn_out);
    cache->res1 = std::move(res1);
    cache->ln1 = {std::move(ln1_xhat), std::move(ln1_is)};
    cache->x_mid = x_mid;
    cache->ff_pre = std::move(ff_pre);
    cache->ff_act = std::move(ff_act);
    cache->res2 = std::move(res2);
    cache->ln2 = {std::move(ln2_xhat), std::move(ln2_is)};
  }
  return out;
}

Matrix TransformerEncoder::block_backward(Block& b, const BlockCache& cache, const Matrix& d_out,
                                          bool train_params) {
  const int d = cfg_.d_model;
  const int h = cfg_.n_heads;
  const int dk = d / h;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  Matrix* dg2 = train_params ? &b.ln2_g.grad : nullptr;
  Matrix* db2 = train_params ? &b.ln2_b.grad : nullptr;
  Matrix d_res2 = layer_norm_backward(d_out, cache.ln2.xhat, cache.ln2.inv_std, b.ln2_g.value, dg2, db2);

  // res2 = x_mid + ff_out
  const Matrix& d_ff_out = d_res2;
  Matrix d_ff_act;
  k::matmul_a_bt(d_ff_out, b.wf2.value, d_ff_act);
  if (train_params) {
    Matrix dwf2, dbf2;
    k::matmul_at_b(cache.ff_act, d_ff_out, dwf2);
    k::col_sums(d_ff_out, dbf2);
    for (int i = 0; i < dwf2.size(); ++i) b.wf2.grad.data[i] += dwf2.data[i];
    for (int i = 0; i < dbf2.size(); ++i) b.bf2.grad.data[i] += dbf2.data[i];
  }
  Matrix d_ff_pre(d_ff_act.rows, d_ff_act.cols);
  for (int i = 0; i < d_ff_pre.size(); ++i)
    d_ff_pre.data[i] = d_ff_act.data[i] * gelu_grad(cache.ff_pre.data[i]);
  Matrix d_x_mid;
  k::matmul_a_bt(d_ff_pre, b.wf1.value, d_x_mid);
  if (train_params) {
    Matrix dwf1, dbf1;
    k::matmul_at_b(cache.x_mid, d_ff_pre, dwf1);
    k::col_sums(d_ff_pre, dbf1);
    for (int i = 0; i < dwf1.size(); ++i) b.wf1.grad.data[i] += dwf1.data[i];
    for (int i = 0; i < dbf1.size(); ++i) b.bf1.grad.data[i] += dbf1.data[i];
  }
  for (int i = 0; i < d_x_mid.size(); ++i) d_x_mid.data[i] += d_res2.data[i];

  Matrix* dg1 = train_params ? &b.ln1_g.grad : nullptr;
  Matrix* db1 = train_params ? &b.ln1_b.grad : nullptr;
  Matrix d_res1 = layer_norm_backward(d_x_mid, cache.ln1.xhat, cache.ln1.inv_std, b.ln1_g.value, dg1, db1);

  // res1 = x_in + proj
  const Matrix& d_proj = d_res1;
  Matrix d_attn_out;
  k::matmul_a_bt(d_proj, b.wo.value, d_attn_out);
  if (train_params) {
    Matrix dwo, dbo;
    k::matmul_at_b(cache.attn_out, d_proj, dwo);
    k::col_sums(d_proj, dbo);
    for (int i = 0; i < dwo.size(); ++i) b.wo.grad.data[i] += dwo.data[i];
    for (int i = 0; i < dbo.size(); ++i) b.bo.grad.data[i] += dbo.data[i];
  }

  Matrix dq(cache.q.rows, d), dkm(cache.q.rows, d), dv(cache.q.rows, d);
  for (int hi = 0; hi < h; ++hi) {
    Matrix d_oh = slice_cols(d_attn_out, hi * dk, dk);
    Matrix vh = slice_cols(cache.v, hi * dk, dk);
    Matrix qh = slice_cols(cache.q, hi * dk, dk);
    Matrix kh = slice_cols(cache.k, hi * dk, dk);
    const Matrix& p = cache.attn[hi];

    Matrix dp;
    k::matmul_a_bt(d_oh, vh, dp);
    Matrix dvh;
    k::matmul_at_b(p, d_oh, dvh);

    // softmax rows backward: ds = p ⊙ (dp − rowdot(dp, p))
    Matrix ds(p.rows, p.cols);
    for (int i = 0; i < p.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < p.cols; ++j) dot += dp(i, j) * p(i, j);
      for (int j = 0; j < p.cols; ++j) ds(i, j) = p(i, j) * (dp(i, j) - dot);
    }
    for (auto& x : ds.data) x *= scale;

    Matrix dqh, dkh;
    k::matmul(ds, kh, dqh);
    k::matmul_at_b(ds, qh, dkh);
    add_into_cols(dq, dqh, hi * dk);
    add_into_cols(dkm, dkh, hi * dk);
    add_into_cols(dv, dvh, hi * dk);
  }

  Matrix d_x = d_res1;
  auto proj_backward = [&](Param& w, Param& bias, const Matrix& d_p) {
    if (train_params) {
      Matrix dw, db;
      k::matmul_at_b(cache.x_in, d_p, dw);
      k::col_sums(d_p, db);
      for (int i = 0; i < dw.size(); ++i) w.grad.data[i] += dw.data[i];
      for (int i = 0; i < db.size(); ++i) bias.grad.data[i] += db.data[i];
    }
    Matrix dx_part;
    k::matmul_a_bt(d_p, w.value, dx_part);
    for (int i = 0; i < d_x.size(); ++i) d_x.data[i] += dx_part.data[i];
  };
  proj_backward(b.wq, b.bq, dq);
  proj_backward(b.wk, b.bk, dkm);
  proj_backward(b.wv, b.bv, dv);

  return d_x;
}

Matrix TransformerEncoder::forward_pieces(const std::vector<int>& piece_ids,
                                          std::vector<BlockCache>* caches) const {
  const int m = static_cast<int>(piece_ids.size());
  Matrix x(m, cfg_.d_model);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < cfg_.d_model; ++j)
      x(i, j) = tok_emb_.value(piece_ids[i], j) + pos_emb_.value(i, j);
  if (caches) caches->resize(blocks_.size());
  for (size_t l = 0; l < blocks_.size(); ++l)
    x = block_forward(blocks_[l], x, caches ? &(*caches)[l] : nullptr);
  return x;
}

EncoderOutput TransformerEncoder::encode(const std::vector<std::string>& tokens,
                                         const std::string& sentence_id) const {
  if (tokens.empty()) throw ShapeError("encode called on empty token list");
  auto [pieces, align] = tokenize(tokens);
  check_sequence_length(static_cast<int>(pieces.size()), cfg_.max_pieces, sentence_id);
  Matrix piece_out = forward_pieces(pieces, nullptr);
  return pool_subwords(piece_out, align);
}

EncoderOutput TransformerEncoder::encode_train(const std::vector<std::string>& tokens,
                                               const std::string& sentence_id) {
  if (tokens.empty()) throw ShapeError("encode called on empty token list");
  auto [pieces, align] = tokenize(tokens);
  check_sequence_length(static_cast<int>(pieces.size()), cfg_.max_pieces, sentence_id);
  cached_pieces_ = pieces;
  cached_alignment_ = align;
  Matrix piece_out = forward_pieces(pieces, &cached_blocks_);
  return pool_subwords(piece_out, cached_alignment_);
}

void TransformerEncoder::backward(const Matrix& d_tokens) {
  if (scope_ == TrainScope::heads_only) return;
  if (cached_blocks_.empty()) throw ContractViolation("backward without encode_train");

  // Undo first-piece pooling.
  Matrix d_pieces(static_cast<int>(cached_pieces_.size()), cfg_.d_model);
  for (size_t t = 0; t < cached_alignment_.pieces_per_token.size(); ++t) {
    const int first = cached_alignment_.pieces_per_token[t].front();
    for (int j = 0; j < cfg_.d_model; ++j) d_pieces(first, j) += d_tokens(static_cast<int>(t), j);
  }

  const int last = static_cast<int>(blocks_.size()) - 1;
  const int stop = scope_ == TrainScope::all ? 0 : last;
  Matrix d = std::move(d_pieces);
  for (int l = last; l >= stop; --l) {
    const bool train_params = scope_ == TrainScope::all || l == last;
    d = block_backward(blocks_[l], cached_blocks_[l], d, train_params);
  }
  if (scope_ == TrainScope::all) {
    for (size_t i = 0; i < cached_pieces_.size(); ++i)
      for (int j = 0; j < cfg_.d_model; ++j) {
        tok_emb_.grad(cached_pieces_[i], j) += d(static_cast<int>(i), j);
        pos_emb_.grad(static_cast<int>(i), j) += d(static_cast<int>(i), j);
      }
  }
}

std::vector<Param*> TransformerEncoder::params() {
  std::vector<Param*> out{&tok_emb_, &pos_emb_};
  for (auto& b : blocks_)
    for (Param* p : b.all()) out.push_back(p);
  return out;
}

std::vector<Param*> TransformerEncoder::trainable_params() {
  switch (scope_) {
    case TrainScope::heads_only:
      return {};
    case TrainScope::last_encoder_layer_plus_heads:
      return blocks_.back().all();
    case TrainScope::all:
      return params();
  }
  return {};
}

void TransformerEncoder::save_weights(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open weights file for writing: " + path);
  json header;
  header["d_model"] = cfg_.d_model;
  header["n_heads"] = cfg_.n_heads;
  header["n_layers"] = cfg_.n_layers;
  header["d_ff"] = cfg_.d_ff;
  header["max_pieces"] = cfg_.max_pieces;
  // Pieces hold raw bytes (not necessarily UTF-8), so serialize as byte arrays.
  json vocab_bytes = json::array();
  for (const std::string& piece : vocab_) {
    json arr = json::array();
    for (unsigned char c : piece) arr.push_back(static_cast<int>(c));
    vocab_bytes.push_back(std::move(arr));
  }
  header["vocab"] = std::move(vocab_bytes);
  const std::string hs = header.dump();
  out.write("BEEWTS01", 8);
  const uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));

  for (Param* p : params()) {
    const int32_t r = p->value.rows, c = p->value.cols;
    out.write(reinterpret_cast<const char*>(&r), sizeof(r));
    out.write(reinterpret_cast<const char*>(&c), sizeof(c));
    out.write(reinterpret_cast<const char*>(p->value.data.data()),
              static_cast<std::streamsize>(p->value.data.size() * sizeof(double)));
  }
}

std::unique_ptr<TransformerEncoder> TransformerEncoder::from_weights_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open weights file " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "BEEWTS01", 8) != 0)
    throw ParseError("bad weights file magic in " + path);
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  json header = json::parse(hs);

  TransformerConfig cfg;
  cfg.d_model = header["d_model"].get<int>();
  cfg.n_heads = header["n_heads"].get<int>();
  cfg.n_layers = header["n_layers"].get<int>();
  cfg.d_ff = header["d_ff"].get<int>();
  cfg.max_pieces = header["max_pieces"].get<int>();
  std::vector<std::string> vocab;
  for (const json& arr : header["vocab"]) {
    std::string piece;
    for (const json& c : arr) piece.push_back(static_cast<char>(c.get<int>()));
    vocab.push_back(std::move(piece));
  }
  auto enc = std::make_unique<TransformerEncoder>(cfg, std::move(vocab));

  for (Param* p : enc->params()) {
    int32_t r = 0, c = 0;
    in.read(reinterpret_cast<char*>(&r), sizeof(r));
    in.read(reinterpret_cast<char*>(&c), sizeof(c));
    if (!in || r != p->value.rows || c != p->value.cols)
      throw IncompatibilityError("weights file " + path + ": tensor " + p->name + " has shape " +
                                 std::to_string(r) + "x" + std::to_string(c) + ", expected " +
                                 std::to_string(p->value.rows) + "x" + std::to_string(p->value.cols));
    in.read(reinterpret_cast<char*>(p->value.data.data()),
            static_cast<std::streamsize>(p->value.data.size() * sizeof(double)));
  }
  if (!in) throw ParseError("weights file " + path + " truncated");
  return enc;
}

}  // namespace bee
