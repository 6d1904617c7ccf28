#include "bee/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "bee/jsonl.hpp"
#include "bee/optim.hpp"
#include "bee/standoff.hpp"

namespace bee {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << content;
}

}  // namespace

LoadedSplit load_split(const std::string& corpus_path, const std::string& parse_path,
                       bool want_graphs) {
  LoadedSplit out;
  out.sentences = load_json_corpus(corpus_path);
  out.graphs.assign(out.sentences.size(), std::nullopt);
  if (!want_graphs) return out;

  const auto inline_edges = load_json_dep_edges(corpus_path);
  std::vector<ConlluSentence> conllu;
  bool have_file = false;
  if (!parse_path.empty()) {
    conllu = parse_conllu(read_file(parse_path));
    have_file = true;
    if (conllu.size() != out.sentences.size())
      throw AlignmentError(parse_path + " has " + std::to_string(conllu.size()) +
                           " parses for " + std::to_string(out.sentences.size()) + " sentences");
  }

  for (size_t i = 0; i < out.sentences.size(); ++i) {
    const int n = out.sentences[i].size();
    const std::vector<DepEdge>* edges = nullptr;
    if (inline_edges[i]) {
      edges = &*inline_edges[i];
    } else if (have_file) {
      if (conllu[i].n != n)
        throw AlignmentError("parse " + std::to_string(i) + " has " +
                             std::to_string(conllu[i].n) + " tokens, sentence has " +
                             std::to_string(n));
      edges = &conllu[i].edges;
    } else {
      throw ParseError("no dependency parse for sentence " + std::to_string(i) + " of " +
                       out.sentences[i].doc_id);
    }
    out.graphs[i] = DepGraph::build(n, *edges);
  }
  return out;
}

MetricsReport evaluate_model(const Model& m, const LoadedSplit& split, double* max_softmax_dev) {
  const auto preds = predict(m, split.sentences, split.graphs, max_softmax_dev);
  return score(split.sentences, preds);
}

MetricsReport evaluate_checkpoint(const Checkpoint& ckpt, const std::string& data_path,
                                  const std::string& parse_path) {
  Model m = model_from_checkpoint(ckpt);
  LoadedSplit split = load_split(data_path, parse_path, m.gnn_enabled);
  return evaluate_model(m, split);
}

TrainOutput train_model(Model& m, const RunConfig& cfg) {
  LoadedSplit tr = load_split(cfg.train_path, cfg.train_parses, cfg.gnn_enabled);
  LoadedSplit dev_storage;
  const LoadedSplit* dev = &tr;
  if (!cfg.dev_path.empty()) {
    dev_storage = load_split(cfg.dev_path, cfg.dev_parses, cfg.gnn_enabled);
    dev = &dev_storage;
  }
  fs::create_directories(cfg.output_dir);

  Adam opt;
  opt.add_all(m.core_params(), cfg.lr);
  opt.add_all(m.encoder->trainable_params(), cfg.encoder_lr);

  const auto params = m.all_params();
  auto snapshot = [&] {
    std::vector<Matrix> copies;
    copies.reserve(params.size());
    for (Param* p : params) copies.push_back(p->value);
    return copies;
  };

  std::vector<EpochMetrics> history;
  std::vector<Matrix> best = snapshot();
  double best_total = -1.0;
  int best_epoch = 0;
  const int n_sentences = static_cast<int>(tr.sentences.size());

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double tag_sum = 0.0, pair_sum = 0.0;
    int in_batch = 0;
    zero_grads(params);
    for (int i = 0; i < n_sentences; ++i) {
      const DepGraph* g = tr.graphs[i] ? &*tr.graphs[i] : nullptr;
      const SentenceLoss l = train_step_sentence(m, tr.sentences[i], g, cfg.lambda);
      tag_sum += l.tag;
      pair_sum += l.pair;
      if (++in_batch >= cfg.batch_size) {
        opt.step();
        zero_grads(params);
        in_batch = 0;
      }
    }
    if (in_batch > 0) {
      opt.step();
      zero_grads(params);
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.tag_loss = n_sentences > 0 ? tag_sum / n_sentences : 0.0;
    em.pair_loss = n_sentences > 0 ? pair_sum / n_sentences : 0.0;
    em.loss = em.tag_loss + cfg.lambda * em.pair_loss;
    em.dev = evaluate_model(m, *dev);
    history.push_back(em);
    write_file(cfg.output_dir + "/metrics.json", metrics_history_to_json(history));

    if (em.dev.total > best_total) {
      best_total = em.dev.total;
      best = snapshot();
      best_epoch = epoch;
    }
  }

  for (size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  return {make_checkpoint(m, cfg, best_epoch, history), history};
}

TrainOutput train(const RunConfig& cfg) {
  // Inventory comes from the training split; graph mode verifies parses exist
  // for every sentence before any step runs (load_split throws otherwise).
  LoadedSplit tr = load_split(cfg.train_path, cfg.train_parses, cfg.gnn_enabled);
  Model m = build_model(cfg, collect_inventory(tr.sentences));
  return train_model(m, cfg);
}

Model init_from(const Checkpoint& src, const RunConfig& cfg) {
  const RunConfig src_cfg = config_from_map(src.config);
  if (src_cfg.gnn_enabled)
    throw IncompatibilityError("init_from source must be a no-graph checkpoint");
  if (!cfg.gnn_enabled)
    throw IncompatibilityError("init_from target must have gnn.enabled = true");

  Model m = build_model(cfg, src.inventory,
                        src.encoder_vocab.empty() ? nullptr : &src.encoder_vocab);
  std::map<std::string, const Matrix*> by_name;
  for (const auto& [name, mat] : src.tensors) by_name[name] = &mat;

  std::string bad;
  auto note = [&bad](const std::string& msg) { bad += bad.empty() ? msg : ", " + msg; };
  for (Param* p : m.all_params()) {
    if (p->name.rfind("gcn.", 0) == 0) continue;  // freshly seeded
    auto it = by_name.find(p->name);
    if (it == by_name.end()) {
      note(p->name + " missing");
      continue;
    }
    if (!p->value.same_shape(*it->second)) {
      note(p->name + " is " + std::to_string(it->second->rows) + "x" +
           std::to_string(it->second->cols) + ", expected " + std::to_string(p->value.rows) +
           "x" + std::to_string(p->value.cols));
      continue;
    }
    p->value = *it->second;
  }
  if (!bad.empty()) throw IncompatibilityError("init_from: " + bad);
  return m;
}

std::string ablation_report_markdown(const AblationResult& r) {
  char buf[256];
  std::string s;
  s += "| Model | TI | TC | AI | AC | total |\n";
  s += "|-------|----|----|----|----|-------|\n";
  std::snprintf(buf, sizeof(buf), "| BioBert-BEE | %.2f | %.2f | %.2f | %.2f | %.2f |\n",
                r.no_graph.ti.f1, r.no_graph.tc.f1, r.no_graph.ai.f1, r.no_graph.ac.f1,
                r.no_graph.total);
  s += buf;
  std::snprintf(buf, sizeof(buf), "| BioBert-GNN-BEE | %.2f | %.2f | %.2f | %.2f | %.2f |\n",
                r.with_graph.ti.f1, r.with_graph.tc.f1, r.with_graph.ai.f1, r.with_graph.ac.f1,
                r.with_graph.total);
  s += buf;
  return s;
}

void dump_a2(const std::vector<Sentence>& predictions, const std::string& dir) {
  fs::create_directories(dir);
  std::map<std::string, std::vector<Sentence>> docs;
  for (const Sentence& s : predictions) docs[s.doc_id].push_back(s);
  for (const auto& [doc_id, sentences] : docs)
    write_file(dir + "/" + doc_id + ".a2", write_a2(sentences));
}

AblationResult ablate(const RunConfig& cfg) {
  RunConfig no_cfg = cfg;
  no_cfg.gnn_enabled = false;
  no_cfg.output_dir = cfg.output_dir + "/nograph";
  TrainOutput base = train(no_cfg);
  save_checkpoint(base.best, no_cfg.output_dir + "/checkpoint.bin");

  RunConfig graph_cfg = cfg;
  graph_cfg.gnn_enabled = true;
  graph_cfg.output_dir = cfg.output_dir + "/withgraph";
  Model gm = init_from(base.best, graph_cfg);
  TrainOutput graph = train_model(gm, graph_cfg);
  save_checkpoint(graph.best, graph_cfg.output_dir + "/checkpoint.bin");

  const bool have_test = !cfg.test_path.empty();
  const bool have_dev = !cfg.dev_path.empty();
  const std::string test_path = have_test ? cfg.test_path : have_dev ? cfg.dev_path : cfg.train_path;
  const std::string test_parses =
      have_test ? cfg.test_parses : have_dev ? cfg.dev_parses : cfg.train_parses;

  AblationResult r;
  {
    Model m = model_from_checkpoint(base.best);
    LoadedSplit split = load_split(test_path, test_parses, false);
    auto preds = predict(m, split.sentences, split.graphs);
    r.no_graph = score(split.sentences, preds);
    dump_a2(preds, no_cfg.output_dir + "/a2");
  }
  {
    Model m = model_from_checkpoint(graph.best);
    LoadedSplit split = load_split(test_path, test_parses, true);
    auto preds = predict(m, split.sentences, split.graphs);
    r.with_graph = score(split.sentences, preds);
    dump_a2(preds, graph_cfg.output_dir + "/a2");
  }

  write_file(cfg.output_dir + "/report.md", ablation_report_markdown(r));
  return r;
}

}  // namespace bee
