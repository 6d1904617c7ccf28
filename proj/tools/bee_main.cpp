#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "bee/jsonl.hpp"
#include "bee/pipeline.hpp"

using namespace bee;

int main(int argc, char** argv) {
  CLI::App app{"biomedical event extraction pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  auto* train_cmd = app.add_subcommand("train", "train a model from a config file");
  train_cmd->add_option("--config", config_path, "flat key = value config file")->required();

  std::string ckpt_path, data_path, parse_path;
  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpoint on a corpus");
  eval_cmd->add_option("--ckpt", ckpt_path, "checkpoint file")->required();
  eval_cmd->add_option("--data", data_path, "JSON-lines corpus with gold annotations")->required();
  eval_cmd->add_option("--parses", parse_path, "CoNLL-U parse file (graph mode)");

  auto* ablate_cmd = app.add_subcommand("ablate", "train and compare both model variants");
  ablate_cmd->add_option("--config", config_path, "flat key = value config file")->required();

  std::string gold_path, pred_path, format = "markdown";
  auto* score_cmd = app.add_subcommand("score", "score predictions against gold");
  score_cmd->add_option("--gold", gold_path, "gold JSON-lines corpus")->required();
  score_cmd->add_option("--pred", pred_path, "predicted JSON-lines corpus")->required();
  score_cmd->add_option("--format", format, "json or markdown")
      ->check(CLI::IsMember({"json", "markdown"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      const RunConfig cfg = load_config(config_path);
      TrainOutput out = train(cfg);
      const std::string ckpt = cfg.output_dir + "/checkpoint.bin";
      save_checkpoint(out.best, ckpt);
      std::printf("checkpoint: %s (best epoch %d of %d)\n", ckpt.c_str(), out.best.epoch,
                  cfg.epochs);
      if (!out.history.empty())
        std::printf("best dev total: %.2f\n", out.history[out.best.epoch - 1].dev.total);
    } else if (eval_cmd->parsed()) {
      const MetricsReport r = evaluate_checkpoint(load_checkpoint(ckpt_path), data_path, parse_path);
      std::fputs(to_markdown(r).c_str(), stdout);
    } else if (ablate_cmd->parsed()) {
      const RunConfig cfg = load_config(config_path);
      const AblationResult r = ablate(cfg);
      std::fputs(ablation_report_markdown(r).c_str(), stdout);
      std::printf("report: %s/report.md\n", cfg.output_dir.c_str());
    } else if (score_cmd->parsed()) {
      const MetricsReport r = score(load_json_corpus(gold_path), load_json_corpus(pred_path));
      if (format == "json")
        std::printf("%s\n", to_json_string(r).c_str());
      else
        std::fputs(to_markdown(r).c_str(), stdout);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
