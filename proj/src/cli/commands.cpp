#include "kiwi/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "kiwi/cli/config.hpp"
#include "kiwi/cli/render.hpp"
#include "kiwi/labels/labels.hpp"
#include "kiwi/metrics/metrics.hpp"
#include "kiwi/trainer/predict.hpp"
#include "kiwi/trainer/trainer.hpp"

namespace kiwi::cli {

namespace fs = std::filesystem;

namespace {

void write_tag_file(const std::string& path,
                    const std::vector<TagVector>& rows) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write tags to " + path);
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) f << ' ';
      f << tag_name(row[i]);
    }
    f << '\n';
  }
  f.flush();
  if (!f) throw DataError("write failed for " + path);
}

std::vector<TagVector> read_tag_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open tags " + path);
  std::vector<TagVector> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    TagVector row;
    for (const auto& tok : data::tokenize(line)) {
      try {
        row.push_back(parse_tag(tok));
      } catch (const DataError& e) {
        throw DataError(strformat("%s line %zu: %s", path.c_str(), line_no,
                                  e.what()));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct EvaluateArgs {
  std::string gold_mt_tags, pred_mt_probs;
  std::string gold_gap_tags, pred_gap_probs;
  std::string gold_source_tags, pred_source_probs;
  std::string gold_hter, pred_hter;
  double threshold = 0.5;
  std::string output;
};

void evaluate_word_stream(std::ostream& out, const std::string& stream,
                          const std::string& gold_path,
                          const std::string& probs_path, double threshold) {
  const auto gold_rows = read_tag_file(gold_path);
  const auto prob_rows = ensemble::read_probs_file(probs_path);
  if (gold_rows.size() != prob_rows.size())
    throw DataError(strformat(
        "%s: gold has %zu lines but predictions have %zu", stream.c_str(),
        gold_rows.size(), prob_rows.size()));
  TagVector gold, pred;
  for (size_t i = 0; i < gold_rows.size(); ++i) {
    if (gold_rows[i].size() != prob_rows[i].size())
      throw DataError(strformat(
          "%s line %zu: %zu gold tags but %zu predictions", stream.c_str(),
          i + 1, gold_rows[i].size(), prob_rows[i].size()));
    const auto tags = ensemble::tags_from_probs(prob_rows[i], threshold);
    gold.insert(gold.end(), gold_rows[i].begin(), gold_rows[i].end());
    pred.insert(pred.end(), tags.begin(), tags.end());
  }
  const auto report = metrics::f1_mult(gold, pred);
  out << strformat("%s_f1_ok=%.6f\n", stream.c_str(), report.f1_ok);
  out << strformat("%s_f1_bad=%.6f\n", stream.c_str(), report.f1_bad);
  out << strformat("%s_f1_mult=%.6f\n", stream.c_str(), report.f1_mult);
}

int command_evaluate(const EvaluateArgs& args) {
  std::ostringstream report;
  bool any = false;
  if (!args.gold_mt_tags.empty()) {
    evaluate_word_stream(report, "mt", args.gold_mt_tags, args.pred_mt_probs,
                         args.threshold);
    any = true;
  }
  if (!args.gold_gap_tags.empty()) {
    evaluate_word_stream(report, "gaps", args.gold_gap_tags,
                         args.pred_gap_probs, args.threshold);
    any = true;
  }
  if (!args.gold_source_tags.empty()) {
    evaluate_word_stream(report, "source", args.gold_source_tags,
                         args.pred_source_probs, args.threshold);
    any = true;
  }
  if (!args.gold_hter.empty()) {
    const auto gold = ensemble::read_scores_file(args.gold_hter);
    const auto pred = ensemble::read_scores_file(args.pred_hter);
    if (gold.size() != pred.size())
      throw DataError(strformat(
          "hter: gold has %zu lines but predictions have %zu", gold.size(),
          pred.size()));
    report << strformat("hter_pearson=%.6f\n", metrics::pearson(gold, pred));
    report << strformat("hter_spearman=%.6f\n", metrics::spearman(gold, pred));
    any = true;
  }
  if (!any)
    throw ConfigError(
        "evaluate needs at least one gold/prediction file pair");
  std::cout << report.str();
  if (!args.output.empty()) {
    std::ofstream f(args.output, std::ios::trunc);
    if (!f) throw DataError("cannot write report to " + args.output);
    f << report.str();
  }
  return 0;
}

struct LabelArgs {
  std::string mt, pe, src, alignments;
  std::string out_mt_tags, out_gap_tags, out_source_tags, out_hter;
};

int command_label(const LabelArgs& args) {
  if (args.out_mt_tags.empty() && args.out_gap_tags.empty() &&
      args.out_source_tags.empty() && args.out_hter.empty())
    throw ConfigError("label: no outputs requested");
  if (!args.out_source_tags.empty() &&
      (args.src.empty() || args.alignments.empty()))
    throw ConfigError(
        "label: source tags need --src and --alignments inputs");

  const auto mt_sents = data::read_token_file(args.mt);
  const auto pe_sents = data::read_token_file(args.pe);
  if (mt_sents.size() != pe_sents.size())
    throw DataError(strformat("%s has %zu lines but %s has %zu lines",
                              args.mt.c_str(), mt_sents.size(),
                              args.pe.c_str(), pe_sents.size()));
  std::vector<std::vector<std::string>> src_sents;
  std::vector<std::string> align_lines;
  if (!args.src.empty()) {
    src_sents = data::read_token_file(args.src);
    if (src_sents.size() != mt_sents.size())
      throw DataError(strformat("%s has %zu lines but %s has %zu lines",
                                args.src.c_str(), src_sents.size(),
                                args.mt.c_str(), mt_sents.size()));
  }
  if (!args.alignments.empty()) {
    std::ifstream f(args.alignments);
    if (!f) throw DataError("cannot open " + args.alignments);
    std::string line;
    while (std::getline(f, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      align_lines.push_back(line);
    }
    if (align_lines.size() != mt_sents.size())
      throw DataError(strformat("%s has %zu lines but %s has %zu lines",
                                args.alignments.c_str(), align_lines.size(),
                                args.mt.c_str(), mt_sents.size()));
  }

  std::vector<TagVector> mt_tags, gap_tags, src_tags;
  std::vector<double> hter_scores;
  for (size_t i = 0; i < mt_sents.size(); ++i) {
    const size_t src_len = src_sents.empty() ? 0 : src_sents[i].size();
    std::vector<std::pair<int, int>> alignments;
    if (!align_lines.empty()) {
      try {
        alignments = data::parse_alignments(align_lines[i], src_len,
                                            mt_sents[i].size());
      } catch (const DataError& e) {
        throw DataError(strformat("%s line %zu: %s", args.alignments.c_str(),
                                  i + 1, e.what()));
      }
    }
    const auto labeled =
        labels::label_sentence(mt_sents[i], pe_sents[i], src_len, alignments);
    mt_tags.push_back(labeled.tags.mt_tags);
    gap_tags.push_back(labeled.tags.gap_tags);
    src_tags.push_back(labeled.tags.src_tags);
    hter_scores.push_back(labeled.hter);
  }

  if (!args.out_mt_tags.empty()) write_tag_file(args.out_mt_tags, mt_tags);
  if (!args.out_gap_tags.empty()) write_tag_file(args.out_gap_tags, gap_tags);
  if (!args.out_source_tags.empty())
    write_tag_file(args.out_source_tags, src_tags);
  if (!args.out_hter.empty())
    ensemble::write_scores_file(args.out_hter, hter_scores);
  log::info(strformat("labeled %zu sentences", mt_sents.size()));
  return 0;
}

struct PredictArgs {
  std::string checkpoint, src, mt, alignments, output_dir;
  size_t batch_size = 32;
};

int command_predict(const PredictArgs& args) {
  data::CorpusPaths paths;
  paths.src = args.src;
  paths.mt = args.mt;
  paths.alignments = args.alignments;
  const auto samples = data::load_qe_corpus(paths);
  const auto checkpoint = trainer::load_checkpoint(args.checkpoint);
  if (args.alignments.empty() &&
      (checkpoint.model->kind() == "quetch" ||
       checkpoint.model->kind() == "nuqe"))
    log::warn("no alignment file given; aligned-word features fall back to "
              "the unaligned symbol");
  const auto prediction =
      trainer::predict(checkpoint, samples, args.batch_size);
  fs::create_directories(args.output_dir);
  for (const auto& [stream, rows] : prediction.word_probs)
    ensemble::write_probs_file(
        (fs::path(args.output_dir) /
         (ensemble::stream_name(stream) + ".probs")).string(),
        rows);
  if (!prediction.sentence_scores.empty())
    ensemble::write_scores_file(
        (fs::path(args.output_dir) / "hter.probs").string(),
        prediction.sentence_scores);
  log::info(strformat("wrote predictions for %zu sentences to %s",
                      samples.size(), args.output_dir.c_str()));
  return 0;
}

struct RenderArgs {
  std::string mt, mt_probs, gap_probs, output;
  double threshold = 0.5;
  std::string format = "ansi";
};

int command_render(const RenderArgs& args) {
  const auto sentences = data::read_token_file(args.mt);
  const auto mt_rows = ensemble::read_probs_file(args.mt_probs);
  const auto gap_rows = ensemble::read_probs_file(args.gap_probs);
  const auto format =
      args.format == "html" ? RenderFormat::Html : RenderFormat::Ansi;
  const auto text = render(sentences, mt_rows, gap_rows, args.threshold, format);
  if (args.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(args.output, std::ios::trunc);
    if (!f) throw DataError("cannot write to " + args.output);
    f << text;
  }
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"kiwi - machine translation quality estimation toolkit"};
  app.require_subcommand(1);

  // train
  auto* train_cmd =
      app.add_subcommand("train", "train a model from a YAML config file");
  std::string config_path;
  std::optional<uint64_t> seed_override;
  std::optional<std::string> output_dir_override;
  train_cmd->add_option("--config", config_path, "YAML configuration file")
      ->required();
  train_cmd->add_option("--seed", seed_override, "override the config seed");
  train_cmd->add_option("--output-dir", output_dir_override,
                        "override the run directory");

  // predict
  auto* predict_cmd = app.add_subcommand(
      "predict", "run a trained checkpoint over new sentences");
  PredictArgs predict_args;
  predict_cmd->add_option("--checkpoint", predict_args.checkpoint,
                          "checkpoint directory")->required();
  predict_cmd->add_option("--src", predict_args.src, "source sentences")
      ->required();
  predict_cmd->add_option("--mt", predict_args.mt, "translated sentences")
      ->required();
  predict_cmd->add_option("--alignments", predict_args.alignments,
                          "source-MT alignments (i-j pairs)");
  predict_cmd->add_option("--output-dir", predict_args.output_dir,
                          "directory for <stream>.probs files")->required();
  predict_cmd->add_option("--batch-size", predict_args.batch_size,
                          "prediction batch size");

  // evaluate
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "score predictions against gold annotations");
  EvaluateArgs eval_args;
  eval_cmd->add_option("--gold-mt-tags", eval_args.gold_mt_tags, "");
  eval_cmd->add_option("--pred-mt-probs", eval_args.pred_mt_probs, "");
  eval_cmd->add_option("--gold-gap-tags", eval_args.gold_gap_tags, "");
  eval_cmd->add_option("--pred-gap-probs", eval_args.pred_gap_probs, "");
  eval_cmd->add_option("--gold-source-tags", eval_args.gold_source_tags, "");
  eval_cmd->add_option("--pred-source-probs", eval_args.pred_source_probs, "");
  eval_cmd->add_option("--gold-hter", eval_args.gold_hter, "");
  eval_cmd->add_option("--pred-hter", eval_args.pred_hter, "");
  eval_cmd->add_option("--threshold", eval_args.threshold,
                       "BAD probability threshold (default 0.5)");
  eval_cmd->add_option("--output", eval_args.output,
                       "also write the report to this file");

  // label
  auto* label_cmd = app.add_subcommand(
      "label", "generate gold tags and HTER scores from post-edits");
  LabelArgs label_args;
  label_cmd->add_option("--mt", label_args.mt, "translated sentences")
      ->required();
  label_cmd->add_option("--pe", label_args.pe, "post-edited sentences")
      ->required();
  label_cmd->add_option("--src", label_args.src, "source sentences");
  label_cmd->add_option("--alignments", label_args.alignments,
                        "source-MT alignments");
  label_cmd->add_option("--out-mt-tags", label_args.out_mt_tags, "");
  label_cmd->add_option("--out-gap-tags", label_args.out_gap_tags, "");
  label_cmd->add_option("--out-source-tags", label_args.out_source_tags, "");
  label_cmd->add_option("--out-hter", label_args.out_hter, "");

  // render
  auto* render_cmd = app.add_subcommand(
      "render", "visualize predictions as ANSI or HTML text");
  RenderArgs render_args;
  render_cmd->add_option("--mt", render_args.mt, "translated sentences")
      ->required();
  render_cmd->add_option("--mt-probs", render_args.mt_probs,
                         "word BAD probabilities")->required();
  render_cmd->add_option("--gap-probs", render_args.gap_probs,
                         "gap BAD probabilities")->required();
  render_cmd->add_option("--threshold", render_args.threshold, "");
  render_cmd->add_option("--format", render_args.format, "ansi or html")
      ->check(CLI::IsMember({"ansi", "html"}));
  render_cmd->add_option("--output", render_args.output,
                         "output file (default: stdout)");

  try {
    std::vector<std::string> argv_vec = args;
    std::vector<char*> argv;
    std::string program = "kiwi";
    argv.push_back(program.data());
    for (auto& a : argv_vec) argv.push_back(a.data());
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (train_cmd->parsed()) {
      const auto config =
          load_train_config(config_path, seed_override, output_dir_override);
      const auto record = trainer::train(config);
      std::cout << strformat(
          "run %s finished: best epoch %zu (%s=%.6f), checkpoint %s\n",
          record.run_id.c_str(), record.best_epoch,
          record.selection_metric.c_str(), record.best_value,
          record.best_checkpoint.c_str());
      return 0;
    }
    if (predict_cmd->parsed()) return command_predict(predict_args);
    if (eval_cmd->parsed()) return command_evaluate(eval_args);
    if (label_cmd->parsed()) return command_label(label_args);
    if (render_cmd->parsed()) return command_render(render_args);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "kiwi: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "kiwi: unexpected error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kiwi::cli
