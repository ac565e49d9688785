// Command-line front end for the question-answering engine.
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kgqa/config.hpp"
#include "kgqa/errors.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/matcher.hpp"
#include "kgqa/metrics.hpp"
#include "kgqa/ner.hpp"
#include "kgqa/qa.hpp"
#include "kgqa/text.hpp"

namespace {

std::string fmt6(double value) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(6) << value;
  return ss.str();
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw kgqa::IoFailure("cannot open " + path.string());
  return in;
}

kgqa::KnowledgeGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  kgqa::KnowledgeGraph g;
  const kgqa::ImportReport report = g.import_tsv(in);
  if (report.malformed_lines > 0) {
    std::cerr << "warning: " << path.string() << ": skipped " << report.malformed_lines
              << " malformed line(s)\n";
  }
  return g;
}

struct EngineOverrides {
  std::optional<double> alpha;
  std::optional<double> threshold;
  std::optional<bool> use_crf;
};

kgqa::EngineState load_engine(const std::filesystem::path& config_path,
                              const EngineOverrides& overrides) {
  const kgqa::FileConfig fc = kgqa::load_config_file(config_path);
  kgqa::KnowledgeGraph graph = load_graph(fc.triples);

  std::ifstream tmpl_in = open_or_throw(fc.templates);
  std::vector<kgqa::Template> templates = kgqa::load_templates(tmpl_in);

  std::ifstream emb_in = open_or_throw(fc.embeddings);
  kgqa::EmbeddingTable embeddings = kgqa::load_embeddings(emb_in);

  std::optional<kgqa::NerModel> ner;
  if (fc.ner_model) {
    std::ifstream model_in = open_or_throw(*fc.ner_model);
    ner = kgqa::load_ner_model(model_in);
  }

  kgqa::EngineConfig config;
  config.alpha = overrides.alpha.value_or(fc.alpha);
  config.threshold = overrides.threshold.value_or(fc.threshold);
  config.use_crf = overrides.use_crf.value_or(fc.use_crf);
  return kgqa::make_engine(std::move(graph), std::move(templates), std::move(embeddings), config,
                           std::move(ner));
}

void print_mentions(const std::vector<kgqa::EntityMention>& mentions) {
  for (const kgqa::EntityMention& m : mentions) {
    std::cout << '[' << m.text << ", " << m.label << "]\n";
  }
}

int run_repl(const kgqa::EngineState& engine) {
  std::string line;
  while (true) {
    std::cerr << "? " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == ":quit") break;
    if (kgqa::tokenize(line).empty()) continue;
    std::cout << kgqa::answer(line, engine).text << std::endl;
  }
  return 0;
}

int run_eval(const kgqa::EngineState& engine, const std::filesystem::path& dataset) {
  std::ifstream in = open_or_throw(dataset);
  const std::vector<kgqa::EvalRecord> records = kgqa::load_eval_records(in);
  if (records.empty()) throw kgqa::EmptyDataset("dataset " + dataset.string() + " has no records");

  std::vector<kgqa::RecordScore> scores;
  scores.reserve(records.size());
  for (const kgqa::EvalRecord& r : records) {
    const kgqa::Answer a = kgqa::answer(r.question, engine);
    scores.push_back(kgqa::score_record(a.entity_names, a.text, r));
  }
  kgqa::print_report(std::cout, kgqa::aggregate(scores));
  return 0;
}

int run_train(const std::string& corpus_path, const std::string& triples_path,
              const std::string& out_path, int epochs) {
  std::ifstream in = open_or_throw(corpus_path);
  const auto corpus = kgqa::load_ner_corpus(in);
  const kgqa::LabelSet labels = kgqa::label_set_from_corpus(corpus);

  std::shared_ptr<const kgqa::Gazetteer> gazetteer;
  if (!triples_path.empty()) {
    gazetteer = std::make_shared<kgqa::Gazetteer>(load_graph(triples_path));
  }
  const kgqa::NerModel model = kgqa::train_perceptron(corpus, labels, epochs, gazetteer);
  const double f1 = kgqa::mention_f1(model, corpus);

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw kgqa::IoFailure("cannot write " + out_path);
    kgqa::save_ner_model(out, model);
  }
  std::cout << "sentences=" << corpus.size() << " labels=" << labels.size()
            << " epochs=" << epochs << '\n';
  std::cout << "train_mention_f1=" << fmt6(f1) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph question answering over a triples fixture"};
  app.require_subcommand(1);

  std::string config_path;
  std::string question;
  std::string triples_path;
  std::string dataset_path;
  std::string corpus_path;
  std::string model_out;
  int epochs = 50;
  EngineOverrides overrides;
  double alpha_flag = 0.0;
  double threshold_flag = 0.0;
  bool crf_flag = false;

  const auto add_engine_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "engine config file")->required();
    cmd->add_option("--alpha", alpha_flag, "lexical/semantic mix (overrides config)")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--threshold", threshold_flag, "match acceptance threshold (overrides config)")
        ->check(CLI::Range(-1.0, 1.0));
    cmd->add_flag("--use-crf", crf_flag, "augment the dictionary tagger with the trained model");
  };

  CLI::App* cmd_import = app.add_subcommand("import", "validate a triples file and report counts");
  cmd_import->add_option("--triples", triples_path, "triples file")->required();

  CLI::App* cmd_stats = app.add_subcommand("stats", "graph statistics of a triples file");
  cmd_stats->add_option("--triples", triples_path, "triples file")->required();

  CLI::App* cmd_ask = app.add_subcommand("ask", "answer one question");
  add_engine_flags(cmd_ask);
  cmd_ask->add_option("question", question, "the question")->required();

  CLI::App* cmd_repl = app.add_subcommand("repl", "interactive question loop");
  add_engine_flags(cmd_repl);

  CLI::App* cmd_ner = app.add_subcommand("ner", "print recognized entity mentions");
  add_engine_flags(cmd_ner);
  cmd_ner->add_option("question", question, "the question")->required();

  CLI::App* cmd_match = app.add_subcommand("match-debug", "print every template score");
  add_engine_flags(cmd_match);
  cmd_match->add_option("question", question, "the question")->required();

  CLI::App* cmd_train = app.add_subcommand("train-ner", "train the sequence tagger");
  cmd_train->add_option("--corpus", corpus_path, "tagged corpus file")->required();
  cmd_train->add_option("--triples", triples_path, "triples file for dictionary features");
  cmd_train->add_option("--out", model_out, "where to write the trained model");
  cmd_train->add_option("--epochs", epochs, "training epochs")->check(CLI::PositiveNumber);

  CLI::App* cmd_eval = app.add_subcommand("eval", "score a question dataset");
  add_engine_flags(cmd_eval);
  cmd_eval->add_option("--dataset", dataset_path, "jsonl dataset")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    std::cerr << "run with --help for usage\n";
    return 1;
  }

  // Flags only override the config when actually given.
  const auto flag_overrides = [&](const CLI::App* cmd) {
    EngineOverrides o;
    if (cmd->count("--alpha") > 0) o.alpha = alpha_flag;
    if (cmd->count("--threshold") > 0) o.threshold = threshold_flag;
    if (cmd->count("--use-crf") > 0) o.use_crf = crf_flag;
    return o;
  };

  try {
    if (cmd_import->parsed()) {
      std::ifstream in = open_or_throw(triples_path);
      kgqa::KnowledgeGraph g;
      const kgqa::ImportReport r = g.import_tsv(in);
      std::cout << "entities_added=" << r.entities_added << '\n'
                << "triples_added=" << r.triples_added << '\n'
                << "duplicate_entities_skipped=" << r.duplicate_entities_skipped << '\n'
                << "duplicate_triples_skipped=" << r.duplicate_triples_skipped << '\n'
                << "malformed_lines=" << r.malformed_lines << '\n';
      return 0;
    }
    if (cmd_stats->parsed()) {
      const kgqa::GraphStats s = load_graph(triples_path).stats();
      std::cout << "entities=" << s.entity_count << " triples=" << s.triple_count
                << " entity_types=" << s.entity_type_count
                << " relation_types=" << s.relation_type_count << '\n';
      return 0;
    }
    if (cmd_ask->parsed()) {
      const kgqa::EngineState engine = load_engine(config_path, flag_overrides(cmd_ask));
      const kgqa::Answer a = kgqa::answer(question, engine);
      std::cout << a.text << '\n';
      std::cerr << "status: " << kgqa::to_string(a.status) << '\n';
      return 0;
    }
    if (cmd_repl->parsed()) {
      return run_repl(load_engine(config_path, flag_overrides(cmd_repl)));
    }
    if (cmd_ner->parsed()) {
      const kgqa::EngineState engine = load_engine(config_path, flag_overrides(cmd_ner));
      print_mentions(kgqa::recognize(engine, kgqa::tokenize(question)));
      return 0;
    }
    if (cmd_match->parsed()) {
      const kgqa::EngineState engine = load_engine(config_path, flag_overrides(cmd_match));
      const std::vector<kgqa::Token> tokens = kgqa::tokenize(question);
      const auto abstracted = kgqa::abstract_question(tokens, kgqa::recognize(engine, tokens));
      std::cout << "abstracted:";
      for (const std::string& t : abstracted) std::cout << ' ' << t;
      std::cout << '\n';
      std::vector<std::pair<double, std::string>> rows;
      for (const kgqa::Template& t : engine.templates) {
        rows.emplace_back(kgqa::score_template(abstracted, t, engine.tfidf, engine.embeddings,
                                               engine.config.alpha),
                          t.id);
      }
      std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      for (const auto& [score, id] : rows) {
        std::cout << "id=" << id << " score=" << fmt6(score) << '\n';
      }
      const kgqa::MatchResult best =
          kgqa::best_template(abstracted, engine.templates, engine.tfidf, engine.embeddings,
                              engine.config.alpha, engine.config.threshold);
      std::cout << "best=" << best.template_id << " passed=" << (best.passed ? "true" : "false")
                << '\n';
      return 0;
    }
    if (cmd_train->parsed()) {
      return run_train(corpus_path, triples_path, model_out, epochs);
    }
    if (cmd_eval->parsed()) {
      return run_eval(load_engine(config_path, flag_overrides(cmd_eval)), dataset_path);
    }
  } catch (const kgqa::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
