#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dasco/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dependency-scoped aspect sentiment toolkit"};
  app.require_subcommand(1);

  std::string conllu_path, targets = "nouns";
  auto* scopes = app.add_subcommand("parse-scopes", "Emit target scopes as JSON lines");
  scopes->add_option("--conllu", conllu_path, "CoNLL-U corpus file")->required();
  scopes->add_option("--targets", targets, "'nouns' (default) or 'all'");

  std::string spec_path, out_dir;
  auto* gen = app.add_subcommand("gen-synthetic", "Generate a synthetic corpus");
  gen->add_option("--spec", spec_path, "Generator spec JSON")->required();
  gen->add_option("--out", out_dir, "Output directory")->required();

  std::string config_path, corpus_dir, train_out;
  auto* mate = app.add_subcommand("train-mate", "Train the aspect-term extraction head");
  mate->add_option("--config", config_path, "Config JSON")->required();
  mate->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  mate->add_option("--out", train_out, "Output directory")->required();

  auto* masc = app.add_subcommand("train-masc", "Train the sentiment classification head");
  masc->add_option("--config", config_path, "Config JSON")->required();
  masc->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  masc->add_option("--out", train_out, "Output directory")->required();

  std::string mate_path, masc_path;
  auto* jmasa = app.add_subcommand("eval-jmasa", "Evaluate the combined span+polarity pipeline");
  jmasa->add_option("--mate", mate_path, "Trained mate model")->required();
  jmasa->add_option("--masc", masc_path, "Trained masc model")->required();
  jmasa->add_option("--corpus", corpus_dir, "Corpus directory")->required();

  bool dump_pairs = false;
  std::string pretrain_out;
  auto* pre = app.add_subcommand("pretrain", "Train the AOE/ITM/ASSC heads");
  pre->add_option("--config", config_path, "Config JSON")->required();
  pre->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  pre->add_flag("--dump-pairs", dump_pairs, "Emit constructed pairs as JSON lines");
  pre->add_option("--out", pretrain_out, "Optional model output file");

  std::uint64_t seed = 42;
  bool inject_fault = false;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
  grad->add_option("--seed", seed, "Suite seed");
  grad->add_flag("--inject-fault", inject_fault,
                 "Corrupt one analytic gradient (harness self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (scopes->parsed())
    return dasco::cmd_parse_scopes(conllu_path, targets, std::cout, std::cerr);
  if (gen->parsed()) return dasco::cmd_gen_synthetic(spec_path, out_dir, std::cout, std::cerr);
  if (mate->parsed())
    return dasco::cmd_train(dasco::Task::Mate, config_path, corpus_dir, train_out, std::cout,
                            std::cerr);
  if (masc->parsed())
    return dasco::cmd_train(dasco::Task::Masc, config_path, corpus_dir, train_out, std::cout,
                            std::cerr);
  if (jmasa->parsed())
    return dasco::cmd_eval_jmasa(mate_path, masc_path, corpus_dir, std::cout, std::cerr);
  if (pre->parsed())
    return dasco::cmd_pretrain(config_path, corpus_dir, dump_pairs, pretrain_out, std::cout,
                               std::cerr);
  if (grad->parsed()) return dasco::cmd_gradcheck(seed, inject_fault, std::cout, std::cerr);
  return 2;
}
