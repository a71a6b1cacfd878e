#include "dasco/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "dasco/errors.hpp"
#include "dasco/gradcheck.hpp"
#include "dasco/metrics.hpp"
#include "dasco/pretrain.hpp"
#include "dasco/scope.hpp"
#include "dasco/synthetic.hpp"

namespace dasco {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kDivergence = 3;
constexpr int kGradFailure = 4;

// Input/config problems map to exit 2, training divergence to exit 3.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const divergence_error& e) {
    err << "error: " << e.what() << "\n";
    return kDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

json prf_json(const std::string& task, const PRF& prf) {
  return json{{"task", task}, {"P", prf.precision}, {"R", prf.recall}, {"F1", prf.f1}};
}

}  // namespace

int cmd_parse_scopes(const std::string& conllu_path, const std::string& targets,
                     std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    if (targets != "all" && targets != "nouns")
      throw config_error("--targets must be 'all' or 'nouns'");
    auto trees = parse_conllu_file(conllu_path);
    for (const DepTree& tree : trees) {
      std::vector<int> picks;
      if (targets == "nouns") {
        picks = candidate_targets(tree);
      } else {
        for (int i = 1; i <= tree.size(); ++i) picks.push_back(i);
      }
      for (int t : picks) {
        Scope s = compute_scope(tree, t);
        json rec{{"sample_id", tree.sent_id}, {"target", t}, {"start", s.start}, {"end", s.end}};
        out << rec.dump() << "\n";
      }
    }
    return kOk;
  });
}

int cmd_gen_synthetic(const std::string& spec_path, const std::string& out_dir,
                      std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    std::ifstream in(spec_path);
    if (!in) throw config_error("cannot open spec " + spec_path);
    json j;
    try {
      j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
      throw config_error("spec " + spec_path + ": " + e.what());
    }
    SynthSpec spec = synth_spec_from_json(j);
    SynthCorpus corpus = gen_synthetic(spec);

    fs::create_directories(out_dir);
    std::ofstream(out_dir + "/corpus.conllu") << corpus.conllu_text;
    std::ofstream(out_dir + "/annotations.jsonl") << corpus.annotations_jsonl;
    std::ofstream(out_dir + "/spec-echo.json") << synth_spec_to_json(spec).dump(2) << "\n";
    out << json{{"sentences", spec.sentences}, {"out", out_dir}}.dump() << "\n";
    return kOk;
  });
}

int cmd_train(Task task, const std::string& config_path, const std::string& corpus_dir,
              const std::string& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    TrainConfig cfg = parse_config_file(config_path);
    auto corpus = load_corpus_dir(corpus_dir);
    TrainResult result = train(task, corpus, cfg);
    if (result.skipped > 0)
      err << "note: " << result.skipped << " samples without "
          << (task == Task::Mate ? "candidate targets" : "aspect terms")
          << " were skipped each epoch\n";

    fs::create_directories(out_dir);
    save_model(result.model, out_dir + "/model.json");
    std::ofstream trace(out_dir + "/metrics.jsonl");
    json final_line;
    for (const EpochMetrics& em : result.trace) {
      json line{{"epoch", em.epoch}, {"loss", em.mean_loss}, {"lambda", cfg.lambda}};
      if (task == Task::Mate) {
        line["task"] = "mate";
        line["P"] = em.prf.precision;
        line["R"] = em.prf.recall;
        line["F1"] = em.prf.f1;
      } else {
        line["task"] = "masc";
        line["acc"] = em.masc.accuracy;
        line["macro_f1"] = em.masc.macro_f1;
      }
      trace << line.dump() << "\n";
      final_line = line;
    }
    out << final_line.dump() << "\n";
    return kOk;
  });
}

int cmd_eval_jmasa(const std::string& mate_path, const std::string& masc_path,
                   const std::string& corpus_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    Model mate = load_model(mate_path);
    Model masc = load_model(masc_path);
    if (mate.task != Task::Mate)
      throw config_error(mate_path + " does not hold a mate model");
    if (masc.task != Task::Masc)
      throw config_error(masc_path + " does not hold a masc model");
    auto corpus = load_corpus_dir(corpus_dir);

    std::vector<PairSet> gold, predicted;
    for (const auto& sample : corpus) {
      PairSet g{sample.sample_id, {}};
      for (const AspectSpan& a : sample.aspects) g.pairs.emplace_back(a.start, a.end, a.polarity);
      gold.push_back(std::move(g));
    }
    for (const auto& pred : jmasa_infer(mate, masc, corpus))
      predicted.push_back({pred.sample_id, pred.pairs});
    out << prf_json("jmasa", jmasa_prf(gold, predicted)).dump() << "\n";
    return kOk;
  });
}

int cmd_pretrain(const std::string& config_path, const std::string& corpus_dir,
                 bool dump_pairs, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&]() {
    TrainConfig cfg = parse_config_file(config_path);
    auto corpus = load_corpus_dir(corpus_dir);
    if (corpus.size() < 2)
      throw config_error("pretraining needs a corpus of at least 2 samples");

    if (dump_pairs) {
      for (const AoePair& p : build_aoe_pairs(corpus)) {
        json rec{{"type", "aoe"},         {"sample_id", p.sample_id},
                 {"pos_text", p.pos_text}, {"neg_text", p.neg_text},
                 {"pos_scene", p.pos_scene}, {"neg_scene", p.neg_scene},
                 {"label_pos", 1},         {"label_neg", 0}};
        out << rec.dump() << "\n";
      }
      for (const ItmPair& p : build_itm_pairs(corpus, cfg.seed ^ 0xA24BAED4963EE407ull)) {
        json rec{{"type", "itm"}, {"sample_id", p.sample_id}, {"donor_id", p.donor_id},
                 {"label_pos", 1}, {"label_neg", 0}};
        out << rec.dump() << "\n";
      }
    }

    PretrainResult result = train_pretrain(corpus, cfg);
    if (!out_path.empty()) save_pretrain_model(result.model, out_path);
    json rep{{"task", "pretrain"},
             {"aoe_acc", result.aoe_accuracy},
             {"itm_acc", result.itm_accuracy},
             {"assc_acc", result.assc_accuracy},
             {"L_q", result.l_q},
             {"L_aoe", result.l_aoe},
             {"L_itm", result.l_itm},
             {"L_assc", result.l_assc},
             {"L_p", result.l_p}};
    out << rep.dump() << "\n";
    return kOk;
  });
}

int cmd_gradcheck(std::uint64_t seed, bool inject_fault, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    auto reports = gradcheck_suite(seed, inject_fault);
    bool all_pass = true;
    for (const auto& rep : reports) {
      json line{{"component", rep.name},
                {"max_rel_err", rep.max_rel_err},
                {"checked", rep.checked},
                {"pass", rep.pass}};
      out << line.dump() << "\n";
      all_pass = all_pass && rep.pass;
    }
    if (!all_pass) {
      for (const auto& rep : reports)
        if (!rep.pass) err << "gradcheck failed: " << rep.name << "\n";
      return kGradFailure;
    }
    return kOk;
  });
}

}  // namespace dasco
