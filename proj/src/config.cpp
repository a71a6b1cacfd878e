#include "dasco/config.hpp"

#include <fstream>
#include <set>

#include "dasco/errors.hpp"

namespace dasco {

using nlohmann::json;

void TrainConfig::validate() const {
  if (lambda < 0.0) throw config_error("lambda must be >= 0");
  if (!(lr > 0.0)) throw config_error("lr must be positive");
  if (epochs < 1) throw config_error("epochs must be >= 1");
  if (batch < 1) throw config_error("batch must be >= 1");
  if (dim < 1) throw config_error("dim must be >= 1");
  if (layers < 1) throw config_error("layers must be >= 1");
  if (!(tau > 0.0)) throw config_error("tau must be positive");
  if (!(holdout_frac > 0.0 && holdout_frac < 1.0))
    throw config_error("holdout_frac must be in (0, 1)");
}

TrainConfig config_from_json(const json& j) {
  if (!j.is_object()) throw config_error("config must be a JSON object");
  static const std::set<std::string> known = {
      "lambda",        "lr",    "epochs", "batch",        "dim",
      "layers",        "tau",   "seed",   "syn_row_normalize",
      "ablate_scope",  "encoder_mixing", "holdout_frac", "init_encoder_from"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw config_error("unknown config key: " + it.key());

  TrainConfig cfg;
  try {
    cfg.lambda = j.value("lambda", cfg.lambda);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch = j.value("batch", cfg.batch);
    cfg.dim = j.value("dim", cfg.dim);
    cfg.layers = j.value("layers", cfg.layers);
    cfg.tau = j.value("tau", cfg.tau);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.syn_row_normalize = j.value("syn_row_normalize", cfg.syn_row_normalize);
    cfg.ablate_scope = j.value("ablate_scope", cfg.ablate_scope);
    cfg.encoder_mixing = j.value("encoder_mixing", cfg.encoder_mixing);
    cfg.holdout_frac = j.value("holdout_frac", cfg.holdout_frac);
    cfg.init_encoder_from = j.value("init_encoder_from", cfg.init_encoder_from);
  } catch (const json::exception& e) {
    throw config_error(std::string("bad config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

TrainConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw config_error("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const TrainConfig& cfg) {
  json j;
  j["lambda"] = cfg.lambda;
  j["lr"] = cfg.lr;
  j["epochs"] = cfg.epochs;
  j["batch"] = cfg.batch;
  j["dim"] = cfg.dim;
  j["layers"] = cfg.layers;
  j["tau"] = cfg.tau;
  j["seed"] = cfg.seed;
  j["syn_row_normalize"] = cfg.syn_row_normalize;
  j["ablate_scope"] = cfg.ablate_scope;
  j["encoder_mixing"] = cfg.encoder_mixing;
  j["holdout_frac"] = cfg.holdout_frac;
  j["init_encoder_from"] = cfg.init_encoder_from;
  return j;
}

}  // namespace dasco
