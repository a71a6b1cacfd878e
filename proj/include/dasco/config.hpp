#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace dasco {

// Flat training configuration. Toy-scale defaults; a run is fully determined
// by (config, seed, inputs).
struct TrainConfig {
  double lambda = 0.2;   // weight of the scope-interaction loss
  double lr = 0.05;
  int epochs = 50;
  int batch = 1;
  int dim = 16;          // feature dimension D
  int layers = 4;        // GNN depth
  double tau = 0.1;      // contrastive temperature
  std::uint64_t seed = 42;
  bool syn_row_normalize = false;
  bool ablate_scope = false;      // replace scope masks by all-ones
  bool encoder_mixing = false;    // extra per-row ReLU layer after embedding
  double holdout_frac = 0.2;      // pretraining held-out fraction
  std::string init_encoder_from;  // optional model file to warm-start embeddings

  void validate() const;  // throws config_error
};

// Unknown keys are rejected. `//` comments in config files are ignored.
TrainConfig config_from_json(const nlohmann::json& j);
TrainConfig parse_config_file(const std::string& path);
nlohmann::json config_to_json(const TrainConfig& cfg);

}  // namespace dasco
