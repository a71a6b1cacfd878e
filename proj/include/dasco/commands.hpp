#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "dasco/model.hpp"

namespace dasco {

// Command implementations shared by the CLI binary and the integration
// suites. Exit codes: 0 success, 2 input/config error, 3 training
// divergence, 4 gradient-check failure.

int cmd_parse_scopes(const std::string& conllu_path, const std::string& targets,
                     std::ostream& out, std::ostream& err);

int cmd_gen_synthetic(const std::string& spec_path, const std::string& out_dir,
                      std::ostream& out, std::ostream& err);

int cmd_train(Task task, const std::string& config_path, const std::string& corpus_dir,
              const std::string& out_dir, std::ostream& out, std::ostream& err);

int cmd_eval_jmasa(const std::string& mate_path, const std::string& masc_path,
                   const std::string& corpus_dir, std::ostream& out, std::ostream& err);

int cmd_pretrain(const std::string& config_path, const std::string& corpus_dir,
                 bool dump_pairs, const std::string& out_path, std::ostream& out,
                 std::ostream& err);

int cmd_gradcheck(std::uint64_t seed, bool inject_fault, std::ostream& out, std::ostream& err);

}  // namespace dasco
