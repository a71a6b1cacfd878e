#pragma once

#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace dasco {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per-sample span sets, exact (start, end) matching.
struct SpanSet {
  std::string sample_id;
  std::vector<std::pair<int, int>> spans;
};

// Per-sample (start, end, polarity) sets; a pair counts only if both the
// span and the polarity match.
struct PairSet {
  std::string sample_id;
  std::vector<std::tuple<int, int, int>> pairs;
};

// Micro-aggregated precision / recall / F1 over the corpus. Every predicted
// sample id must appear in the gold list. Zero predictions yield P = 0.
PRF span_prf(const std::vector<SpanSet>& gold, const std::vector<SpanSet>& predicted);
PRF jmasa_prf(const std::vector<PairSet>& gold, const std::vector<PairSet>& predicted);

struct MascMetrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

// Accuracy and macro-F1 over the fixed 3-class set; a class absent from both
// gold and prediction contributes F1 = 0.
MascMetrics masc_metrics(const std::vector<int>& gold, const std::vector<int>& predicted);

}  // namespace dasco
