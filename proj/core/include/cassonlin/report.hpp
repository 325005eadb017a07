#pragma once

#include <string>

#include "cassonlin/invariant.hpp"
#include "cassonlin/solver.hpp"

// JSON serialization for reports and solution dumps. Matrices are written
// as row-major arrays of [re, im] pairs with N declared. Field order is
// fixed, so reports are byte-identical across runs with the same seed
// except for the timestamp field.

namespace casson {

struct Provenance {
  std::string tool = "clinv";
  std::string version;
  std::string mode;
  std::string timestamp;
};

std::string invariant_report_json(const InvariantReport& rep, const InvariantConfig& cfg,
                                  const Provenance& prov, int indent = 2);

std::string solution_dump_json(const BraidWord& braid, const LabelSpec& labels,
                               const EpsilonVector& eps, const SolutionSet& sols,
                               const SolverConfig& cfg, const Provenance& prov, int indent = 2);

std::string markov_report_json(const MarkovCheckReport& rep, const InvariantConfig& cfg,
                               const Provenance& prov, int indent = 2);

std::string epsilon_report_json(const EpsilonCheckReport& rep, const InvariantConfig& cfg,
                                const Provenance& prov, int indent = 2);

}  // namespace casson
