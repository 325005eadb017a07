#pragma once

#include <string>
#include <vector>

#include "cassonlin/braid.hpp"

// Component labels and central twists. Everything here is exact integer
// arithmetic mod N; central elements are stored as exponents of
// omega = e^{2 pi i / N}, never as floating-point phases.

namespace casson {

// Rank N together with one label per link component. A spec is allowable
// when (i) 0 <= a_i < N, (ii) gcd(a_1..a_n) is relatively prime to N, and
// (iii) the label sum is a multiple of N.
struct LabelSpec {
  int N = 2;
  std::vector<int> labels;
};

struct LabelCheck {
  bool ok = false;
  bool cond_i = false;    // entries within [0, N)
  bool cond_ii = false;   // gcd coprime to N
  bool cond_iii = false;  // sum divisible by N
  std::string message;    // names the violated conditions, empty when ok
};

LabelCheck validate_labels(const LabelSpec& spec);

// Central twist per strand, as exponents e_i mod N with eps_i = omega^{e_i}.
struct EpsilonVector {
  int N = 2;
  std::vector<int> exps;
};

// Canonical compatible twist: the whole exponent a_j sits on the last index
// of the cycle traversal of I_j, all other strands get exponent 0.
EpsilonVector compatible_epsilon(const CycleDecomposition& cycles, const LabelSpec& spec);

// True iff sum of exponents over each cycle is a_j mod N.
bool verify_epsilon(const EpsilonVector& eps, const CycleDecomposition& cycles,
                    const LabelSpec& spec);

// Exponents d_i mod N with delta = 1 at the first index of every cycle.
struct DeltaVector {
  int N = 2;
  std::vector<int> exps;
};

// The recalibration exponents relating two compatible twists:
// d_{(j)^sigma} = d_j + e_j - e'_j mod N, with d = 0 at every cycle start.
// Throws if the recursion fails to close around some cycle (the two twists
// are then not compatible with the same labels).
DeltaVector recalibration_delta(const EpsilonVector& eps, const EpsilonVector& eps2,
                                const Permutation& perm, const CycleDecomposition& cycles);

// True (obstructed, so the fixed-point set is empty and h = 0) iff the
// label sum over the first block of the component partition is not a
// multiple of N. first_block holds 1-based component indices.
bool split_obstruction(const LabelSpec& spec, const std::vector<int>& first_block);

}  // namespace casson
