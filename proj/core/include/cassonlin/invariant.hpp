#pragma once

#include <string>
#include <vector>

#include "cassonlin/braid.hpp"
#include "cassonlin/labels.hpp"
#include "cassonlin/solver.hpp"
#include "cassonlin/sun.hpp"

// Linearization of the twisted action at a solution, gauge and
// product-tangent subspaces, Lefschetz-type signs, and the assembly of the
// invariant h with its Markov and epsilon cross-checks.
//
// All spectral data lives in the canonical orthonormal tangent frame of the
// class product: at each coordinate the off-diagonal su frame conjugated by
// the cached diagonalizer, right-translated by X_i. The kernel of I - D is
// measured on this full tangent space; it always contains the N^2 - 1
// conjugation directions, and a solution is nondegenerate exactly when it
// contains nothing else. The sign of a nondegenerate class is the sign of
// the determinant of I - D viewed as a map from the gauge complement onto
// the kernel of the product derivative, with both bases oriented against
// fixed references (the complex orientation of the class carried by the
// diagonalizers, and the standard su(N) frame), so the per-class signs are
// consistent within a run and the overall sign is a single global
// convention.

namespace casson {

struct InvariantConfig {
  SolverConfig solver;
  double tol_kernel = 1e-6;     // singular values below this count as kernel
  double min_gap = 1e3;         // required ratio across the kernel cut
  double family_link_tol = 0.5;  // coarse fingerprint linkage for families
  int family_walk_steps = 4;    // steps taken along a kernel direction
  double family_step = 0.1;     // tangent-norm step size of the walk
  bool split_shortcut = true;
};

// The canonical tangent frame at a tuple: frame vector (i, alpha) is
// B_{i,alpha} X_i with B_{i,alpha} = P_i E_alpha P_i^dag.
struct TangentFrame {
  int N = 0;
  int k = 0;
  std::vector<std::vector<Matrix>> B;
  std::vector<std::vector<Matrix>> BX;

  int per() const { return static_cast<int>(B.front().size()); }
  int dim() const { return k * per(); }
};

TangentFrame build_tangent_frame(const RepTuple& tuple);

// Matrix of the differential of the twisted action in the canonical frame;
// real dimension k (N^2 - N).
RealMatrix linearize(const BraidAction& action, const EpsilonVector& eps, const RepTuple& tuple,
                     const TangentFrame& frame);
RealMatrix linearize(const BraidWord& b, const EpsilonVector& eps, const RepTuple& tuple);

// Raw conjugation directions in frame coordinates, one column per su(N)
// frame element (u X_i - X_i u stacked over i).
RealMatrix gauge_matrix(const RepTuple& tuple, const TangentFrame& frame);

// Orthonormal basis of the conjugation directions. Throws when the
// dimension falls short of N^2 - 1 (the tuple is then reducible).
RealMatrix gauge_subspace(const RepTuple& tuple);

// Right-trivialized derivative of the product map in the canonical frame,
// one row per su(N) frame element.
RealMatrix product_derivative(const RepTuple& tuple, const TangentFrame& frame);

// Orthonormal basis of the kernel of the product derivative, dimension
// k (N^2 - N) - (N^2 - 1). Throws when the product derivative is rank
// deficient (it is surjective at every irreducible tuple).
RealMatrix constrained_subspace(const RepTuple& tuple);

struct FixedPointAnalysis {
  int kernel_dim = 0;  // of I - D on the class-product tangent space
  int gauge_dim = 0;   // N^2 - 1
  int excess = 0;      // kernel_dim - gauge_dim
  int sign = 0;        // +1 or -1 when defined, 0 otherwise
  bool degenerate = true;
  double spectral_gap = 0.0;  // ratio across the kernel cut in the singular values
  bool gap_ok = false;
  double equivariance_error = 0.0;  // max |(I - D) g| over unit gauge vectors
  double product_error = 0.0;       // |F (I - D)|, image must stay product-tangent
  double sign_margin = 0.0;         // smallest singular value of the sign operator
};

// Kernel count, spectral-gap audit and, at excess zero, the oriented sign.
// D, Xi and F must come from the same frame. Throws when the gauge
// directions fail to lie in the kernel (a numerical failure upstream).
FixedPointAnalysis lefschetz_analysis(const RealMatrix& D, const RealMatrix& Xi,
                                      const RealMatrix& F, const InvariantConfig& cfg);

struct ClassAnalysis {
  SolutionClass solution;
  CommutantReport commutant;
  FixedPointAnalysis analysis;
  int family = -1;  // index into InvariantReport::families when degenerate
};

struct FamilyReport {
  std::vector<int> class_indices;
  int excess = 0;
  int multiplicity = 0;        // excess / (N - 1) when that division is exact, else 0
  bool torus_pattern = false;  // kernel spanned by gauge + stabilizer-torus directions
  bool walk_verified = false;  // kernel walk stayed solved and moved the fingerprint
  double walk_spread = 0.0;
};

struct InvariantReport {
  BraidWord braid;
  LabelSpec labels;
  EpsilonVector eps;
  CycleDecomposition cycles;
  RestartStats stats;
  std::vector<ClassAnalysis> classes;
  std::vector<FamilyReport> families;
  bool h_defined = false;
  int h = 0;
  bool global_sign_ambiguous = true;
  bool split_shortcut_used = false;
  std::vector<std::string> flags;
};

// The full pipeline: split shortcut, twist construction, fixed-point
// search, per-class analysis, torus-family handling, sign sum. The labels
// must validate and match the component count. Signs are normalized so the
// first nondegenerate class counts positively; the overall sign of h is a
// convention, recorded by global_sign_ambiguous.
InvariantReport casson_lin(const BraidWord& b, const LabelSpec& spec, const InvariantConfig& cfg);

// As above with an explicit compatible twist instead of the canonical one.
InvariantReport casson_lin_with_epsilon(const BraidWord& b, const LabelSpec& spec,
                                        const EpsilonVector& eps, const InvariantConfig& cfg);

struct MarkovMove {
  int type = 1;          // 1 = conjugation, 2 = stabilization
  BraidWord conjugator;  // type 1
  int sign = 1;          // type 2
};

struct MarkovComparison {
  MarkovMove move;
  BraidWord braid;
  LabelSpec labels;  // labels remapped to the transformed component order
  InvariantReport report;
  // True when one side could not classify its degeneracies; the move then
  // neither confirms nor refutes invariance.
  bool inconclusive = false;
  bool equal_abs_h = false;
  bool equal_excess_multiset = false;
  bool equal_sign_multiset = false;
};

struct MarkovCheckReport {
  InvariantReport base;
  std::vector<MarkovComparison> moves;
  bool all_equal = false;  // every conclusive move agrees
  bool any_inconclusive = false;
};

MarkovCheckReport markov_invariance_check(const BraidWord& b, const LabelSpec& spec,
                                          const std::vector<MarkovMove>& moves,
                                          const InvariantConfig& cfg);

// Distinct compatible twists for the braid (the canonical one plus
// variants that spread each cycle's exponent over two strands).
std::vector<EpsilonVector> compatible_epsilon_variants(const BraidWord& b, const LabelSpec& spec,
                                                       int count);

struct EpsilonComparison {
  EpsilonVector eps;
  InvariantReport report;
};

struct EpsilonCheckReport {
  std::vector<EpsilonComparison> runs;
  bool all_equal = false;  // |h|, class count and excess multiset agree
};

EpsilonCheckReport epsilon_check(const BraidWord& b, const LabelSpec& spec, int variants,
                                 const InvariantConfig& cfg);

}  // namespace casson
