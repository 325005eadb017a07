#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "cassonlin/braid.hpp"
#include "cassonlin/labels.hpp"
#include "cassonlin/sun.hpp"

// Numerical search for the fixed points of the twisted braid action on the
// k-fold product of the clock conjugacy class: damped Gauss-Newton in the
// conjugation tangent frame, with seeded random restarts, fingerprint
// deduplication modulo conjugation, and the irreducibility and
// lift-obstruction checks.

namespace casson {

using RepTuple = std::vector<ClassPoint>;

struct SolverConfig {
  int restarts = 0;  // 0 selects the default 200 * strands
  int max_iters = 500;
  double tol_converge = 1e-18;  // on the squared residual
  double tol_reject = 1e-6;     // stall threshold
  std::uint64_t seed = 1;
  double dedup_tol = 1e-5;  // sup-norm on fingerprints
  int threads = 0;          // 0 selects hardware concurrency
  // When false the search runs over all of SU(N)^k instead of the class
  // product; used to check that the monodromy condition is automatic.
  bool constrain_class = true;
};

// Precomputed action data for one braid: the words x_i^b, the induced
// permutation, its cycles, and the per-strand conjugator words.
struct BraidAction {
  BraidWord braid;
  Permutation perm;
  CycleDecomposition cycles;
  std::vector<FreeWord> words;        // words[i-1] = x_i^b
  std::vector<FreeWord> conjugators;  // conjugators[i-1] from x_i^b
};

BraidAction make_braid_action(const BraidWord& b);

// Coordinate i of the twisted action: omega^{e_i} * rho_X(x_i^b).
std::vector<Matrix> apply_twisted_action(const BraidWord& b, const EpsilonVector& eps,
                                         const std::vector<Matrix>& tuple);
std::vector<Matrix> apply_twisted_action(const BraidAction& action, const EpsilonVector& eps,
                                         const std::vector<Matrix>& tuple);

// Sum of squared Frobenius norms of X_i - (eps sigma)(X)_i; zero exactly on
// the fixed-point set.
double residual(const BraidWord& b, const EpsilonVector& eps, const std::vector<Matrix>& tuple);
double residual(const BraidAction& action, const EpsilonVector& eps,
                const std::vector<Matrix>& tuple);

// Gradient of the residual with respect to the conjugation tangent frame
// (per coordinate, the off-diagonal su frame conjugated to X_i); matches
// central finite differences along retract_in_class.
RealVector residual_gradient(const BraidAction& action, const EpsilonVector& eps,
                             const RepTuple& tuple);

// The canonical fingerprint words: every x_i, every x_i x_j and commutator
// [x_i, x_j] for i < j, and the full product x_1 ... x_k.
std::vector<FreeWord> canonical_words(int k);

struct SolutionClass {
  RepTuple rep;
  double residual = 0.0;
  RealVector fingerprint;
  int members = 1;       // converged restarts that joined this cluster
  double spread = 0.0;   // max fingerprint distance to the representative
};

struct RestartStats {
  int converged = 0;
  int stalled = 0;
  double min_stall_residual = std::numeric_limits<double>::infinity();
};

struct SolutionSet {
  std::vector<SolutionClass> classes;
  RestartStats stats;
};

// One converged tuple, before deduplication.
struct ConvergedSolution {
  std::vector<Matrix> tuple;
  double residual = 0.0;
};

// Greedy fingerprint clustering of converged tuples; one representative
// (the lowest residual member) per cluster, clusters sorted by fingerprint.
SolutionSet deduplicate(const std::vector<ConvergedSolution>& sols, int strands,
                        double dedup_tol);

// Restarted damped Gauss-Newton search for Fix(eps sigma) on the class
// product. An empty class list is a valid outcome.
SolutionSet solve_fixed_points(const BraidWord& b, const EpsilonVector& eps,
                               const SolverConfig& cfg);

// Damped Gauss-Newton from a given start on the class product.
struct PolishResult {
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
  RepTuple tuple;
};

PolishResult polish_solution(const BraidAction& action, const EpsilonVector& eps,
                             const RepTuple& start, const SolverConfig& cfg);

// Commutant dimension: dim { u in su(N) : u X_i = X_i u for all i },
// counted as small singular values of the stacked commutator operator.
// Zero iff the tuple is irreducible.
struct CommutantReport {
  int dimension = 0;
  bool irreducible = false;
};

CommutantReport verify_irreducible(const std::vector<Matrix>& tuple, double tol = 1e-6);

// Exhaustively searches eta in (Z_N)^k for which eta X is fixed by the
// untwisted action, i.e. the projective representation lifts. Returns the
// exponent tuple of the first witness found, if any. Throws when N^k
// exceeds the 10^7 guard.
std::optional<std::vector<int>> lift_obstruction_search(const BraidWord& b,
                                                        const EpsilonVector& eps,
                                                        const std::vector<Matrix>& tuple,
                                                        double tol = 1e-18);

}  // namespace casson
