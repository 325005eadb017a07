#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cassonlin/braid.hpp"

// Dense complex linear algebra specialized to SU(N) and to the single
// conjugacy class C stable under multiplication by omega = e^{2 pi i/N}:
// the class of the clock matrix, whose eigenvalues are the N distinct
// N-th roots of (-1)^{N-1}.

namespace casson {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTolUnitary = 1e-10;
inline constexpr double kTolClass = 1e-8;

// omega = e^{2 pi i/N}.
cxd omega(int N, int power = 1);

// diag(1, w, .., w^{N-1}) for odd N; diag(xi, w xi, .., w^{N-1} xi) with
// xi = e^{2 pi i/2N} for even N. Determinant one in both cases.
Matrix clock_matrix(int N);

// Cyclic shift with ones on the subdiagonal and (-1)^{N-1} in the top-right
// corner. Satisfies clock * shift * clock^-1 * shift^-1 = omega * I.
Matrix shift_matrix(int N);

// max |(U^dag U - I)_{ab}| plus |det U - 1|.
double sun_error(const Matrix& U);

// Unitary polar factor, scaled by an N-th root of det^-1 to land in SU(N).
// Idempotent on SU(N) up to roundoff. Throws on singular input.
Matrix project_to_sun(const Matrix& M);

// True iff |tr(X^m)| < tol for m = 1..N-1; for unitary X this is
// equivalent to the characteristic polynomial t^N + (-1)^N.
bool in_clock_class(const Matrix& X, double tol = kTolClass);

// Orthonormal basis of su(N) under <u,v> = Re tr(u^dag v): for each a < b
// the pair (e_ab - e_ba)/sqrt2, i(e_ab + e_ba)/sqrt2 in lexicographic
// (a,b) order, followed by the N-1 diagonal generators. The leading
// N^2 - N elements span the complement of the diagonal torus algebra.
std::vector<Matrix> su_frame(int N);
std::vector<Matrix> offdiag_frame(int N);

// A point of C together with a cached unitary diagonalizer P such that
// X = P A P^-1 with A = clock_matrix(N) in its fixed eigenvalue order.
struct ClassPoint {
  Matrix X;
  Matrix P;

  int dim() const { return static_cast<int>(X.rows()); }
};

// Diagonalizes X (which must lie in the class within tol) and matches the
// eigenvalue order against the clock matrix.
ClassPoint make_class_point(const Matrix& X, double tol = kTolClass);

// exp(u) X exp(-u) for anti-Hermitian traceless u; u is projected onto the
// complement of the stabilizer torus algebra at X first, so the result
// stays exactly in the class. First-order change is u X - X u.
ClassPoint retract_in_class(const ClassPoint& p, const Matrix& u);

// Solves (I - Ad_X) u = V X^-1 for u in the torus complement at X, i.e.
// finds the conjugation generator whose retraction velocity is the tangent
// vector V at X.
Matrix conjugation_generator(const ClassPoint& p, const Matrix& V);

// U A U^dag with U approximately Haar on SU(N); deterministic per seed.
ClassPoint random_class_point(int N, std::uint64_t seed);

// Approximately Haar special unitary, deterministic per seed.
Matrix random_sun(int N, std::uint64_t seed);

// Evaluates a free word on a tuple of matrices (1-based generators).
Matrix evaluate_word(const std::vector<Matrix>& tuple, const FreeWord& w);

// Concatenated (Re, Im) of tr rho(w) for each word; invariant under
// simultaneous conjugation of the tuple.
RealVector fingerprint(const std::vector<Matrix>& tuple, const std::vector<FreeWord>& words);

// Deterministic 64-bit mix used to derive per-restart seeds.
std::uint64_t hash_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace casson
