#include "cassonlin/sun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace casson {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

cxd omega(int N, int power) {
  double arg = 2.0 * kPi * static_cast<double>(power) / static_cast<double>(N);
  return {std::cos(arg), std::sin(arg)};
}

Matrix clock_matrix(int N) {
  if (N < 2) throw std::invalid_argument("rank must be at least 2");
  Matrix A = Matrix::Zero(N, N);
  for (int j = 0; j < N; ++j) {
    if (N % 2 == 1) {
      A(j, j) = omega(N, j);
    } else {
      // xi * omega^j = e^{i pi (2j+1)/N}
      double arg = kPi * static_cast<double>(2 * j + 1) / static_cast<double>(N);
      A(j, j) = cxd{std::cos(arg), std::sin(arg)};
    }
  }
  return A;
}

Matrix shift_matrix(int N) {
  if (N < 2) throw std::invalid_argument("rank must be at least 2");
  Matrix Y = Matrix::Zero(N, N);
  for (int j = 0; j + 1 < N; ++j) Y(j + 1, j) = 1.0;
  Y(0, N - 1) = (N % 2 == 1) ? 1.0 : -1.0;
  return Y;
}

double sun_error(const Matrix& U) {
  int N = static_cast<int>(U.rows());
  Matrix g = U.adjoint() * U - Matrix::Identity(N, N);
  return g.cwiseAbs().maxCoeff() + std::abs(U.determinant() - cxd{1.0, 0.0});
}

Matrix project_to_sun(const Matrix& M) {
  int N = static_cast<int>(M.rows());
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double smin = svd.singularValues().minCoeff();
  if (smin < 1e-300 || smin < 1e-14 * svd.singularValues().maxCoeff()) {
    throw std::invalid_argument("cannot project a singular matrix to SU(N)");
  }
  Matrix U = svd.matrixU() * svd.matrixV().adjoint();
  cxd det = U.determinant();
  double theta = std::arg(det);
  cxd z{std::cos(-theta / N), std::sin(-theta / N)};
  return z * U;
}

bool in_clock_class(const Matrix& X, double tol) {
  int N = static_cast<int>(X.rows());
  Matrix power = X;
  for (int m = 1; m < N; ++m) {
    if (std::abs(power.trace()) >= tol) return false;
    if (m + 1 < N) power = power * X;
  }
  return true;
}

std::vector<Matrix> offdiag_frame(int N) {
  std::vector<Matrix> frame;
  frame.reserve(static_cast<size_t>(N) * (N - 1));
  const double s = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < N; ++a) {
    for (int b = a + 1; b < N; ++b) {
      Matrix E1 = Matrix::Zero(N, N);
      E1(a, b) = s;
      E1(b, a) = -s;
      frame.push_back(E1);
      Matrix E2 = Matrix::Zero(N, N);
      E2(a, b) = cxd{0.0, s};
      E2(b, a) = cxd{0.0, s};
      frame.push_back(E2);
    }
  }
  return frame;
}

std::vector<Matrix> su_frame(int N) {
  std::vector<Matrix> frame = offdiag_frame(N);
  for (int l = 1; l < N; ++l) {
    Matrix D = Matrix::Zero(N, N);
    double norm = std::sqrt(static_cast<double>(l) * (l + 1));
    for (int a = 0; a < l; ++a) D(a, a) = cxd{0.0, 1.0 / norm};
    D(l, l) = cxd{0.0, -static_cast<double>(l) / norm};
    frame.push_back(D);
  }
  return frame;
}

ClassPoint make_class_point(const Matrix& X, double tol) {
  int N = static_cast<int>(X.rows());
  if (!in_clock_class(X, tol)) {
    throw std::invalid_argument("matrix is not in the clock conjugacy class");
  }
  Eigen::ComplexEigenSolver<Matrix> eig(X);
  Matrix A = clock_matrix(N);
  // Match each clock eigenvalue to the nearest eigenvalue of X; all
  // eigenvalues are simple and separated by 2 pi / N, so this is stable.
  Matrix P(N, N);
  std::vector<bool> used(static_cast<size_t>(N), false);
  for (int j = 0; j < N; ++j) {
    int best = -1;
    double best_dist = 1e300;
    for (int m = 0; m < N; ++m) {
      if (used[static_cast<size_t>(m)]) continue;
      double dist = std::abs(eig.eigenvalues()(m) - A(j, j));
      if (dist < best_dist) {
        best_dist = dist;
        best = m;
      }
    }
    used[static_cast<size_t>(best)] = true;
    P.col(j) = eig.eigenvectors().col(best).normalized();
  }
  // Eigenvectors of a (numerically) normal matrix with simple spectrum are
  // already near-orthogonal; one Gram-Schmidt pass cleans up roundoff.
  for (int j = 0; j < N; ++j) {
    for (int m = 0; m < j; ++m) P.col(j) -= P.col(m).dot(P.col(j)) * P.col(m);
    P.col(j).normalize();
  }
  ClassPoint p;
  p.P = P;
  p.X = P * A * P.adjoint();
  return p;
}

namespace {

// exp of an anti-Hermitian matrix through the eigendecomposition of -i u.
Matrix expm_antihermitian(const Matrix& u) {
  int N = static_cast<int>(u.rows());
  Matrix H = cxd{0.0, -1.0} * u;  // Hermitian
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
  Matrix E = Matrix::Zero(N, N);
  for (int j = 0; j < N; ++j) {
    double lam = eig.eigenvalues()(j);
    E(j, j) = cxd{std::cos(lam), std::sin(lam)};
  }
  return eig.eigenvectors() * E * eig.eigenvectors().adjoint();
}

// Projection of an arbitrary matrix onto the torus-complement directions
// at the class point: anti-Hermitian, traceless, zero diagonal in the
// eigenbasis of X.
Matrix project_torus_complement(const ClassPoint& p, const Matrix& u) {
  int N = p.dim();
  Matrix a = 0.5 * (u - u.adjoint());
  a -= (a.trace() / static_cast<double>(N)) * Matrix::Identity(N, N);
  Matrix b = p.P.adjoint() * a * p.P;
  for (int j = 0; j < N; ++j) b(j, j) = 0.0;
  return p.P * b * p.P.adjoint();
}

}  // namespace

ClassPoint retract_in_class(const ClassPoint& p, const Matrix& u) {
  Matrix v = project_torus_complement(p, u);
  Matrix g = expm_antihermitian(v);
  ClassPoint out;
  out.P = g * p.P;
  out.X = g * p.X * g.adjoint();
  return out;
}

Matrix conjugation_generator(const ClassPoint& p, const Matrix& V) {
  int N = p.dim();
  Matrix A = clock_matrix(N);
  // Pull the right-translated tangent vector into the eigenbasis of X and
  // solve per entry: (I - Ad_A) acts on the (a,b) entry as 1 - l_a/l_b.
  Matrix W = p.P.adjoint() * (V * p.X.adjoint()) * p.P;
  Matrix u = Matrix::Zero(N, N);
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) {
      if (a == b) continue;
      cxd mu = A(a, a) / A(b, b);
      u(a, b) = W(a, b) / (1.0 - mu);
    }
  }
  return p.P * u * p.P.adjoint();
}

std::uint64_t hash_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 on seed advanced by the index.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// Deterministic uniform doubles in [0,1) straight from splitmix64 output;
// avoids implementation-defined std::distributions.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : state_(seed) {}

  double uniform() {
    state_ = hash_seed(state_, 0);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }

  cxd gaussian_pair() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace

Matrix random_sun(int N, std::uint64_t seed) {
  DetRng rng(seed);
  Matrix G(N, N);
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) G(a, b) = rng.gaussian_pair();
  }
  // Modified Gram-Schmidt, then divide the last column by the determinant.
  for (int j = 0; j < N; ++j) {
    for (int m = 0; m < j; ++m) G.col(j) -= G.col(m).dot(G.col(j)) * G.col(m);
    G.col(j).normalize();
  }
  cxd det = G.determinant();
  G.col(N - 1) /= det;
  return G;
}

ClassPoint random_class_point(int N, std::uint64_t seed) {
  Matrix U = random_sun(N, seed);
  ClassPoint p;
  p.P = U;
  p.X = U * clock_matrix(N) * U.adjoint();
  return p;
}

Matrix evaluate_word(const std::vector<Matrix>& tuple, const FreeWord& w) {
  if (tuple.empty()) throw std::invalid_argument("empty tuple");
  int N = static_cast<int>(tuple.front().rows());
  if (w.max_generator() > static_cast<int>(tuple.size())) {
    throw std::invalid_argument("word alphabet exceeds tuple length");
  }
  Matrix out = Matrix::Identity(N, N);
  for (int s : w.symbols()) {
    const Matrix& X = tuple[static_cast<size_t>(std::abs(s)) - 1];
    if (s > 0) {
      out = out * X;
    } else {
      out = out * X.adjoint();  // unitary inverse
    }
  }
  return out;
}

RealVector fingerprint(const std::vector<Matrix>& tuple, const std::vector<FreeWord>& words) {
  RealVector f(2 * static_cast<int>(words.size()));
  for (size_t j = 0; j < words.size(); ++j) {
    cxd t = evaluate_word(tuple, words[j]).trace();
    f(2 * static_cast<int>(j)) = t.real();
    f(2 * static_cast<int>(j) + 1) = t.imag();
  }
  return f;
}

}  // namespace casson
