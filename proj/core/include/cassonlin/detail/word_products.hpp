#pragma once

#include <cstdlib>
#include <vector>

#include "cassonlin/braid.hpp"
#include "cassonlin/sun.hpp"

// Word evaluation with cached prefix/suffix products, shared by the solver
// and the linearization. tuple inverses are passed in as adjoints.

namespace casson::detail {

struct WordEval {
  std::vector<Matrix> prefix;  // prefix[t] = product of factors 0..t-1
  std::vector<Matrix> suffix;  // suffix[t] = product of factors t+1..m-1
  Matrix value;
};

inline WordEval eval_word_products(const std::vector<Matrix>& Xs,
                                   const std::vector<Matrix>& Xinvs, const FreeWord& w, int N) {
  const auto& syms = w.symbols();
  size_t m = syms.size();
  WordEval ev;
  ev.prefix.resize(m + 1);
  ev.suffix.resize(m + 1);
  ev.prefix[0] = Matrix::Identity(N, N);
  for (size_t t = 0; t < m; ++t) {
    int s = syms[t];
    const Matrix& f = s > 0 ? Xs[static_cast<size_t>(s) - 1] : Xinvs[static_cast<size_t>(-s) - 1];
    ev.prefix[t + 1] = ev.prefix[t] * f;
  }
  ev.suffix[m] = Matrix::Identity(N, N);
  for (size_t t = m; t-- > 0;) {
    int s = syms[t];
    const Matrix& f = s > 0 ? Xs[static_cast<size_t>(s) - 1] : Xinvs[static_cast<size_t>(-s) - 1];
    ev.suffix[t] = f * ev.suffix[t + 1];
  }
  ev.value = ev.prefix[m];
  return ev;
}

// Derivative of the word value along the one-coordinate variation
// dX_{coord} = dX, all other coordinates held fixed. For an inverse letter
// d(X^-1) = -X^-1 dX X^-1.
inline Matrix word_derivative(const WordEval& ev, const FreeWord& w,
                              const std::vector<Matrix>& Xinvs, int coord, const Matrix& dX,
                              int N) {
  Matrix acc = Matrix::Zero(N, N);
  const auto& syms = w.symbols();
  for (size_t t = 0; t < syms.size(); ++t) {
    int s = syms[t];
    if (std::abs(s) != coord) continue;
    if (s > 0) {
      acc += ev.prefix[t] * dX * ev.suffix[t + 1];
    } else {
      const Matrix& Xi = Xinvs[static_cast<size_t>(coord) - 1];
      acc -= ev.prefix[t] * (Xi * dX * Xi) * ev.suffix[t + 1];
    }
  }
  return acc;
}

inline void write_real_block(RealVector& v, int block, const Matrix& M, int N) {
  int base = block * 2 * N * N;
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) {
      v(base + 2 * (a * N + b)) = M(a, b).real();
      v(base + 2 * (a * N + b) + 1) = M(a, b).imag();
    }
  }
}

inline void write_real_block_col(RealMatrix& J, int col, int block, const Matrix& M, int N) {
  int base = block * 2 * N * N;
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) {
      J(base + 2 * (a * N + b), col) = M(a, b).real();
      J(base + 2 * (a * N + b) + 1, col) = M(a, b).imag();
    }
  }
}

inline std::vector<Matrix> adjoints(const std::vector<Matrix>& Xs) {
  std::vector<Matrix> out;
  out.reserve(Xs.size());
  for (const auto& X : Xs) out.push_back(X.adjoint());
  return out;
}

// Real inner product Re tr(U^dag V).
inline double re_inner(const Matrix& U, const Matrix& V) {
  return (U.array().conjugate() * V.array()).sum().real();
}

}  // namespace casson::detail
