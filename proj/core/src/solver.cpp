#include "cassonlin/solver.hpp"

#include "cassonlin/detail/word_products.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace casson {

BraidAction make_braid_action(const BraidWord& b) {
  validate_braid(b);
  BraidAction a;
  a.braid = b;
  a.perm = induced_permutation(b);
  a.cycles = cycle_decomposition(a.perm);
  a.words.reserve(static_cast<size_t>(b.strands));
  a.conjugators.reserve(static_cast<size_t>(b.strands));
  for (int i = 1; i <= b.strands; ++i) {
    a.words.push_back(act_on_generator(b, i));
    a.conjugators.push_back(conjugator_word(b, i));
  }
  return a;
}

namespace {

void check_sizes(const BraidAction& action, const EpsilonVector& eps,
                 const std::vector<Matrix>& tuple) {
  size_t k = static_cast<size_t>(action.braid.strands);
  if (tuple.size() != k) throw std::invalid_argument("tuple length does not match strand count");
  if (eps.exps.size() != k) throw std::invalid_argument("epsilon length does not match strand count");
}

struct ResidualData {
  std::vector<detail::WordEval> evals;
  std::vector<Matrix> blocks;  // R_i = X_i - eps_i rho(x_i^b)
  double sq_norm = 0.0;
};

ResidualData eval_residual(const BraidAction& action, const EpsilonVector& eps,
                           const std::vector<Matrix>& Xs, const std::vector<Matrix>& Xinvs) {
  int k = action.braid.strands;
  int N = static_cast<int>(Xs.front().rows());
  ResidualData rd;
  rd.evals.reserve(static_cast<size_t>(k));
  rd.blocks.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    rd.evals.push_back(detail::eval_word_products(Xs, Xinvs, action.words[static_cast<size_t>(i)], N));
    Matrix R = Xs[static_cast<size_t>(i)] -
               omega(eps.N, eps.exps[static_cast<size_t>(i)]) * rd.evals.back().value;
    rd.sq_norm += R.squaredNorm();
    rd.blocks.push_back(std::move(R));
  }
  return rd;
}

// Jacobian of the stacked real residual with respect to the tangent
// coefficients; directions[i] lists the variation dX_i per frame element.
RealMatrix residual_jacobian(const BraidAction& action, const EpsilonVector& eps,
                             const std::vector<Matrix>& Xinvs, const ResidualData& rd,
                             const std::vector<std::vector<Matrix>>& directions, int N) {
  int k = action.braid.strands;
  int per = static_cast<int>(directions.front().size());
  int q = k * per;
  RealMatrix J(2 * N * N * k, q);
  J.setZero();
  for (int i = 1; i <= k; ++i) {
    for (int alpha = 0; alpha < per; ++alpha) {
      int col = (i - 1) * per + alpha;
      const Matrix& dX = directions[static_cast<size_t>(i) - 1][static_cast<size_t>(alpha)];
      for (int j = 0; j < k; ++j) {
        Matrix dW = detail::word_derivative(rd.evals[static_cast<size_t>(j)],
                                    action.words[static_cast<size_t>(j)], Xinvs, i, dX, N);
        Matrix dR = -omega(eps.N, eps.exps[static_cast<size_t>(j)]) * dW;
        if (j == i - 1) dR += dX;
        detail::write_real_block_col(J, col, j, dR, N);
      }
    }
  }
  return J;
}

}  // namespace

std::vector<Matrix> apply_twisted_action(const BraidAction& action, const EpsilonVector& eps,
                                         const std::vector<Matrix>& tuple) {
  check_sizes(action, eps, tuple);
  std::vector<Matrix> out;
  out.reserve(tuple.size());
  for (size_t i = 0; i < tuple.size(); ++i) {
    out.push_back(omega(eps.N, eps.exps[i]) * evaluate_word(tuple, action.words[i]));
  }
  return out;
}

std::vector<Matrix> apply_twisted_action(const BraidWord& b, const EpsilonVector& eps,
                                         const std::vector<Matrix>& tuple) {
  return apply_twisted_action(make_braid_action(b), eps, tuple);
}

double residual(const BraidAction& action, const EpsilonVector& eps,
                const std::vector<Matrix>& tuple) {
  check_sizes(action, eps, tuple);
  std::vector<Matrix> img = apply_twisted_action(action, eps, tuple);
  double sq = 0.0;
  for (size_t i = 0; i < tuple.size(); ++i) sq += (tuple[i] - img[i]).squaredNorm();
  return sq;
}

double residual(const BraidWord& b, const EpsilonVector& eps, const std::vector<Matrix>& tuple) {
  return residual(make_braid_action(b), eps, tuple);
}

namespace {

std::vector<std::vector<Matrix>> class_directions(const RepTuple& pts,
                                                  const std::vector<Matrix>& frame) {
  std::vector<std::vector<Matrix>> dirs(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    dirs[i].reserve(frame.size());
    for (const auto& E : frame) {
      Matrix B = pts[i].P * E * pts[i].P.adjoint();
      dirs[i].push_back(B * pts[i].X - pts[i].X * B);
    }
  }
  return dirs;
}

}  // namespace

RealVector residual_gradient(const BraidAction& action, const EpsilonVector& eps,
                             const RepTuple& tuple) {
  int N = tuple.front().dim();
  std::vector<Matrix> Xs;
  Xs.reserve(tuple.size());
  for (const auto& p : tuple) Xs.push_back(p.X);
  check_sizes(action, eps, Xs);
  std::vector<Matrix> Xinvs = detail::adjoints(Xs);
  ResidualData rd = eval_residual(action, eps, Xs, Xinvs);
  auto dirs = class_directions(tuple, offdiag_frame(N));
  RealMatrix J = residual_jacobian(action, eps, Xinvs, rd, dirs, N);
  int k = action.braid.strands;
  RealVector r(2 * N * N * k);
  for (int j = 0; j < k; ++j) detail::write_real_block(r, j, rd.blocks[static_cast<size_t>(j)], N);
  return 2.0 * J.transpose() * r;
}

std::vector<FreeWord> canonical_words(int k) {
  std::vector<FreeWord> words;
  for (int i = 1; i <= k; ++i) words.push_back(FreeWord::generator(i));
  for (int i = 1; i <= k; ++i) {
    for (int j = i + 1; j <= k; ++j) words.push_back(FreeWord({i, j}));
  }
  for (int i = 1; i <= k; ++i) {
    for (int j = i + 1; j <= k; ++j) words.push_back(FreeWord({i, j, -i, -j}));
  }
  std::vector<int> full;
  for (int i = 1; i <= k; ++i) full.push_back(i);
  words.push_back(FreeWord(full));
  return words;
}

namespace {

struct RestartOutcome {
  bool converged = false;
  double final_residual = std::numeric_limits<double>::infinity();
  std::vector<Matrix> tuple;
};

// The damped Gauss-Newton loop from a given starting state. pts carries
// the class points in class mode and is ignored otherwise.
RestartOutcome gauss_newton_iterate(const BraidAction& action, const EpsilonVector& eps,
                                    const SolverConfig& cfg, RepTuple pts,
                                    std::vector<Matrix> Xs) {
  int k = action.braid.strands;
  int N = eps.N;
  std::vector<Matrix> frame = cfg.constrain_class ? offdiag_frame(N) : su_frame(N);
  int per = static_cast<int>(frame.size());
  int q = k * per;

  double lambda = 1e-3;
  std::vector<Matrix> Xinvs = detail::adjoints(Xs);
  ResidualData rd = eval_residual(action, eps, Xs, Xinvs);

  RestartOutcome out;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (rd.sq_norm < cfg.tol_converge) {
      out.converged = true;
      out.final_residual = rd.sq_norm;
      out.tuple = Xs;
      return out;
    }

    std::vector<std::vector<Matrix>> dirs;
    if (cfg.constrain_class) {
      dirs = class_directions(pts, frame);
    } else {
      dirs.assign(static_cast<size_t>(k), {});
      for (int i = 0; i < k; ++i) {
        dirs[static_cast<size_t>(i)].reserve(frame.size());
        for (const auto& E : frame) dirs[static_cast<size_t>(i)].push_back(E * Xs[static_cast<size_t>(i)]);
      }
    }
    RealMatrix J = residual_jacobian(action, eps, Xinvs, rd, dirs, N);
    RealVector r(2 * N * N * k);
    for (int j = 0; j < k; ++j) detail::write_real_block(r, j, rd.blocks[static_cast<size_t>(j)], N);
    RealVector g = J.transpose() * r;
    RealMatrix H = J.transpose() * J;

    bool stepped = false;
    while (!stepped) {
      RealMatrix Hl = H;
      Hl.diagonal().array() += lambda;
      Eigen::LDLT<RealMatrix> ldlt(Hl);
      RealVector delta;
      if (ldlt.info() == Eigen::Success) {
        delta = ldlt.solve(-g);
      }
      if (delta.size() != q || !delta.allFinite()) {
        // Damped gradient fallback.
        double scale = H.trace() / static_cast<double>(q) + lambda;
        delta = -g / scale;
      }

      RepTuple cand_pts;
      std::vector<Matrix> cand_Xs(static_cast<size_t>(k));
      if (cfg.constrain_class) {
        cand_pts.reserve(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) {
          Matrix u = Matrix::Zero(N, N);
          for (int alpha = 0; alpha < per; ++alpha) {
            double c = delta(i * per + alpha);
            if (c != 0.0) {
              u += c * (pts[static_cast<size_t>(i)].P * frame[static_cast<size_t>(alpha)] *
                        pts[static_cast<size_t>(i)].P.adjoint());
            }
          }
          cand_pts.push_back(retract_in_class(pts[static_cast<size_t>(i)], u));
          cand_Xs[static_cast<size_t>(i)] = cand_pts.back().X;
        }
      } else {
        for (int i = 0; i < k; ++i) {
          Matrix u = Matrix::Zero(N, N);
          for (int alpha = 0; alpha < per; ++alpha) {
            u += delta(i * per + alpha) * frame[static_cast<size_t>(alpha)];
          }
          Matrix H_u = cxd{0.0, -1.0} * u;
          Eigen::SelfAdjointEigenSolver<Matrix> eig(H_u);
          Matrix E = Matrix::Zero(N, N);
          for (int j = 0; j < N; ++j) {
            double lam = eig.eigenvalues()(j);
            E(j, j) = cxd{std::cos(lam), std::sin(lam)};
          }
          cand_Xs[static_cast<size_t>(i)] =
              eig.eigenvectors() * E * eig.eigenvectors().adjoint() * Xs[static_cast<size_t>(i)];
        }
      }

      std::vector<Matrix> cand_inv = detail::adjoints(cand_Xs);
      ResidualData cand_rd = eval_residual(action, eps, cand_Xs, cand_inv);
      if (cand_rd.sq_norm < rd.sq_norm) {
        pts = std::move(cand_pts);
        Xs = std::move(cand_Xs);
        Xinvs = std::move(cand_inv);
        rd = std::move(cand_rd);
        lambda = std::max(lambda * 0.3, 1e-14);
        stepped = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e15) {
          out.final_residual = rd.sq_norm;
          return out;  // stalled
        }
      }
    }
  }

  if (rd.sq_norm < cfg.tol_converge) {
    out.converged = true;
    out.tuple = Xs;
  }
  out.final_residual = rd.sq_norm;
  return out;
}

RestartOutcome run_restart(const BraidAction& action, const EpsilonVector& eps,
                           const SolverConfig& cfg, std::uint64_t restart_seed) {
  int k = action.braid.strands;
  int N = eps.N;
  RepTuple pts;
  std::vector<Matrix> Xs(static_cast<size_t>(k));
  if (cfg.constrain_class) {
    pts.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      pts.push_back(random_class_point(N, hash_seed(restart_seed, static_cast<std::uint64_t>(i))));
      Xs[static_cast<size_t>(i)] = pts.back().X;
    }
  } else {
    for (int i = 0; i < k; ++i) {
      Xs[static_cast<size_t>(i)] = random_sun(N, hash_seed(restart_seed, static_cast<std::uint64_t>(i)));
    }
  }
  return gauss_newton_iterate(action, eps, cfg, std::move(pts), std::move(Xs));
}

}  // namespace

PolishResult polish_solution(const BraidAction& action, const EpsilonVector& eps,
                             const RepTuple& start, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.constrain_class = true;
  std::vector<Matrix> Xs;
  Xs.reserve(start.size());
  for (const auto& p : start) Xs.push_back(p.X);
  RestartOutcome oc = gauss_newton_iterate(action, eps, c, start, std::move(Xs));
  PolishResult res;
  res.converged = oc.converged;
  res.residual = oc.final_residual;
  if (oc.converged) {
    res.tuple.reserve(oc.tuple.size());
    for (const auto& X : oc.tuple) res.tuple.push_back(make_class_point(X));
  }
  return res;
}

SolutionSet deduplicate(const std::vector<ConvergedSolution>& sols, int strands,
                        double dedup_tol) {
  std::vector<FreeWord> words = canonical_words(strands);
  struct Cluster {
    RealVector key;  // fingerprint of the first member
    int members = 0;
    double spread = 0.0;
    double best_residual = std::numeric_limits<double>::infinity();
    const ConvergedSolution* best = nullptr;
  };
  std::vector<Cluster> clusters;
  for (const auto& sol : sols) {
    RealVector fp = fingerprint(sol.tuple, words);
    int found = -1;
    double best_dist = dedup_tol;
    for (size_t c = 0; c < clusters.size(); ++c) {
      double dist = (fp - clusters[c].key).lpNorm<Eigen::Infinity>();
      if (dist < best_dist) {
        best_dist = dist;
        found = static_cast<int>(c);
      }
    }
    if (found < 0) {
      clusters.push_back(Cluster{fp, 0, 0.0, std::numeric_limits<double>::infinity(), nullptr});
      found = static_cast<int>(clusters.size()) - 1;
      best_dist = 0.0;
    }
    Cluster& c = clusters[static_cast<size_t>(found)];
    c.members += 1;
    c.spread = std::max(c.spread, best_dist);
    if (sol.residual < c.best_residual) {
      c.best_residual = sol.residual;
      c.best = &sol;
    }
  }

  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    int n = static_cast<int>(std::min(a.key.size(), b.key.size()));
    for (int t = 0; t < n; ++t) {
      if (a.key(t) != b.key(t)) return a.key(t) < b.key(t);
    }
    return a.key.size() < b.key.size();
  });

  SolutionSet set;
  for (const auto& c : clusters) {
    SolutionClass sc;
    sc.rep.reserve(c.best->tuple.size());
    for (const auto& X : c.best->tuple) sc.rep.push_back(make_class_point(X));
    std::vector<Matrix> clean;
    clean.reserve(sc.rep.size());
    for (const auto& p : sc.rep) clean.push_back(p.X);
    sc.fingerprint = fingerprint(clean, words);
    sc.residual = c.best_residual;
    sc.members = c.members;
    sc.spread = c.spread;
    set.classes.push_back(std::move(sc));
  }
  return set;
}

SolutionSet solve_fixed_points(const BraidWord& b, const EpsilonVector& eps,
                               const SolverConfig& cfg) {
  BraidAction action = make_braid_action(b);
  if (static_cast<int>(eps.exps.size()) != b.strands) {
    throw std::invalid_argument("epsilon length does not match strand count");
  }
  if (cfg.tol_converge >= cfg.tol_reject) {
    throw std::invalid_argument("tol_converge must be below tol_reject");
  }
  int restarts = cfg.restarts > 0 ? cfg.restarts : 200 * b.strands;
  int nthreads = cfg.threads > 0 ? cfg.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, restarts));

  std::vector<RestartOutcome> outcomes(static_cast<size_t>(restarts));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= restarts) return;
      outcomes[static_cast<size_t>(r)] =
          run_restart(action, eps, cfg, hash_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<ConvergedSolution> converged;
  RestartStats stats;
  for (const auto& oc : outcomes) {  // merge in restart order
    if (oc.converged) {
      stats.converged += 1;
      converged.push_back(ConvergedSolution{oc.tuple, oc.final_residual});
    } else {
      stats.stalled += 1;
      stats.min_stall_residual = std::min(stats.min_stall_residual, oc.final_residual);
    }
  }

  SolutionSet set;
  if (cfg.constrain_class) {
    set = deduplicate(converged, b.strands, cfg.dedup_tol);
  } else {
    // Unconstrained search: keep raw converged tuples as singleton classes
    // only if they landed in the class; callers use this mode to check that
    // the monodromy condition is automatic.
    std::vector<ConvergedSolution> in_class;
    for (const auto& sol : converged) {
      bool ok = true;
      for (const auto& X : sol.tuple) ok = ok && in_clock_class(X, 1e-6);
      if (ok) in_class.push_back(sol);
    }
    set = deduplicate(in_class, b.strands, cfg.dedup_tol);
  }
  set.stats = stats;
  return set;
}

CommutantReport verify_irreducible(const std::vector<Matrix>& tuple, double tol) {
  int N = static_cast<int>(tuple.front().rows());
  int k = static_cast<int>(tuple.size());
  std::vector<Matrix> frame = su_frame(N);
  int s = static_cast<int>(frame.size());
  RealMatrix op(2 * N * N * k, s);
  for (int m = 0; m < s; ++m) {
    for (int j = 0; j < k; ++j) {
      Matrix c = frame[static_cast<size_t>(m)] * tuple[static_cast<size_t>(j)] -
                 tuple[static_cast<size_t>(j)] * frame[static_cast<size_t>(m)];
      for (int a = 0; a < N; ++a) {
        for (int bcol = 0; bcol < N; ++bcol) {
          op(j * 2 * N * N + 2 * (a * N + bcol), m) = c(a, bcol).real();
          op(j * 2 * N * N + 2 * (a * N + bcol) + 1, m) = c(a, bcol).imag();
        }
      }
    }
  }
  Eigen::JacobiSVD<RealMatrix> svd(op);
  CommutantReport rep;
  for (int t = 0; t < svd.singularValues().size(); ++t) {
    if (svd.singularValues()(t) < tol) rep.dimension += 1;
  }
  rep.irreducible = rep.dimension == 0;
  return rep;
}

std::optional<std::vector<int>> lift_obstruction_search(const BraidWord& b,
                                                        const EpsilonVector& eps,
                                                        const std::vector<Matrix>& tuple,
                                                        double tol) {
  BraidAction action = make_braid_action(b);
  check_sizes(action, eps, tuple);
  int k = b.strands;
  int N = eps.N;
  double total = std::pow(static_cast<double>(N), k);
  if (total > 1e7) throw std::invalid_argument("candidate count N^k exceeds the 10^7 guard");

  // Signed letter counts: word i evaluated at (omega^{m} X) picks up the
  // central factor omega^{sum_j A(i,j) m_j}.
  std::vector<std::vector<long long>> A(static_cast<size_t>(k), std::vector<long long>(static_cast<size_t>(k), 0));
  std::vector<Matrix> values;
  values.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    for (int s : action.words[static_cast<size_t>(i)].symbols()) {
      A[static_cast<size_t>(i)][static_cast<size_t>(std::abs(s)) - 1] += s > 0 ? 1 : -1;
    }
    values.push_back(evaluate_word(tuple, action.words[static_cast<size_t>(i)]));
  }
  // Distance table: d(i, e) = |X_i - omega^e rho(x_i^b)|^2; the candidate
  // residual only depends on the exponent difference mod N.
  std::vector<std::vector<double>> dist(static_cast<size_t>(k), std::vector<double>(static_cast<size_t>(N), 0.0));
  for (int i = 0; i < k; ++i) {
    for (int e = 0; e < N; ++e) {
      dist[static_cast<size_t>(i)][static_cast<size_t>(e)] =
          (tuple[static_cast<size_t>(i)] - omega(N, e) * values[static_cast<size_t>(i)]).squaredNorm();
    }
  }

  std::vector<int> m(static_cast<size_t>(k), 0);
  long long count = static_cast<long long>(total);
  for (long long idx = 0; idx < count; ++idx) {
    double r = 0.0;
    for (int i = 0; i < k; ++i) {
      long long c = 0;
      for (int j = 0; j < k; ++j) c += A[static_cast<size_t>(i)][static_cast<size_t>(j)] * m[static_cast<size_t>(j)];
      int e = static_cast<int>(((c - m[static_cast<size_t>(i)]) % N + N) % N);
      r += dist[static_cast<size_t>(i)][static_cast<size_t>(e)];
      if (r >= tol) break;
    }
    if (r < tol) return m;
    // odometer increment, first index fastest
    for (int j = 0; j < k; ++j) {
      m[static_cast<size_t>(j)] += 1;
      if (m[static_cast<size_t>(j)] < N) break;
      m[static_cast<size_t>(j)] = 0;
    }
  }
  return std::nullopt;
}

}  // namespace casson
