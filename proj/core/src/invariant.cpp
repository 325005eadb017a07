#include "cassonlin/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cassonlin/detail/word_products.hpp"

namespace casson {

TangentFrame build_tangent_frame(const RepTuple& tuple) {
  TangentFrame f;
  f.N = tuple.front().dim();
  f.k = static_cast<int>(tuple.size());
  std::vector<Matrix> E = offdiag_frame(f.N);
  f.B.resize(tuple.size());
  f.BX.resize(tuple.size());
  for (size_t i = 0; i < tuple.size(); ++i) {
    f.B[i].reserve(E.size());
    f.BX[i].reserve(E.size());
    for (const auto& e : E) {
      Matrix B = tuple[i].P * e * tuple[i].P.adjoint();
      f.BX[i].push_back(B * tuple[i].X);
      f.B[i].push_back(std::move(B));
    }
  }
  return f;
}

RealMatrix linearize(const BraidAction& action, const EpsilonVector& eps, const RepTuple& tuple,
                     const TangentFrame& frame) {
  int N = frame.N;
  int k = frame.k;
  int per = frame.per();
  int q = frame.dim();
  std::vector<Matrix> Xs;
  Xs.reserve(tuple.size());
  for (const auto& p : tuple) Xs.push_back(p.X);
  std::vector<Matrix> Xinvs = detail::adjoints(Xs);
  std::vector<detail::WordEval> evals;
  evals.reserve(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    evals.push_back(detail::eval_word_products(Xs, Xinvs, action.words[static_cast<size_t>(j)], N));
  }
  RealMatrix D(q, q);
  for (int i = 1; i <= k; ++i) {
    for (int alpha = 0; alpha < per; ++alpha) {
      int col = (i - 1) * per + alpha;
      const Matrix& dX = frame.BX[static_cast<size_t>(i) - 1][static_cast<size_t>(alpha)];
      for (int j = 0; j < k; ++j) {
        Matrix dPsi = omega(eps.N, eps.exps[static_cast<size_t>(j)]) *
                      detail::word_derivative(evals[static_cast<size_t>(j)],
                                              action.words[static_cast<size_t>(j)], Xinvs, i, dX, N);
        for (int beta = 0; beta < per; ++beta) {
          D(j * per + beta, col) =
              detail::re_inner(frame.BX[static_cast<size_t>(j)][static_cast<size_t>(beta)], dPsi);
        }
      }
    }
  }
  return D;
}

RealMatrix linearize(const BraidWord& b, const EpsilonVector& eps, const RepTuple& tuple) {
  return linearize(make_braid_action(b), eps, tuple, build_tangent_frame(tuple));
}

RealMatrix gauge_matrix(const RepTuple& tuple, const TangentFrame& frame) {
  int N = frame.N;
  int per = frame.per();
  int q = frame.dim();
  std::vector<Matrix> S = su_frame(N);
  int s = static_cast<int>(S.size());
  RealMatrix Xi(q, s);
  for (int m = 0; m < s; ++m) {
    for (int i = 0; i < frame.k; ++i) {
      Matrix g = S[static_cast<size_t>(m)] * tuple[static_cast<size_t>(i)].X -
                 tuple[static_cast<size_t>(i)].X * S[static_cast<size_t>(m)];
      for (int alpha = 0; alpha < per; ++alpha) {
        Xi(i * per + alpha, m) =
            detail::re_inner(frame.BX[static_cast<size_t>(i)][static_cast<size_t>(alpha)], g);
      }
    }
  }
  return Xi;
}

RealMatrix gauge_subspace(const RepTuple& tuple) {
  TangentFrame frame = build_tangent_frame(tuple);
  RealMatrix Xi = gauge_matrix(tuple, frame);
  int s = static_cast<int>(Xi.cols());
  Eigen::JacobiSVD<RealMatrix> svd(Xi, Eigen::ComputeThinU);
  int rank = 0;
  double top = svd.singularValues()(0);
  for (int t = 0; t < svd.singularValues().size(); ++t) {
    if (svd.singularValues()(t) > 1e-10 * top) rank += 1;
  }
  if (rank < s) {
    throw std::runtime_error("conjugation directions are rank deficient: tuple is reducible");
  }
  return svd.matrixU().leftCols(s);
}

RealMatrix product_derivative(const RepTuple& tuple, const TangentFrame& frame) {
  int N = frame.N;
  int k = frame.k;
  int per = frame.per();
  std::vector<Matrix> S = su_frame(N);
  int s = static_cast<int>(S.size());

  std::vector<Matrix> prefix(static_cast<size_t>(k) + 1), suffix(static_cast<size_t>(k) + 1);
  prefix[0] = Matrix::Identity(N, N);
  for (int i = 0; i < k; ++i) prefix[static_cast<size_t>(i) + 1] = prefix[static_cast<size_t>(i)] * tuple[static_cast<size_t>(i)].X;
  suffix[static_cast<size_t>(k)] = Matrix::Identity(N, N);
  for (int i = k; i-- > 0;) suffix[static_cast<size_t>(i)] = tuple[static_cast<size_t>(i)].X * suffix[static_cast<size_t>(i) + 1];
  Matrix product_inv = prefix[static_cast<size_t>(k)].adjoint();

  RealMatrix F(s, k * per);
  for (int i = 0; i < k; ++i) {
    for (int alpha = 0; alpha < per; ++alpha) {
      Matrix dP = prefix[static_cast<size_t>(i)] *
                  frame.BX[static_cast<size_t>(i)][static_cast<size_t>(alpha)] *
                  suffix[static_cast<size_t>(i) + 1];
      Matrix M = dP * product_inv;
      for (int m = 0; m < s; ++m) {
        F(m, i * per + alpha) = detail::re_inner(S[static_cast<size_t>(m)], M);
      }
    }
  }
  return F;
}

RealMatrix constrained_subspace(const RepTuple& tuple) {
  TangentFrame frame = build_tangent_frame(tuple);
  RealMatrix F = product_derivative(tuple, frame);
  int s = static_cast<int>(F.rows());
  int q = static_cast<int>(F.cols());
  Eigen::JacobiSVD<RealMatrix> svd(F, Eigen::ComputeFullV);
  double top = svd.singularValues()(0);
  if (svd.singularValues()(s - 1) < 1e-10 * top) {
    throw std::runtime_error("product derivative is rank deficient at this tuple");
  }
  return svd.matrixV().rightCols(q - s);
}

namespace {

double det_sign(const RealMatrix& M) {
  Eigen::PartialPivLU<RealMatrix> lu(M);
  double d = lu.determinant();
  return d >= 0.0 ? 1.0 : -1.0;
}

}  // namespace

FixedPointAnalysis lefschetz_analysis(const RealMatrix& D, const RealMatrix& Xi,
                                      const RealMatrix& F, const InvariantConfig& cfg) {
  int q = static_cast<int>(D.rows());
  int s = static_cast<int>(Xi.cols());
  RealMatrix L = RealMatrix::Identity(q, q) - D;

  FixedPointAnalysis out;
  out.gauge_dim = s;

  // Conjugation directions must be fixed by the linearized action.
  for (int m = 0; m < s; ++m) {
    RealVector g = Xi.col(m);
    double n = g.norm();
    if (n > 0.0) {
      out.equivariance_error = std::max(out.equivariance_error, (L * g).norm() / n);
    }
  }
  if (out.equivariance_error > 100.0 * cfg.tol_kernel) {
    throw std::runtime_error("gauge directions are not in the kernel of I - D");
  }
  // The image of I - D must stay tangent to the product level set.
  out.product_error = (F * L).norm() / std::max(1.0, L.norm());

  Eigen::JacobiSVD<RealMatrix> svd(L);
  const auto& sv = svd.singularValues();  // descending
  int kernel = 0;
  for (int t = 0; t < sv.size(); ++t) {
    if (sv(t) < cfg.tol_kernel) kernel += 1;
  }
  out.kernel_dim = kernel;
  out.excess = kernel - s;
  if (kernel == 0) {
    out.spectral_gap = std::numeric_limits<double>::infinity();
  } else if (kernel == q) {
    out.spectral_gap = std::numeric_limits<double>::infinity();
  } else {
    double largest_kernel = sv(q - kernel);
    double smallest_rest = sv(q - kernel - 1);
    out.spectral_gap = largest_kernel > 0.0 ? smallest_rest / largest_kernel
                                            : std::numeric_limits<double>::infinity();
  }
  out.gap_ok = out.spectral_gap >= cfg.min_gap;

  if (out.excess != 0 || !out.gap_ok) {
    out.degenerate = true;
    return out;
  }
  out.degenerate = false;

  // Oriented complement of the gauge block: last q - s left singular
  // vectors of Xi, flipped so that [C | Xi] is positively oriented.
  Eigen::JacobiSVD<RealMatrix> gsvd(Xi, Eigen::ComputeFullU);
  RealMatrix C = gsvd.matrixU().rightCols(q - s);
  {
    RealMatrix test(q, q);
    test << C, Xi;
    if (det_sign(test) < 0.0) C.col(0) = -C.col(0);
  }

  // Oriented kernel of the product derivative: right null space of F,
  // flipped so that [B | F^+] is positively oriented.
  Eigen::JacobiSVD<RealMatrix> fsvd(F, Eigen::ComputeFullV | Eigen::ComputeFullU);
  RealMatrix B = fsvd.matrixV().rightCols(q - s);
  {
    RealMatrix pinv = RealMatrix::Zero(q, s);
    for (int t = 0; t < s; ++t) {
      pinv += fsvd.matrixV().col(t) * (1.0 / fsvd.singularValues()(t)) *
              fsvd.matrixU().col(t).transpose();
    }
    RealMatrix test(q, q);
    test << B, pinv;
    if (det_sign(test) < 0.0) B.col(0) = -B.col(0);
  }

  RealMatrix S = B.transpose() * (L * C);
  Eigen::JacobiSVD<RealMatrix> ssvd(S);
  out.sign_margin = ssvd.singularValues()(S.rows() - 1);
  if (out.sign_margin < cfg.tol_kernel) {
    out.degenerate = true;
    out.sign = 0;
    return out;
  }
  out.sign = det_sign(S) > 0.0 ? 1 : -1;
  return out;
}

namespace {

// Maps component index to the side (1 or 2) of a split at position k1.
std::vector<int> split_first_block(const CycleDecomposition& cycles, int k1) {
  std::vector<int> first;
  for (size_t j = 0; j < cycles.cycles.size(); ++j) {
    bool left = true;
    for (int strand : cycles.cycles[j]) left = left && strand <= k1;
    if (left) first.push_back(static_cast<int>(j) + 1);
  }
  return first;
}

struct WalkResult {
  bool verified = false;
  double spread = 0.0;
};

// Zero-contribution certificate for a degenerate class: the kernel of
// I - D must be contained in the span of the conjugation directions plus
// partial stabilizer-torus conjugations (u in the torus algebra of X_i
// conjugating only the coordinates before or after i). A family swept by
// such torus actions is a quotient of a torus, so its Euler characteristic
// vanishes and it contributes nothing to the count.
bool torus_span_certified(const RepTuple& tuple, const TangentFrame& frame, const RealMatrix& Xi,
                          const RealMatrix& kernel_onb, double tol) {
  int N = frame.N;
  int k = frame.k;
  int per = frame.per();
  int q = frame.dim();
  std::vector<Matrix> S = su_frame(N);
  std::vector<RealVector> cols;
  for (int m = 0; m < Xi.cols(); ++m) cols.push_back(Xi.col(m));
  for (int i = 0; i < k; ++i) {
    for (int l = N * N - N; l < N * N - 1; ++l) {  // diagonal su elements
      Matrix u = tuple[static_cast<size_t>(i)].P * S[static_cast<size_t>(l)] *
                 tuple[static_cast<size_t>(i)].P.adjoint();
      for (int side = 0; side < 2; ++side) {
        RealVector col = RealVector::Zero(q);
        bool nonzero = false;
        for (int j = 0; j < k; ++j) {
          bool act = side == 0 ? j > i : j < i;
          if (!act) continue;
          Matrix g = u * tuple[static_cast<size_t>(j)].X - tuple[static_cast<size_t>(j)].X * u;
          for (int beta = 0; beta < per; ++beta) {
            col(j * per + beta) =
                detail::re_inner(frame.BX[static_cast<size_t>(j)][static_cast<size_t>(beta)], g);
          }
          nonzero = true;
        }
        if (nonzero) cols.push_back(std::move(col));
      }
    }
  }
  RealMatrix C(q, static_cast<int>(cols.size()));
  for (size_t m = 0; m < cols.size(); ++m) C.col(static_cast<int>(m)) = cols[m];
  Eigen::JacobiSVD<RealMatrix> svd(C, Eigen::ComputeThinU);
  int rank = 0;
  double top = svd.singularValues()(0);
  for (int t = 0; t < svd.singularValues().size(); ++t) {
    if (svd.singularValues()(t) > 1e-8 * top) rank += 1;
  }
  RealMatrix Q = svd.matrixU().leftCols(rank);
  for (int v = 0; v < kernel_onb.cols(); ++v) {
    RealVector residue = kernel_onb.col(v) - Q * (Q.transpose() * kernel_onb.col(v));
    if (residue.norm() > tol) return false;
  }
  return true;
}

// Kernel direction at the current point, orthogonal to the conjugation
// block, steered toward the previous heading when one is given.
std::optional<RealVector> kernel_heading(const RealMatrix& D, const RealMatrix& Xi,
                                         const InvariantConfig& cfg, const RealVector* previous) {
  int q = static_cast<int>(D.rows());
  int s = static_cast<int>(Xi.cols());
  RealMatrix L = RealMatrix::Identity(q, q) - D;
  Eigen::JacobiSVD<RealMatrix> svd(L, Eigen::ComputeFullV);
  int kernel = 0;
  for (int t = 0; t < svd.singularValues().size(); ++t) {
    if (svd.singularValues()(t) < cfg.tol_kernel) kernel += 1;
  }
  if (kernel <= s) return std::nullopt;
  RealMatrix Kn = svd.matrixV().rightCols(kernel);
  Eigen::HouseholderQR<RealMatrix> qr(Xi);
  RealMatrix Q = qr.householderQ() * RealMatrix::Identity(q, s);
  RealMatrix leftover = Kn - Q * (Q.transpose() * Kn);
  if (previous != nullptr) {
    RealVector v = Kn * (Kn.transpose() * *previous);
    v -= Q * (Q.transpose() * v);
    if (v.norm() > 1e-8) return RealVector(v.normalized());
  }
  Eigen::JacobiSVD<RealMatrix> lsvd(leftover, Eigen::ComputeFullU);
  return RealVector(lsvd.matrixU().col(0));
}

// Walks a kernel direction orthogonal to the gauge block: retract,
// re-converge, and watch the fingerprint. A genuine solution family stays
// solved while the fingerprint moves.
WalkResult family_walk(const BraidAction& action, const EpsilonVector& eps,
                       const SolutionClass& cls, const RealMatrix& D, const RealMatrix& Xi,
                       const InvariantConfig& cfg) {
  WalkResult res;
  int N = eps.N;
  std::vector<FreeWord> words = canonical_words(action.braid.strands);
  SolverConfig polish_cfg = cfg.solver;
  polish_cfg.max_iters = 200;

  RepTuple current = cls.rep;
  RealMatrix Dcur = D;
  RealMatrix Xicur = Xi;
  std::optional<RealVector> heading = kernel_heading(Dcur, Xicur, cfg, nullptr);
  if (!heading) return res;

  for (int step = 0; step < cfg.family_walk_steps; ++step) {
    TangentFrame frame = build_tangent_frame(current);
    int per = frame.per();
    RepTuple moved;
    moved.reserve(current.size());
    for (int i = 0; i < static_cast<int>(current.size()); ++i) {
      Matrix V = Matrix::Zero(N, N);
      for (int alpha = 0; alpha < per; ++alpha) {
        V += (*heading)(i * per + alpha) *
             frame.BX[static_cast<size_t>(i)][static_cast<size_t>(alpha)];
      }
      Matrix u = conjugation_generator(current[static_cast<size_t>(i)], cfg.family_step * V);
      moved.push_back(retract_in_class(current[static_cast<size_t>(i)], u));
    }
    PolishResult polished = polish_solution(action, eps, moved, polish_cfg);
    if (!polished.converged) return res;
    std::vector<Matrix> Xs;
    Xs.reserve(polished.tuple.size());
    for (const auto& p : polished.tuple) Xs.push_back(p.X);
    RealVector fp = fingerprint(Xs, words);
    res.spread = std::max(res.spread, (fp - cls.fingerprint).lpNorm<Eigen::Infinity>());
    current = polished.tuple;
    TangentFrame nf = build_tangent_frame(current);
    Dcur = linearize(action, eps, current, nf);
    Xicur = gauge_matrix(current, nf);
    heading = kernel_heading(Dcur, Xicur, cfg, &*heading);
    if (!heading) break;
  }
  res.verified = res.spread > 10.0 * cfg.solver.dedup_tol;
  return res;
}

}  // namespace

InvariantReport casson_lin_with_epsilon(const BraidWord& b, const LabelSpec& spec,
                                        const EpsilonVector& eps, const InvariantConfig& cfg) {
  validate_braid(b);
  LabelCheck check = validate_labels(spec);
  if (!check.ok) throw std::invalid_argument(check.message);

  InvariantReport rep;
  rep.braid = b;
  rep.labels = spec;
  rep.eps = eps;

  BraidAction action = make_braid_action(b);
  rep.cycles = action.cycles;
  if (action.cycles.component_count() != static_cast<int>(spec.labels.size())) {
    throw std::invalid_argument("component count of the closure does not match the label count");
  }
  if (!verify_epsilon(eps, action.cycles, spec)) {
    throw std::invalid_argument("epsilon vector is not compatible with the labels");
  }

  // Split shortcut: an obstructed split forces an empty fixed-point set.
  if (cfg.split_shortcut) {
    for (int k1 : split_positions(b)) {
      std::vector<int> first = split_first_block(action.cycles, k1);
      if (first.empty() || static_cast<int>(first.size()) == action.cycles.component_count()) {
        continue;
      }
      if (split_obstruction(spec, first)) {
        rep.h = 0;
        rep.h_defined = true;
        rep.split_shortcut_used = true;
        rep.flags.push_back("split_obstruction_shortcut");
        return rep;
      }
    }
  }

  SolutionSet sols = solve_fixed_points(b, eps, cfg.solver);
  rep.stats = sols.stats;

  bool undefined = false;
  for (auto& cls : sols.classes) {
    ClassAnalysis ca;
    ca.solution = cls;
    std::vector<Matrix> Xs;
    Xs.reserve(cls.rep.size());
    for (const auto& p : cls.rep) Xs.push_back(p.X);
    ca.commutant = verify_irreducible(Xs, cfg.tol_kernel);
    if (!ca.commutant.irreducible) {
      rep.flags.push_back("reducible_solution_anomaly");
      undefined = true;
      rep.classes.push_back(std::move(ca));
      continue;
    }
    try {
      TangentFrame frame = build_tangent_frame(cls.rep);
      RealMatrix D = linearize(action, eps, cls.rep, frame);
      RealMatrix Xi = gauge_matrix(cls.rep, frame);
      RealMatrix F = product_derivative(cls.rep, frame);
      ca.analysis = lefschetz_analysis(D, Xi, F, cfg);
    } catch (const std::runtime_error& e) {
      rep.flags.push_back(std::string("analysis_error: ") + e.what());
      undefined = true;
      rep.classes.push_back(std::move(ca));
      continue;
    }
    if (!ca.analysis.gap_ok) {
      rep.flags.push_back("kernel_gap_audit_failed");
      undefined = true;
    }
    rep.classes.push_back(std::move(ca));
  }

  // Group degenerate classes into families by coarse fingerprint linkage,
  // then verify the torus pattern on each group.
  std::vector<int> degenerate;
  for (size_t c = 0; c < rep.classes.size(); ++c) {
    if (rep.classes[c].analysis.degenerate && rep.classes[c].commutant.irreducible &&
        rep.classes[c].analysis.gap_ok) {
      degenerate.push_back(static_cast<int>(c));
    }
  }
  if (!degenerate.empty()) {
    int n = static_cast<int>(degenerate.size());
    std::vector<int> group(static_cast<size_t>(n), -1);
    int groups = 0;
    for (int a = 0; a < n; ++a) {
      if (group[static_cast<size_t>(a)] >= 0) continue;
      group[static_cast<size_t>(a)] = groups;
      // single linkage sweep
      bool grew = true;
      while (grew) {
        grew = false;
        for (int u = 0; u < n; ++u) {
          if (group[static_cast<size_t>(u)] != groups) continue;
          for (int v = 0; v < n; ++v) {
            if (group[static_cast<size_t>(v)] >= 0) continue;
            double dist = (rep.classes[static_cast<size_t>(degenerate[static_cast<size_t>(u)])]
                               .solution.fingerprint -
                           rep.classes[static_cast<size_t>(degenerate[static_cast<size_t>(v)])]
                               .solution.fingerprint)
                              .lpNorm<Eigen::Infinity>();
            if (dist < cfg.family_link_tol) {
              group[static_cast<size_t>(v)] = groups;
              grew = true;
            }
          }
        }
      }
      groups += 1;
    }
    int Nrank = spec.N;
    for (int g = 0; g < groups; ++g) {
      FamilyReport fam;
      int best_class = -1;
      double best_residual = std::numeric_limits<double>::infinity();
      for (int a = 0; a < n; ++a) {
        if (group[static_cast<size_t>(a)] != g) continue;
        int c = degenerate[static_cast<size_t>(a)];
        fam.class_indices.push_back(c);
        if (rep.classes[static_cast<size_t>(c)].solution.residual < best_residual) {
          best_residual = rep.classes[static_cast<size_t>(c)].solution.residual;
          best_class = c;
        }
      }
      const ClassAnalysis& lead = rep.classes[static_cast<size_t>(best_class)];
      fam.excess = lead.analysis.excess;
      fam.multiplicity = fam.excess % (Nrank - 1) == 0 ? fam.excess / (Nrank - 1) : 0;
      if (fam.excess > 0) {
        TangentFrame frame = build_tangent_frame(lead.solution.rep);
        RealMatrix D = linearize(action, eps, lead.solution.rep, frame);
        RealMatrix Xi = gauge_matrix(lead.solution.rep, frame);
        RealMatrix L = RealMatrix::Identity(D.rows(), D.cols()) - D;
        Eigen::JacobiSVD<RealMatrix> svd(L, Eigen::ComputeFullV);
        int kernel = 0;
        for (int t = 0; t < svd.singularValues().size(); ++t) {
          if (svd.singularValues()(t) < cfg.tol_kernel) kernel += 1;
        }
        RealMatrix kernel_onb = svd.matrixV().rightCols(kernel);
        fam.torus_pattern =
            torus_span_certified(lead.solution.rep, frame, Xi, kernel_onb, 100.0 * cfg.tol_kernel);
        WalkResult walk = family_walk(action, eps, lead.solution, D, Xi, cfg);
        fam.walk_verified = walk.verified;
        fam.walk_spread = walk.spread;
      }
      int fam_index = static_cast<int>(rep.families.size());
      for (int c : fam.class_indices) rep.classes[static_cast<size_t>(c)].family = fam_index;
      const char* flag =
          fam.torus_pattern && fam.walk_verified ? "torus_family_chi_zero" : "unrecognized_degeneracy";
      if (std::find(rep.flags.begin(), rep.flags.end(), flag) == rep.flags.end()) {
        rep.flags.push_back(flag);
      }
      if (!(fam.torus_pattern && fam.walk_verified)) undefined = true;
      rep.families.push_back(std::move(fam));
    }
  }

  if (undefined) {
    rep.h_defined = false;
    return rep;
  }

  // Sign sum over nondegenerate classes, normalized so the first one
  // counts positively; torus families contribute zero.
  int first_sign = 0;
  int h = 0;
  for (const auto& ca : rep.classes) {
    if (ca.analysis.degenerate) continue;
    if (first_sign == 0) first_sign = ca.analysis.sign;
  }
  for (auto& ca : rep.classes) {
    if (ca.analysis.degenerate) continue;
    if (first_sign == -1) ca.analysis.sign = -ca.analysis.sign;
    h += ca.analysis.sign;
  }
  rep.h = h;
  rep.h_defined = true;
  return rep;
}

InvariantReport casson_lin(const BraidWord& b, const LabelSpec& spec, const InvariantConfig& cfg) {
  LabelCheck check = validate_labels(spec);
  if (!check.ok) throw std::invalid_argument(check.message);
  BraidAction action = make_braid_action(b);
  if (action.cycles.component_count() != static_cast<int>(spec.labels.size())) {
    throw std::invalid_argument("component count of the closure does not match the label count");
  }
  EpsilonVector eps = compatible_epsilon(action.cycles, spec);
  return casson_lin_with_epsilon(b, spec, eps, cfg);
}

namespace {

std::vector<int> excess_multiset(const InvariantReport& rep) {
  std::vector<int> out;
  for (const auto& ca : rep.classes) out.push_back(ca.analysis.excess);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> sign_multiset(const InvariantReport& rep) {
  std::vector<int> out;
  for (const auto& ca : rep.classes) {
    if (!ca.analysis.degenerate) out.push_back(ca.analysis.sign);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Per-class signs are only meaningful up to one overall flip, so two runs
// agree when the multisets match directly or after negation.
bool signs_equal_up_to_flip(const InvariantReport& a, const InvariantReport& b) {
  std::vector<int> sa = sign_multiset(a);
  std::vector<int> sb = sign_multiset(b);
  if (sa == sb) return true;
  for (int& s : sb) s = -s;
  std::sort(sb.begin(), sb.end());
  return sa == sb;
}

}  // namespace

MarkovCheckReport markov_invariance_check(const BraidWord& b, const LabelSpec& spec,
                                          const std::vector<MarkovMove>& moves,
                                          const InvariantConfig& cfg) {
  MarkovCheckReport out;
  out.base = casson_lin(b, spec, cfg);
  out.all_equal = true;

  CycleDecomposition base_cycles = cycle_decomposition(induced_permutation(b));

  for (const auto& move : moves) {
    MarkovComparison cmp;
    cmp.move = move;
    if (move.type == 1) {
      cmp.braid = markov_conjugate(b, move.conjugator);
      // Component j of the conjugated braid collects the images of one
      // original cycle under the conjugator permutation inverse; carry the
      // label across.
      Permutation xi = induced_permutation(move.conjugator);
      CycleDecomposition new_cycles = cycle_decomposition(induced_permutation(cmp.braid));
      cmp.labels.N = spec.N;
      cmp.labels.labels.assign(new_cycles.cycles.size(), 0);
      for (size_t jp = 0; jp < new_cycles.cycles.size(); ++jp) {
        int strand = new_cycles.cycles[jp].front();
        int original = xi.apply(strand);
        for (size_t j = 0; j < base_cycles.cycles.size(); ++j) {
          const auto& cyc = base_cycles.cycles[j];
          if (std::find(cyc.begin(), cyc.end(), original) != cyc.end()) {
            cmp.labels.labels[jp] = spec.labels[j];
            break;
          }
        }
      }
    } else if (move.type == 2) {
      cmp.braid = markov_stabilize(b, move.sign);
      cmp.labels = spec;  // the new strand joins an existing component
    } else {
      throw std::invalid_argument("markov move type must be 1 or 2");
    }
    cmp.report = casson_lin(cmp.braid, cmp.labels, cfg);
    cmp.inconclusive = out.base.h_defined != cmp.report.h_defined;
    if (cmp.inconclusive) {
      out.any_inconclusive = true;
    } else {
      cmp.equal_abs_h = !out.base.h_defined || std::abs(out.base.h) == std::abs(cmp.report.h);
      cmp.equal_excess_multiset = excess_multiset(out.base) == excess_multiset(cmp.report);
      cmp.equal_sign_multiset = signs_equal_up_to_flip(out.base, cmp.report);
      out.all_equal = out.all_equal && cmp.equal_abs_h && cmp.equal_excess_multiset &&
                      cmp.equal_sign_multiset;
    }
    out.moves.push_back(std::move(cmp));
  }
  return out;
}

std::vector<EpsilonVector> compatible_epsilon_variants(const BraidWord& b, const LabelSpec& spec,
                                                       int count) {
  BraidAction action = make_braid_action(b);
  LabelCheck check = validate_labels(spec);
  if (!check.ok) throw std::invalid_argument(check.message);
  if (action.cycles.component_count() != static_cast<int>(spec.labels.size())) {
    throw std::invalid_argument("component count of the closure does not match the label count");
  }
  int N = spec.N;
  std::vector<EpsilonVector> out;
  for (int t = 0; t < count; ++t) {
    EpsilonVector eps;
    eps.N = N;
    eps.exps.assign(static_cast<size_t>(b.strands), 0);
    for (size_t j = 0; j < action.cycles.cycles.size(); ++j) {
      const auto& cyc = action.cycles.cycles[j];
      int a = ((spec.labels[j] % N) + N) % N;
      if (cyc.size() == 1 || t == 0) {
        eps.exps[static_cast<size_t>(cyc.back()) - 1] = a;
      } else {
        // Spread the exponent over the first and last strand of the cycle.
        int head = t % N;
        eps.exps[static_cast<size_t>(cyc.front()) - 1] = head;
        eps.exps[static_cast<size_t>(cyc.back()) - 1] = ((a - head) % N + N) % N;
      }
    }
    bool duplicate = false;
    for (const auto& prev : out) duplicate = duplicate || prev.exps == eps.exps;
    if (!duplicate) out.push_back(std::move(eps));
  }
  return out;
}

EpsilonCheckReport epsilon_check(const BraidWord& b, const LabelSpec& spec, int variants,
                                 const InvariantConfig& cfg) {
  EpsilonCheckReport out;
  std::vector<EpsilonVector> epsvs = compatible_epsilon_variants(b, spec, variants);
  BraidAction action = make_braid_action(b);
  for (size_t v = 0; v < epsvs.size(); ++v) {
    // Certify the recalibration between consecutive compatible twists.
    if (v > 0) recalibration_delta(epsvs[v - 1], epsvs[v], action.perm, action.cycles);
    EpsilonComparison run;
    run.eps = epsvs[v];
    run.report = casson_lin_with_epsilon(b, spec, epsvs[v], cfg);
    out.runs.push_back(std::move(run));
  }
  out.all_equal = true;
  for (size_t v = 1; v < out.runs.size(); ++v) {
    const auto& a = out.runs.front().report;
    const auto& r = out.runs[v].report;
    bool equal = a.h_defined == r.h_defined && (!a.h_defined || std::abs(a.h) == std::abs(r.h)) &&
                 a.classes.size() == r.classes.size() &&
                 excess_multiset(a) == excess_multiset(r);
    out.all_equal = out.all_equal && equal;
  }
  return out;
}

}  // namespace casson
