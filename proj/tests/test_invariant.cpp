#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cassonlin/catalog.hpp"
#include "cassonlin/invariant.hpp"
#include "cassonlin/solver.hpp"

using namespace casson;

namespace {

Matrix matrix_power(const Matrix& A, int d) {
  Matrix out = Matrix::Identity(A.rows(), A.cols());
  for (int t = 0; t < d; ++t) out = out * A;
  return out;
}

RepTuple hopf_solution(int N, int d) {
  return {make_class_point(shift_matrix(N)), make_class_point(matrix_power(clock_matrix(N), d))};
}

EpsilonVector hopf_eps(int N, int d) { return EpsilonVector{N, {d, ((N - d) % N + N) % N}}; }

InvariantConfig quick_config(std::uint64_t seed, int restarts) {
  InvariantConfig cfg;
  cfg.solver.seed = seed;
  cfg.solver.restarts = restarts;
  return cfg;
}

}  // namespace

TEST_CASE("linearize the identity braid gives the identity map") {
  int N = 3;
  RepTuple pts{random_class_point(N, 1), random_class_point(N, 2)};
  BraidWord id2{2, {}};
  EpsilonVector trivial{N, {0, 0}};
  RealMatrix D = linearize(id2, trivial, pts);
  CHECK((D - RealMatrix::Identity(D.rows(), D.cols())).norm() < 1e-12);
}

TEST_CASE("linearization matches finite differences at a solution") {
  // The frame representation of the differential is faithful exactly where
  // the analysis uses it: at fixed points of the twisted action.
  for (int N = 2; N <= 3; ++N) {
    BraidWord hopf{2, {1, 1}};
    BraidAction action = make_braid_action(hopf);
    EpsilonVector eps = hopf_eps(N, 1);
    RepTuple pts = hopf_solution(N, 1);
    TangentFrame frame = build_tangent_frame(pts);
    RealMatrix D = linearize(action, eps, pts, frame);

    int per = frame.per();
    double h = 1e-6;
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int alpha = 0; alpha < per; ++alpha) {
        const Matrix& V = frame.BX[static_cast<size_t>(i)][static_cast<size_t>(alpha)];
        Matrix u = conjugation_generator(pts[static_cast<size_t>(i)], V);
        RepTuple plus = pts, minus = pts;
        plus[static_cast<size_t>(i)] = retract_in_class(pts[static_cast<size_t>(i)], h * u);
        minus[static_cast<size_t>(i)] = retract_in_class(pts[static_cast<size_t>(i)], -h * u);
        std::vector<Matrix> Xp, Xm;
        for (const auto& p : plus) Xp.push_back(p.X);
        for (const auto& p : minus) Xm.push_back(p.X);
        auto imgp = apply_twisted_action(action, eps, Xp);
        auto imgm = apply_twisted_action(action, eps, Xm);
        for (int j = 0; j < 2; ++j) {
          Matrix fd = (imgp[static_cast<size_t>(j)] - imgm[static_cast<size_t>(j)]) / (2.0 * h);
          Matrix an = Matrix::Zero(N, N);
          for (int beta = 0; beta < per; ++beta) {
            an += D(j * per + beta, i * per + alpha) *
                  frame.BX[static_cast<size_t>(j)][static_cast<size_t>(beta)];
          }
          worst = std::max(worst, (fd - an).norm() / std::max(1.0, an.norm()));
        }
      }
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("word derivatives match finite differences at arbitrary points") {
  int N = 3;
  BraidWord s1{2, {1}};
  BraidAction action = make_braid_action(s1);
  EpsilonVector eps{N, {1, 2}};
  RepTuple pts{random_class_point(N, 11), random_class_point(N, 12)};
  TangentFrame frame = build_tangent_frame(pts);
  int per = frame.per();
  double h = 1e-6;
  // Ambient comparison: the image variation of each coordinate of the
  // twisted action against a central difference along the retraction.
  std::vector<Matrix> Xs{pts[0].X, pts[1].X};
  for (int i = 0; i < 2; ++i) {
    for (int alpha = 0; alpha < per; alpha += 2) {
      const Matrix& V = frame.BX[static_cast<size_t>(i)][static_cast<size_t>(alpha)];
      Matrix u = conjugation_generator(pts[static_cast<size_t>(i)], V);
      RepTuple plus = pts, minus = pts;
      plus[static_cast<size_t>(i)] = retract_in_class(pts[static_cast<size_t>(i)], h * u);
      minus[static_cast<size_t>(i)] = retract_in_class(pts[static_cast<size_t>(i)], -h * u);
      std::vector<Matrix> Xp{plus[0].X, plus[1].X};
      std::vector<Matrix> Xm{minus[0].X, minus[1].X};
      auto imgp = apply_twisted_action(action, eps, Xp);
      auto imgm = apply_twisted_action(action, eps, Xm);
      // coordinate 2 of the s1 action is eps_2 X_2^-1 X_1 X_2; differentiate
      // by hand through the inverse and the two factors
      Matrix dX = V;
      Matrix X2inv = Xs[1].adjoint();
      Matrix an;
      if (i == 0) {
        an = omega(N, 2) * (X2inv * dX * Xs[1]);
      } else {
        an = omega(N, 2) *
             (-X2inv * dX * X2inv * Xs[0] * Xs[1] + X2inv * Xs[0] * dX);
      }
      Matrix fd = (imgp[1] - imgm[1]) / (2.0 * h);
      CHECK((fd - an).norm() / std::max(1.0, an.norm()) < 1e-5);
    }
  }
}

TEST_CASE("hopf kernel is exactly the gauge directions") {
  int N = 2;
  RepTuple pts = hopf_solution(N, 1);
  BraidWord hopf{2, {1, 1}};
  BraidAction action = make_braid_action(hopf);
  TangentFrame frame = build_tangent_frame(pts);
  RealMatrix D = linearize(action, hopf_eps(N, 1), pts, frame);
  RealMatrix L = RealMatrix::Identity(D.rows(), D.cols()) - D;
  Eigen::JacobiSVD<RealMatrix> svd(L);
  int kernel = 0;
  for (int t = 0; t < svd.singularValues().size(); ++t) {
    if (svd.singularValues()(t) < 1e-6) kernel += 1;
  }
  CHECK(kernel == N * N - 1);
}

TEST_CASE("gauge subspace has dimension N^2-1 at irreducible tuples") {
  CHECK(gauge_subspace(hopf_solution(2, 1)).cols() == 3);
  CHECK(gauge_subspace(hopf_solution(3, 1)).cols() == 8);
  RepTuple reducible{make_class_point(clock_matrix(3)), make_class_point(clock_matrix(3))};
  CHECK_THROWS_AS(gauge_subspace(reducible), std::runtime_error);
}

TEST_CASE("constrained subspace has the product-kernel dimension") {
  CHECK(constrained_subspace(hopf_solution(2, 1)).cols() == 2 * 2 - 3);
  CHECK(constrained_subspace(hopf_solution(3, 1)).cols() == 2 * 6 - 8);
  // random irreducible triple at N=2: dimension 3*2 - 3
  RepTuple triple{random_class_point(2, 5), random_class_point(2, 6), random_class_point(2, 7)};
  CHECK(constrained_subspace(triple).cols() == 3 * 2 - 3);
}

TEST_CASE("gauge directions lie in the kernel and the image stays product-tangent") {
  for (auto [N, d] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
    RepTuple pts = hopf_solution(N, d);
    BraidAction action = make_braid_action(BraidWord{2, {1, 1}});
    TangentFrame frame = build_tangent_frame(pts);
    RealMatrix D = linearize(action, hopf_eps(N, d), pts, frame);
    RealMatrix Xi = gauge_matrix(pts, frame);
    RealMatrix F = product_derivative(pts, frame);
    InvariantConfig cfg;
    FixedPointAnalysis fp = lefschetz_analysis(D, Xi, F, cfg);
    CHECK(fp.equivariance_error < 1e-10);
    CHECK(fp.product_error < 1e-10);
    CHECK(fp.kernel_dim == N * N - 1);
    CHECK(fp.excess == 0);
    CHECK_FALSE(fp.degenerate);
    CHECK((fp.sign == 1 || fp.sign == -1));
    CHECK(fp.gap_ok);
  }
}

TEST_CASE("analysis data is invariant under conjugation") {
  int N = 3;
  BraidAction action = make_braid_action(BraidWord{2, {1, 1}});
  EpsilonVector eps = hopf_eps(N, 1);
  InvariantConfig cfg;

  RepTuple pts = hopf_solution(N, 1);
  TangentFrame f1 = build_tangent_frame(pts);
  FixedPointAnalysis a1 = lefschetz_analysis(linearize(action, eps, pts, f1),
                                             gauge_matrix(pts, f1), product_derivative(pts, f1), cfg);

  for (std::uint64_t s = 100; s < 103; ++s) {
    Matrix U = random_sun(N, s);
    RepTuple conj;
    for (const auto& p : pts) conj.push_back(make_class_point(U * p.X * U.adjoint()));
    TangentFrame f2 = build_tangent_frame(conj);
    FixedPointAnalysis a2 =
        lefschetz_analysis(linearize(action, eps, conj, f2), gauge_matrix(conj, f2),
                           product_derivative(conj, f2), cfg);
    CHECK(a2.kernel_dim == a1.kernel_dim);
    CHECK(a2.excess == a1.excess);
    CHECK(a2.sign == a1.sign);
  }
}

TEST_CASE("analysis sign is invariant under torus rephasing of the diagonalizers") {
  // The cached diagonalizer of a class point is only unique up to right
  // multiplication by the torus; the canonical frame orientation must not
  // depend on that choice.
  int N = 3;
  BraidAction action = make_braid_action(BraidWord{2, {1, 1}});
  EpsilonVector eps = hopf_eps(N, 1);
  RepTuple pts = hopf_solution(N, 1);
  TangentFrame f0 = build_tangent_frame(pts);
  InvariantConfig cfg;
  FixedPointAnalysis a0 = lefschetz_analysis(linearize(action, eps, pts, f0),
                                             gauge_matrix(pts, f0), product_derivative(pts, f0), cfg);
  REQUIRE(a0.sign != 0);

  std::uint64_t state = 909;
  for (int trial = 0; trial < 4; ++trial) {
    RepTuple rephased = pts;
    for (auto& p : rephased) {
      Matrix phases = Matrix::Identity(N, N);
      for (int j = 0; j < N; ++j) {
        state = hash_seed(state, 1);
        double ang = 2.0 * 3.14159265358979 * static_cast<double>(state >> 11) * 0x1.0p-53;
        phases(j, j) = cxd{std::cos(ang), std::sin(ang)};
      }
      p.P = p.P * phases;  // same point, different diagonalizer
    }
    TangentFrame f1 = build_tangent_frame(rephased);
    FixedPointAnalysis a1 =
        lefschetz_analysis(linearize(action, eps, rephased, f1), gauge_matrix(rephased, f1),
                           product_derivative(rephased, f1), cfg);
    CHECK(a1.sign == a0.sign);
    CHECK(a1.kernel_dim == a0.kernel_dim);
  }
}

TEST_CASE("torus2(3) splits into three equal-sign classes at N=2") {
  BraidWord braid{2, {1, 1, 1, 1, 1, 1}};
  LabelSpec spec{2, {1, 1}};
  InvariantConfig cfg = quick_config(19, 150);
  InvariantReport rep = casson_lin(braid, spec, cfg);
  REQUIRE(rep.h_defined);
  CHECK(rep.classes.size() == 3);
  CHECK(std::abs(rep.h) == 3);
  int sign_sum = 0;
  for (const auto& ca : rep.classes) {
    CHECK_FALSE(ca.analysis.degenerate);
    sign_sum += ca.analysis.sign;
  }
  CHECK(std::abs(sign_sum) == 3);
}

TEST_CASE("casson_lin on the hopf link") {
  BraidWord hopf{2, {1, 1}};
  InvariantConfig cfg = quick_config(31, 80);
  InvariantReport rep = casson_lin(hopf, LabelSpec{2, {1, 1}}, cfg);
  REQUIRE(rep.h_defined);
  CHECK(rep.classes.size() == 1);
  CHECK(std::abs(rep.h) == 1);
  CHECK(rep.global_sign_ambiguous);
  CHECK(rep.classes[0].commutant.irreducible);
  CHECK(rep.classes[0].analysis.excess == 0);

  InvariantReport rep3 = casson_lin(hopf, LabelSpec{3, {1, 2}}, cfg);
  REQUIRE(rep3.h_defined);
  CHECK(rep3.classes.size() == 1);
  CHECK(std::abs(rep3.h) == 1);
}

TEST_CASE("casson_lin rejects bad inputs") {
  BraidWord hopf{2, {1, 1}};
  InvariantConfig cfg = quick_config(1, 10);
  CHECK_THROWS_AS(casson_lin(hopf, LabelSpec{3, {1, 1}}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(casson_lin(hopf, LabelSpec{2, {1, 1, 1}}, cfg), std::invalid_argument);
}

TEST_CASE("split shortcut forces h = 0 and matches the direct solve") {
  BraidWord split{4, {1, 1, 3, 3}};
  LabelSpec spec{2, {1, 0, 1, 0}};
  InvariantConfig cfg = quick_config(17, 40);
  InvariantReport rep = casson_lin(split, spec, cfg);
  REQUIRE(rep.h_defined);
  CHECK(rep.h == 0);
  CHECK(rep.split_shortcut_used);

  InvariantConfig no_shortcut = cfg;
  no_shortcut.split_shortcut = false;
  InvariantReport full = casson_lin(split, spec, no_shortcut);
  REQUIRE(full.h_defined);
  CHECK(full.h == 0);
  CHECK(full.classes.empty());
  CHECK_FALSE(full.split_shortcut_used);
}

TEST_CASE("unlink with a nonzero label has no fixed points") {
  BraidWord unlink{3, {}};
  LabelSpec spec{3, {0, 1, 2}};
  InvariantConfig cfg = quick_config(3, 30);
  InvariantReport rep = casson_lin(unlink, spec, cfg);
  REQUIRE(rep.h_defined);
  CHECK(rep.h == 0);
}

TEST_CASE("chain link at N=3 yields a torus family and h = 0") {
  BraidWord chain = chain_braid(3);
  LabelSpec spec{3, {1, 1, 1}};
  InvariantConfig cfg = quick_config(7, 120);
  InvariantReport rep = casson_lin(chain, spec, cfg);
  REQUIRE(rep.h_defined);
  CHECK(rep.h == 0);
  REQUIRE(!rep.classes.empty());
  for (const auto& ca : rep.classes) {
    CHECK(ca.analysis.degenerate);
    CHECK(ca.analysis.excess == 2);  // (N-1)(N-2)
  }
  bool torus_flag = false;
  for (const auto& f : rep.flags) torus_flag = torus_flag || f == "torus_family_chi_zero";
  CHECK(torus_flag);
  REQUIRE(!rep.families.empty());
  for (const auto& fam : rep.families) {
    CHECK(fam.torus_pattern);
    CHECK(fam.multiplicity == 1);
    CHECK(fam.walk_verified);
  }
}

TEST_CASE("chain link at N=4 has a reduced-dimension torus family and h = 0") {
  // The accumulated twist makes the middle adjacent commutator exponent 2,
  // which is not coprime to 4; that pair is reducible with a 1-dimensional
  // stabilizer and the family dimension drops from 6 to 5. The kernel is
  // still spanned by stabilizer-torus directions, so the family contributes
  // zero.
  BraidWord chain = chain_braid(4);
  LabelSpec spec{4, {1, 1, 1, 1}};
  InvariantConfig cfg = quick_config(13, 60);
  InvariantReport rep = casson_lin(chain, spec, cfg);
  REQUIRE(rep.h_defined);
  CHECK(rep.h == 0);
  REQUIRE(!rep.classes.empty());
  for (const auto& ca : rep.classes) {
    CHECK(ca.analysis.degenerate);
    CHECK(ca.analysis.excess == 5);
    CHECK(ca.analysis.gap_ok);
  }
  REQUIRE(!rep.families.empty());
  for (const auto& fam : rep.families) {
    CHECK(fam.torus_pattern);
    CHECK(fam.walk_verified);
  }
  // the middle pair is reducible while the full tuple is irreducible
  std::vector<Matrix> X;
  for (const auto& p : rep.classes.front().solution.rep) X.push_back(p.X);
  CHECK(verify_irreducible({X[1], X[2]}).dimension == 1);
  CHECK(verify_irreducible(X).dimension == 0);
}

TEST_CASE("markov moves preserve the invariant data") {
  BraidWord hopf{2, {1, 1}};
  LabelSpec spec{2, {1, 1}};
  InvariantConfig cfg = quick_config(23, 60);
  std::vector<MarkovMove> moves;
  moves.push_back(MarkovMove{1, BraidWord{2, {1}}, 0});
  moves.push_back(MarkovMove{1, BraidWord{2, {-1}}, 0});
  moves.push_back(MarkovMove{2, BraidWord{}, +1});
  moves.push_back(MarkovMove{2, BraidWord{}, -1});
  MarkovCheckReport rep = markov_invariance_check(hopf, spec, moves, cfg);
  CHECK(rep.all_equal);
  for (const auto& cmp : rep.moves) {
    CHECK(cmp.equal_abs_h);
    CHECK(cmp.equal_excess_multiset);
    CHECK(cmp.equal_sign_multiset);
  }
}

TEST_CASE("markov moves on the chain: stabilization conclusive, conjugation honestly refused") {
  // The torus-family certificate recognizes the stabilized presentations.
  // Conjugating the braid transports the family directions into
  // coordinate-conjugated patterns outside the certified candidate set, so
  // the transformed run reports h undefined; the comparison marks the move
  // inconclusive instead of claiming a violation.
  BraidWord chain = chain_braid(3);
  LabelSpec spec{3, {1, 1, 1}};
  InvariantConfig cfg = quick_config(9, 100);
  std::vector<MarkovMove> moves;
  moves.push_back(MarkovMove{2, BraidWord{}, +1});
  moves.push_back(MarkovMove{2, BraidWord{}, -1});
  moves.push_back(MarkovMove{1, BraidWord{3, {1}}, 0});
  MarkovCheckReport rep = markov_invariance_check(chain, spec, moves, cfg);
  REQUIRE(rep.base.h_defined);
  CHECK(rep.base.h == 0);
  CHECK(rep.moves[0].inconclusive == false);
  CHECK(rep.moves[0].equal_abs_h);
  CHECK(rep.moves[1].inconclusive == false);
  CHECK(rep.moves[1].equal_abs_h);
  CHECK(rep.moves[2].inconclusive == true);
  CHECK(rep.all_equal);
  CHECK(rep.any_inconclusive);
}

TEST_CASE("distinct compatible twists give the same invariant") {
  // stabilized Hopf presentation has a 2-cycle, so several twists exist
  BraidWord braid{3, {1, 1, 2}};
  LabelSpec spec{3, {1, 2}};
  InvariantConfig cfg = quick_config(41, 80);
  EpsilonCheckReport rep = epsilon_check(braid, spec, 3, cfg);
  REQUIRE(rep.runs.size() == 3);
  CHECK(rep.all_equal);
  for (const auto& run : rep.runs) {
    REQUIRE(run.report.h_defined);
    CHECK(std::abs(run.report.h) == 1);
  }
}

TEST_CASE("catalog entries declare the correct component counts") {
  for (const auto& e : catalog()) {
    CHECK(cycle_decomposition(induced_permutation(e.braid)).component_count() == e.components);
    for (const auto& x : e.expected) {
      CHECK(static_cast<int>(x.labels.size()) == e.components);
      CHECK(validate_labels({x.N, x.labels}).ok);
    }
  }
  CHECK(catalog_lookup("hopf").has_value());
  CHECK_FALSE(catalog_lookup("no_such_link").has_value());
}

TEST_CASE("epsilon variants are genuinely distinct and compatible") {
  BraidWord braid{3, {1, 1, 2}};
  LabelSpec spec{3, {1, 2}};
  auto variants = compatible_epsilon_variants(braid, spec, 3);
  REQUIRE(variants.size() == 3);
  CycleDecomposition cd = cycle_decomposition(induced_permutation(braid));
  for (size_t a = 0; a < variants.size(); ++a) {
    CHECK(verify_epsilon(variants[a], cd, spec));
    for (size_t b = a + 1; b < variants.size(); ++b) {
      CHECK(variants[a].exps != variants[b].exps);
    }
  }
}
