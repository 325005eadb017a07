// Acceptance suite: every release criterion in one binary, one pass/fail
// line per criterion. Exit status 0 iff all criteria hold.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "cassonlin/catalog.hpp"
#include "cassonlin/invariant.hpp"
#include "cassonlin/labels.hpp"
#include "cassonlin/solver.hpp"
#include "cassonlin/sun.hpp"

using namespace casson;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix matrix_power(const Matrix& A, int d) {
  Matrix out = Matrix::Identity(A.rows(), A.cols());
  for (int t = 0; t < d; ++t) out = out * A;
  return out;
}

std::vector<Matrix> hopf_reference(int N, int d) {
  return {shift_matrix(N), matrix_power(clock_matrix(N), d)};
}

InvariantConfig base_config(std::uint64_t seed) {
  InvariantConfig cfg;
  cfg.solver.seed = seed;
  return cfg;
}

// Reports accepted across the suite, reused by the cross-cutting property
// checks of criterion 8.
std::vector<InvariantReport> g_reports;
std::vector<std::pair<BraidWord, LabelSpec>> g_report_inputs;

void remember(const BraidWord& b, const LabelSpec& spec, const InvariantReport& rep) {
  g_reports.push_back(rep);
  g_report_inputs.emplace_back(b, spec);
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion_hopf() {
  Outcome out;
  BraidWord hopf{2, {1, 1}};
  std::vector<FreeWord> words = canonical_words(2);
  for (auto [N, d] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}, {4, 1}, {4, 3}, {5, 2}}) {
    auto t0 = std::chrono::steady_clock::now();
    InvariantConfig cfg = base_config(2026);
    cfg.solver.restarts = 200;
    LabelSpec spec{N, {d, N - d}};
    InvariantReport rep = casson_lin(hopf, spec, cfg);
    double dt = seconds_since(t0);
    std::string tag = "(N=" + std::to_string(N) + ",d=" + std::to_string(d) + ")";
    if (!rep.h_defined) out.fail(tag + " h undefined");
    if (rep.classes.size() != 1) out.fail(tag + " classes=" + std::to_string(rep.classes.size()));
    if (rep.h_defined && std::abs(rep.h) != 1) out.fail(tag + " |h|=" + std::to_string(std::abs(rep.h)));
    if (!rep.classes.empty()) {
      const auto& ca = rep.classes.front();
      if (ca.analysis.excess != 0) out.fail(tag + " excess=" + std::to_string(ca.analysis.excess));
      RealVector ref = fingerprint(hopf_reference(N, d), words);
      double dist = (ca.solution.fingerprint - ref).lpNorm<Eigen::Infinity>();
      if (dist > 1e-5) out.fail(tag + " fingerprint off by " + std::to_string(dist));
    }
    if (dt > 60.0) out.fail(tag + " took " + std::to_string(dt) + " s");
    remember(hopf, spec, rep);

    // restart-doubling stability on the cheap instances
    if (N <= 3) {
      InvariantConfig twice = cfg;
      twice.solver.restarts = 400;
      InvariantReport rep2 = casson_lin(hopf, spec, twice);
      if (rep2.classes.size() != rep.classes.size()) out.fail(tag + " class count unstable under doubling");
    }
  }
  return out;
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion_clock_shift() {
  Outcome out;
  for (int N = 2; N <= 8; ++N) {
    Matrix A = clock_matrix(N);
    Matrix Y = shift_matrix(N);
    Matrix c = A * Y * A.adjoint() * Y.adjoint() - omega(N) * Matrix::Identity(N, N);
    double err = c.cwiseAbs().maxCoeff();
    if (err > 1e-12) out.fail("N=" + std::to_string(N) + " commutator error " + std::to_string(err));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion_chains() {
  Outcome out;
  for (int N = 3; N <= 4; ++N) {
    auto t0 = std::chrono::steady_clock::now();
    BraidWord chain = chain_braid(N);
    LabelSpec spec{N, std::vector<int>(static_cast<size_t>(N), 1)};
    InvariantConfig cfg = base_config(1001);
    InvariantReport rep = casson_lin(chain, spec, cfg);
    double dt = seconds_since(t0);
    std::string tag = "chain(" + std::to_string(N) + ")";
    int want_excess = (N - 1) * (N - 2);
    if (!rep.h_defined) out.fail(tag + " h undefined");
    if (rep.h_defined && rep.h != 0) out.fail(tag + " h=" + std::to_string(rep.h));
    if (rep.classes.empty()) out.fail(tag + " found no solutions");
    for (const auto& ca : rep.classes) {
      if (ca.analysis.excess != want_excess) {
        std::string note;
        if (N == 4 && ca.analysis.excess == 5) {
          note = " (measured family dimension: the middle adjacent pair has commutator"
                 " exponent 2, not coprime to 4, so the pair is reducible with a"
                 " one-dimensional stabilizer and the family loses one dimension)";
        }
        out.fail(tag + " excess=" + std::to_string(ca.analysis.excess) + " want " +
                 std::to_string(want_excess) + note);
        break;
      }
      if (!ca.analysis.gap_ok) {
        out.fail(tag + " spectral gap " + std::to_string(ca.analysis.spectral_gap) + " < 1e3");
        break;
      }
    }
    bool torus_flag = false;
    for (const auto& f : rep.flags) torus_flag = torus_flag || f == "torus_family_chi_zero";
    if (!torus_flag) out.fail(tag + " missing torus-family flag");
    if (dt > 300.0) out.fail(tag + " took " + std::to_string(dt) + " s");
    remember(chain, spec, rep);
  }
  return out;
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion_split() {
  Outcome out;
  BraidWord split{4, {1, 1, 3, 3}};
  // Label assignment with odd sums on both sides of the 2|2 braid split.
  LabelSpec spec{2, {1, 0, 1, 0}};
  InvariantConfig cfg = base_config(7);
  InvariantReport rep = casson_lin(split, spec, cfg);
  if (!rep.h_defined || rep.h != 0) out.fail("shortcut did not produce h=0");
  if (!rep.split_shortcut_used) out.fail("split shortcut was not used");

  CycleDecomposition cd = cycle_decomposition(induced_permutation(split));
  EpsilonVector eps = compatible_epsilon(cd, spec);
  SolverConfig solver = cfg.solver;
  solver.restarts = 200;
  SolutionSet sols = solve_fixed_points(split, eps, solver);
  if (!sols.classes.empty()) out.fail("direct solve found solutions on an obstructed split");
  if (sols.stats.converged != 0) out.fail("restarts converged on an obstructed split");
  if (sols.stats.min_stall_residual < 1e-2) {
    out.fail("stall residual " + std::to_string(sols.stats.min_stall_residual) + " < 1e-2");
  }
  return out;
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion_markov() {
  Outcome out;
  for (int N = 2; N <= 3; ++N) {
    for (int q = 1; q <= 2; ++q) {
      BraidWord braid = torus2_braid(q);
      LabelSpec spec{N, {1, N - 1}};
      InvariantConfig cfg = base_config(33);
      std::vector<MarkovMove> moves;
      moves.push_back(MarkovMove{1, BraidWord{2, {1}}, 0});
      moves.push_back(MarkovMove{1, BraidWord{2, {-1}}, 0});
      moves.push_back(MarkovMove{2, BraidWord{}, +1});
      moves.push_back(MarkovMove{2, BraidWord{}, -1});
      MarkovCheckReport rep = markov_invariance_check(braid, spec, moves, cfg);
      std::string tag = (q == 1 ? std::string("hopf") : std::string("torus2(2)")) + " N=" + std::to_string(N);
      if (rep.any_inconclusive) out.fail(tag + " a move was inconclusive");
      if (!rep.all_equal) {
        for (const auto& cmp : rep.moves) {
          if (cmp.inconclusive) continue;
          if (!cmp.equal_abs_h) out.fail(tag + " |h| changed under a move");
          if (!cmp.equal_excess_multiset) out.fail(tag + " excess multiset changed under a move");
          if (!cmp.equal_sign_multiset) out.fail(tag + " sign multiset changed under a move");
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion_epsilon() {
  Outcome out;
  // Hopf with a length-2 cycle (stabilized presentation), so three distinct
  // compatible twists exist.
  BraidWord braid{3, {1, 1, 2}};
  LabelSpec spec{3, {1, 2}};
  InvariantConfig cfg = base_config(55);
  EpsilonCheckReport rep = epsilon_check(braid, spec, 3, cfg);
  if (rep.runs.size() != 3) {
    out.fail("expected 3 distinct compatible twists, got " + std::to_string(rep.runs.size()));
  }
  if (!rep.all_equal) out.fail("reports disagree across twists");
  for (const auto& run : rep.runs) {
    if (!run.report.h_defined || std::abs(run.report.h) != 1) out.fail("a twist run lost |h| = 1");
    if (run.report.classes.size() != 1) out.fail("a twist run lost the single class");
  }
  return out;
}

// ---------------------------------------------------------------- criterion 7

Outcome criterion_linking_number() {
  Outcome out;
  for (int q = 1; q <= 3; ++q) {
    auto t0 = std::chrono::steady_clock::now();
    BraidWord braid = torus2_braid(q);
    LabelSpec spec{2, {1, 1}};
    InvariantConfig cfg = base_config(404);
    InvariantReport rep = casson_lin(braid, spec, cfg);
    double dt = seconds_since(t0);
    std::string tag = "torus2(" + std::to_string(q) + ")";
    if (!rep.h_defined) out.fail(tag + " h undefined");
    if (rep.h_defined && std::abs(rep.h) != q) {
      out.fail(tag + " |h|=" + std::to_string(std::abs(rep.h)) + " want " + std::to_string(q));
    }
    if (dt > 180.0) out.fail(tag + " took " + std::to_string(dt) + " s");
    remember(braid, spec, rep);

    if (q == 2) {
      InvariantConfig twice = cfg;
      twice.solver.restarts = 2 * 200 * braid.strands;
      InvariantReport rep2 = casson_lin(braid, spec, twice);
      if (rep2.classes.size() != rep.classes.size()) out.fail(tag + " class count unstable under doubling");
    }
  }
  return out;
}

// ---------------------------------------------------------------- criterion 8

struct Lcg {
  std::uint64_t s;
  explicit Lcg(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return s >> 33;
  }
  int range(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

BraidWord random_braid(Lcg& rng, int max_strands, int max_len) {
  BraidWord b;
  b.strands = rng.range(2, max_strands);
  int len = rng.range(0, max_len);
  for (int t = 0; t < len; ++t) {
    int idx = rng.range(1, b.strands - 1);
    b.letters.push_back(rng.range(0, 1) ? idx : -idx);
  }
  return b;
}

Outcome criterion_properties() {
  Outcome out;

  // braid relations as automorphisms, k <= 5
  for (int k = 3; k <= 5; ++k) {
    for (int i = 1; i < k; ++i) {
      for (int j = 1; j < k; ++j) {
        if (std::abs(i - j) > 1) {
          for (int g = 1; g <= k; ++g) {
            if (!(act_on_generator(BraidWord{k, {i, j}}, g) ==
                  act_on_generator(BraidWord{k, {j, i}}, g))) {
              out.fail("far-commutation relation failed");
            }
          }
        }
      }
      if (i + 1 < k) {
        for (int g = 1; g <= k; ++g) {
          if (!(act_on_generator(BraidWord{k, {i, i + 1, i}}, g) ==
                act_on_generator(BraidWord{k, {i + 1, i, i + 1}}, g))) {
            out.fail("braid relation failed");
          }
        }
      }
    }
  }

  // product preservation on 200 random braids
  {
    Lcg rng(808);
    for (int t = 0; t < 200; ++t) {
      BraidWord b = random_braid(rng, 5, 10);
      std::vector<int> syms;
      for (int i = 1; i <= b.strands; ++i) syms.push_back(i);
      FreeWord product(syms);
      if (!(act_on_word(b, product) == product)) {
        out.fail("product preservation failed");
        break;
      }
    }
  }

  // conjugate form of every generator image
  {
    Lcg rng(909);
    for (int t = 0; t < 100; ++t) {
      BraidWord b = random_braid(rng, 5, 10);
      Permutation p = induced_permutation(b);
      for (int i = 1; i <= b.strands; ++i) {
        FreeWord cw = conjugator_word(b, i);
        FreeWord rebuilt = cw.concat(FreeWord::generator(p.apply(i))).concat(cw.inverse());
        if (!(rebuilt == act_on_generator(b, i))) {
          out.fail("conjugate form failed");
          break;
        }
      }
    }
  }

  // analytic residual gradient vs central differences at 100 random points
  {
    BraidAction hopf = make_braid_action(BraidWord{2, {1, 1}});
    BraidAction chain = make_braid_action(BraidWord{3, {1, 1, 2, 2}});
    int checked = 0;
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 60 && checked < 100; ++trial) {
      int N = 2 + static_cast<int>(trial % 3);
      const BraidAction& action = trial % 2 == 0 ? hopf : chain;
      int k = action.braid.strands;
      EpsilonVector eps{N, std::vector<int>(static_cast<size_t>(k), 1)};
      RepTuple pts;
      for (int i = 0; i < k; ++i) {
        pts.push_back(random_class_point(N, 5000 + 10 * trial + static_cast<std::uint64_t>(i)));
      }
      RealVector grad = residual_gradient(action, eps, pts);
      auto frame = offdiag_frame(N);
      int per = static_cast<int>(frame.size());
      double h = 1e-6;
      for (int i = 0; i < k && checked < 100; ++i) {
        for (int alpha = 0; alpha < per && checked < 100; alpha += 3) {
          Matrix u = pts[static_cast<size_t>(i)].P * frame[static_cast<size_t>(alpha)] *
                     pts[static_cast<size_t>(i)].P.adjoint();
          RepTuple plus = pts, minus = pts;
          plus[static_cast<size_t>(i)] = retract_in_class(pts[static_cast<size_t>(i)], h * u);
          minus[static_cast<size_t>(i)] = retract_in_class(pts[static_cast<size_t>(i)], -h * u);
          std::vector<Matrix> Xp, Xm;
          for (const auto& p : plus) Xp.push_back(p.X);
          for (const auto& p : minus) Xm.push_back(p.X);
          double fd = (residual(action, eps, Xp) - residual(action, eps, Xm)) / (2.0 * h);
          double an = grad(i * per + alpha);
          worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
          checked += 1;
        }
      }
    }
    if (checked < 100) out.fail("gradient check covered fewer than 100 points");
    if (worst > 1e-5) out.fail("gradient mismatch " + std::to_string(worst));
  }

  // conjugation invariance of residual, fingerprint and sign
  {
    int N = 3;
    BraidWord hopf{2, {1, 1}};
    BraidAction action = make_braid_action(hopf);
    EpsilonVector eps{N, {1, 2}};
    std::vector<Matrix> X{random_class_point(N, 61).X, random_class_point(N, 62).X};
    double base = residual(action, eps, X);
    std::vector<FreeWord> words = canonical_words(2);
    RealVector fp = fingerprint(X, words);
    RepTuple sol{make_class_point(shift_matrix(N)), make_class_point(clock_matrix(N))};
    TangentFrame f0 = build_tangent_frame(sol);
    InvariantConfig icfg;
    FixedPointAnalysis a0 =
        lefschetz_analysis(linearize(action, eps, sol, f0), gauge_matrix(sol, f0),
                           product_derivative(sol, f0), icfg);
    for (std::uint64_t s = 300; s < 303; ++s) {
      Matrix U = random_sun(N, s);
      std::vector<Matrix> Xc{U * X[0] * U.adjoint(), U * X[1] * U.adjoint()};
      if (std::abs(residual(action, eps, Xc) - base) > 1e-12 * (1.0 + base)) {
        out.fail("residual not conjugation invariant");
      }
      if ((fingerprint(Xc, words) - fp).lpNorm<Eigen::Infinity>() > 1e-10) {
        out.fail("fingerprint not conjugation invariant");
      }
      RepTuple solc;
      for (const auto& p : sol) solc.push_back(make_class_point(U * p.X * U.adjoint()));
      TangentFrame fc = build_tangent_frame(solc);
      FixedPointAnalysis ac =
          lefschetz_analysis(linearize(action, eps, solc, fc), gauge_matrix(solc, fc),
                             product_derivative(solc, fc), icfg);
      if (ac.sign != a0.sign || ac.kernel_dim != a0.kernel_dim) {
        out.fail("sign analysis not conjugation invariant");
      }
    }
  }

  // commutator pairing, lift obstruction and irreducibility at every
  // accepted solution of the suite
  {
    int pairing_checked = 0;
    for (size_t r = 0; r < g_reports.size(); ++r) {
      const InvariantReport& rep = g_reports[r];
      const BraidWord& braid = g_report_inputs[r].first;
      const LabelSpec& spec = g_report_inputs[r].second;
      BraidAction action = make_braid_action(braid);
      for (const auto& ca : rep.classes) {
        std::vector<Matrix> X;
        for (const auto& p : ca.solution.rep) X.push_back(p.X);
        if (!verify_irreducible(X).irreducible) out.fail("an accepted solution is reducible");
        for (int j = 1; j <= action.cycles.component_count(); ++j) {
          FreeWord W = longitude_word(braid, j);
          Matrix rhoW = evaluate_word(X, W);
          int start = action.cycles.cycles[static_cast<size_t>(j) - 1].front();
          const Matrix& Xi = X[static_cast<size_t>(start) - 1];
          Matrix rhs =
              omega(spec.N, spec.labels[static_cast<size_t>(j) - 1]) * rhoW * Xi * rhoW.adjoint();
          if ((Xi - rhs).norm() > 1e-8) out.fail("commutator pairing failed at a solution");
          pairing_checked += 1;
        }
      }
    }
    if (pairing_checked == 0) out.fail("no solutions available for the pairing check");

    for (int N = 2; N <= 3; ++N) {
      EpsilonVector eps{N, {1, N - 1}};
      auto witness = lift_obstruction_search(BraidWord{2, {1, 1}}, eps, hopf_reference(N, 1));
      if (witness.has_value()) out.fail("lift witness found where the obstruction forbids one");
    }
  }

  return out;
}

}  // namespace

int main() {
  struct Row {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  std::vector<Row> rows = {
      {1, "hopf link: one nondegenerate class, |h| = 1, clock/shift fingerprint", criterion_hopf},
      {2, "clock/shift commutator identity for N = 2..8", criterion_clock_shift},
      {3, "chain links: torus families, excess (N-1)(N-2), h = 0", criterion_chains},
      {4, "split vanishing: shortcut and stalled solve agree", criterion_split},
      {5, "markov invariance for hopf and torus2(2) at N = 2,3", criterion_markov},
      {6, "epsilon independence on three compatible twists", criterion_epsilon},
      {7, "linking number |h| = q for torus2(q), q = 1..3", criterion_linking_number},
      {8, "property suites: relations, product, conjugate form, gradient, invariance, pairing, lift, irreducibility",
       criterion_properties},
  };

  bool all = true;
  for (const auto& row : rows) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome oc = row.fn();
    double dt = seconds_since(t0);
    std::printf("criterion %d [%s] %s (%.1f s)%s%s\n", row.id, oc.pass ? "PASS" : "FAIL", row.name,
                dt, oc.detail.empty() ? "" : " -- ", oc.detail.c_str());
    std::fflush(stdout);
    all = all && oc.pass;
  }
  std::printf("acceptance: %s\n", all ? "ALL CRITERIA PASS" : "FAILURES PRESENT");
  return all ? 0 : 1;
}
