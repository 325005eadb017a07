#include "cassonlin/report.hpp"

#include <cmath>

#include <json.hpp>

namespace casson {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json braid_json(const BraidWord& b) {
  return ordered_json{{"strands", b.strands}, {"word", b.letters}, {"text", braid_to_text(b)}};
}

ordered_json matrix_json(const Matrix& M) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index a = 0; a < M.rows(); ++a) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index b = 0; b < M.cols(); ++b) {
      row.push_back(ordered_json::array({M(a, b).real(), M(a, b).imag()}));
    }
    rows.push_back(row);
  }
  return rows;
}

ordered_json vector_json(const RealVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index t = 0; t < v.size(); ++t) out.push_back(v(t));
  return out;
}

ordered_json cycles_json(const CycleDecomposition& cd) {
  ordered_json out = ordered_json::array();
  for (const auto& c : cd.cycles) out.push_back(c);
  return out;
}

ordered_json solver_config_json(const SolverConfig& cfg) {
  return ordered_json{{"restarts", cfg.restarts},
                      {"max_iters", cfg.max_iters},
                      {"tol_converge", cfg.tol_converge},
                      {"tol_reject", cfg.tol_reject},
                      {"seed", cfg.seed},
                      {"dedup_tol", cfg.dedup_tol},
                      {"threads", cfg.threads},
                      {"constrain_class", cfg.constrain_class}};
}

ordered_json invariant_config_json(const InvariantConfig& cfg) {
  ordered_json out = solver_config_json(cfg.solver);
  out["tol_kernel"] = cfg.tol_kernel;
  out["min_gap"] = cfg.min_gap;
  out["family_link_tol"] = cfg.family_link_tol;
  out["family_walk_steps"] = cfg.family_walk_steps;
  out["family_step"] = cfg.family_step;
  out["split_shortcut"] = cfg.split_shortcut;
  return out;
}

ordered_json stats_json(const RestartStats& stats) {
  ordered_json out{{"converged", stats.converged}, {"stalled", stats.stalled}};
  if (stats.stalled > 0 && std::isfinite(stats.min_stall_residual)) {
    out["min_stall_residual"] = stats.min_stall_residual;
  }
  return out;
}

ordered_json header_json(const Provenance& prov) {
  return ordered_json{{"tool", prov.tool},
                      {"version", prov.version},
                      {"mode", prov.mode},
                      {"timestamp", prov.timestamp}};
}

ordered_json class_json(const ClassAnalysis& ca, bool with_matrices) {
  ordered_json out;
  out["fingerprint"] = vector_json(ca.solution.fingerprint);
  out["residual"] = ca.solution.residual;
  out["members"] = ca.solution.members;
  out["commutant_dim"] = ca.commutant.dimension;
  out["irreducible"] = ca.commutant.irreducible;
  out["kernel_dim"] = ca.analysis.kernel_dim;
  out["gauge_dim"] = ca.analysis.gauge_dim;
  out["excess"] = ca.analysis.excess;
  if (ca.analysis.degenerate) {
    out["sign"] = nullptr;
  } else {
    out["sign"] = ca.analysis.sign;
  }
  out["degenerate"] = ca.analysis.degenerate;
  if (std::isfinite(ca.analysis.spectral_gap)) {
    out["spectral_gap"] = ca.analysis.spectral_gap;
  }
  out["gap_ok"] = ca.analysis.gap_ok;
  if (ca.family >= 0) out["family"] = ca.family;
  if (with_matrices) {
    ordered_json mats = ordered_json::array();
    for (const auto& p : ca.solution.rep) mats.push_back(matrix_json(p.X));
    out["matrices"] = mats;
  }
  return out;
}

ordered_json invariant_body_json(const InvariantReport& rep) {
  ordered_json out;
  out["braid"] = braid_json(rep.braid);
  out["N"] = rep.labels.N;
  out["labels"] = rep.labels.labels;
  out["epsilon"] = rep.eps.exps;
  out["components"] = rep.cycles.component_count();
  out["cycles"] = cycles_json(rep.cycles);
  out["stats"] = stats_json(rep.stats);
  ordered_json classes = ordered_json::array();
  for (const auto& ca : rep.classes) classes.push_back(class_json(ca, false));
  out["classes"] = classes;
  ordered_json families = ordered_json::array();
  for (const auto& f : rep.families) {
    families.push_back(ordered_json{{"classes", f.class_indices},
                                    {"excess", f.excess},
                                    {"multiplicity", f.multiplicity},
                                    {"torus_pattern", f.torus_pattern},
                                    {"walk_verified", f.walk_verified},
                                    {"walk_spread", f.walk_spread}});
  }
  out["families"] = families;
  if (rep.h_defined) {
    out["h"] = rep.h;
  } else {
    out["h"] = nullptr;
  }
  out["h_defined"] = rep.h_defined;
  out["global_sign_ambiguous"] = rep.global_sign_ambiguous;
  out["flags"] = rep.flags;
  return out;
}

}  // namespace

std::string invariant_report_json(const InvariantReport& rep, const InvariantConfig& cfg,
                                  const Provenance& prov, int indent) {
  ordered_json out = header_json(prov);
  ordered_json body = invariant_body_json(rep);
  for (auto& [key, value] : body.items()) out[key] = value;
  out["config"] = invariant_config_json(cfg);
  return out.dump(indent);
}

std::string solution_dump_json(const BraidWord& braid, const LabelSpec& labels,
                               const EpsilonVector& eps, const SolutionSet& sols,
                               const SolverConfig& cfg, const Provenance& prov, int indent) {
  ordered_json out = header_json(prov);
  out["braid"] = braid_json(braid);
  out["N"] = labels.N;
  out["labels"] = labels.labels;
  out["epsilon"] = eps.exps;
  out["stats"] = stats_json(sols.stats);
  ordered_json classes = ordered_json::array();
  for (const auto& cls : sols.classes) {
    ordered_json c;
    c["fingerprint"] = vector_json(cls.fingerprint);
    c["residual"] = cls.residual;
    c["members"] = cls.members;
    c["spread"] = cls.spread;
    ordered_json mats = ordered_json::array();
    for (const auto& p : cls.rep) mats.push_back(matrix_json(p.X));
    c["matrices"] = mats;
    classes.push_back(c);
  }
  out["classes"] = classes;
  out["config"] = solver_config_json(cfg);
  return out.dump(indent);
}

std::string markov_report_json(const MarkovCheckReport& rep, const InvariantConfig& cfg,
                               const Provenance& prov, int indent) {
  ordered_json out = header_json(prov);
  out["base"] = invariant_body_json(rep.base);
  ordered_json moves = ordered_json::array();
  for (const auto& cmp : rep.moves) {
    ordered_json m;
    m["type"] = cmp.move.type;
    if (cmp.move.type == 1) {
      m["conjugator"] = braid_json(cmp.move.conjugator);
    } else {
      m["sign"] = cmp.move.sign;
    }
    m["braid"] = braid_json(cmp.braid);
    m["labels"] = cmp.labels.labels;
    m["report"] = invariant_body_json(cmp.report);
    m["inconclusive"] = cmp.inconclusive;
    m["equal_abs_h"] = cmp.equal_abs_h;
    m["equal_excess_multiset"] = cmp.equal_excess_multiset;
    m["equal_sign_multiset"] = cmp.equal_sign_multiset;
    moves.push_back(m);
  }
  out["moves"] = moves;
  out["all_equal"] = rep.all_equal;
  out["any_inconclusive"] = rep.any_inconclusive;
  out["config"] = invariant_config_json(cfg);
  return out.dump(indent);
}

std::string epsilon_report_json(const EpsilonCheckReport& rep, const InvariantConfig& cfg,
                                const Provenance& prov, int indent) {
  ordered_json out = header_json(prov);
  ordered_json runs = ordered_json::array();
  for (const auto& run : rep.runs) {
    ordered_json r;
    r["epsilon"] = run.eps.exps;
    r["report"] = invariant_body_json(run.report);
    runs.push_back(r);
  }
  out["runs"] = runs;
  out["all_equal"] = rep.all_equal;
  out["config"] = invariant_config_json(cfg);
  return out.dump(indent);
}

}  // namespace casson
