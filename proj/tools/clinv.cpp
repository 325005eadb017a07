// clinv: computes SU(N) Casson-Lin invariants of links presented as braid
// closures, with solver, Markov, epsilon and catalog utilities.

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cassonlin/catalog.hpp"
#include "cassonlin/invariant.hpp"
#include "cassonlin/labels.hpp"
#include "cassonlin/report.hpp"
#include "cassonlin/solver.hpp"
#include "cassonlin/version.hpp"

namespace {

using namespace casson;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitUndefined = 2;

std::string timestamp_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

Provenance make_provenance(const std::string& mode) {
  Provenance prov;
  prov.version = CASSONLIN_VERSION;
  prov.mode = mode;
  prov.timestamp = timestamp_now();
  return prov;
}

std::vector<int> parse_csv_ints(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::string tok;
  std::istringstream is(text);
  while (std::getline(is, tok, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stoi(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed " + what + " entry: '" + tok + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(what + " must not be empty");
  return out;
}

struct CommonOpts {
  std::string braid_text;
  std::string name;
  int N = 0;
  std::string labels_csv;
  std::string eps_csv;
  std::uint64_t seed = 1;
  int restarts = 0;
  int max_iters = 500;
  double tol_converge = 1e-18;
  double tol_reject = 1e-6;
  double dedup_tol = 1e-5;
  int threads = 0;
  std::string out;
  bool json = false;
  std::string config_path;
};

// plain-text "key = value" lines mirroring the solver settings; command
// line flags take precedence over file values.
void apply_config_file(CommonOpts& opts, const CLI::App* cmd) {
  if (opts.config_path.empty()) return;
  std::ifstream f(opts.config_path);
  if (!f) throw std::invalid_argument("cannot open config file: " + opts.config_path);
  auto given = [cmd](const std::string& name) {
    const CLI::Option* o = cmd->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    lineno += 1;
    std::string_view sv(line);
    auto hash = sv.find('#');
    if (hash != std::string_view::npos) sv = sv.substr(0, hash);
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    sv = trim(sv);
    if (sv.empty()) continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + " is not key = value");
    }
    std::string key(trim(sv.substr(0, eq)));
    std::string value(trim(sv.substr(eq + 1)));
    try {
      if (key == "restarts") {
        if (!given("--restarts")) opts.restarts = std::stoi(value);
      } else if (key == "max_iters") {
        if (!given("--max_iters")) opts.max_iters = std::stoi(value);
      } else if (key == "tol_converge") {
        if (!given("--tol_converge")) opts.tol_converge = std::stod(value);
      } else if (key == "tol_reject") {
        if (!given("--tol_reject")) opts.tol_reject = std::stod(value);
      } else if (key == "seed") {
        if (!given("--seed")) opts.seed = std::stoull(value);
      } else if (key == "dedup_tol") {
        if (!given("--dedup_tol")) opts.dedup_tol = std::stod(value);
      } else if (key == "threads") {
        if (!given("--threads")) opts.threads = std::stoi(value);
      } else {
        throw std::invalid_argument("unknown config key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed config value for " + key + ": '" + value + "'");
    }
  }
}

void add_braid_options(CLI::App* cmd, CommonOpts& opts) {
  auto* braid = cmd->add_option("--braid", opts.braid_text, "inline braid word, e.g. \"B3: 1 1 2 2\"");
  auto* name = cmd->add_option("--name", opts.name, "catalog entry name (see `clinv catalog`)");
  braid->excludes(name);
  name->excludes(braid);
}

void add_label_options(CLI::App* cmd, CommonOpts& opts, bool required) {
  auto* n = cmd->add_option("--N", opts.N, "rank of SU(N)");
  auto* a = cmd->add_option("--a", opts.labels_csv, "component labels, e.g. 1,1");
  if (required) {
    n->required();
    a->required();
  }
}

void add_solver_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--eps", opts.eps_csv, "twist exponent override, e.g. 0,0,1");
  cmd->add_option("--seed", opts.seed, "random restart seed");
  cmd->add_option("--restarts", opts.restarts, "restart count (0 = 200 per strand)");
  cmd->add_option("--max_iters", opts.max_iters, "iteration cap per restart");
  cmd->add_option("--tol_converge", opts.tol_converge, "squared-residual acceptance threshold");
  cmd->add_option("--tol_reject", opts.tol_reject, "stall threshold");
  cmd->add_option("--dedup_tol", opts.dedup_tol, "fingerprint dedup tolerance");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
  cmd->add_option("--out", opts.out, "write the JSON report to this path");
  cmd->add_flag("--json", opts.json, "print the JSON report to stdout");
  cmd->add_option("--config", opts.config_path, "key = value file mirroring these solver settings");
}

BraidWord resolve_braid(const CommonOpts& opts) {
  if (!opts.braid_text.empty()) return parse_braid(opts.braid_text);
  if (!opts.name.empty()) {
    auto entry = catalog_lookup(opts.name);
    if (!entry) throw std::invalid_argument("unknown catalog entry: " + opts.name);
    return entry->braid;
  }
  throw std::invalid_argument("one of --braid or --name is required");
}

LabelSpec resolve_labels(const CommonOpts& opts) {
  if (opts.N < 2) throw std::invalid_argument("--N must be at least 2");
  LabelSpec spec;
  spec.N = opts.N;
  spec.labels = parse_csv_ints(opts.labels_csv, "labels");
  LabelCheck check = validate_labels(spec);
  if (!check.ok) throw std::invalid_argument(check.message);
  return spec;
}

InvariantConfig resolve_config(const CommonOpts& opts) {
  InvariantConfig cfg;
  cfg.solver.seed = opts.seed;
  cfg.solver.restarts = opts.restarts;
  cfg.solver.max_iters = opts.max_iters;
  cfg.solver.tol_converge = opts.tol_converge;
  cfg.solver.tol_reject = opts.tol_reject;
  cfg.solver.dedup_tol = opts.dedup_tol;
  cfg.solver.threads = opts.threads;
  return cfg;
}

std::optional<EpsilonVector> resolve_eps(const CommonOpts& opts, const BraidWord& braid,
                                         const LabelSpec& spec) {
  if (opts.eps_csv.empty()) return std::nullopt;
  EpsilonVector eps;
  eps.N = spec.N;
  eps.exps = parse_csv_ints(opts.eps_csv, "eps");
  if (static_cast<int>(eps.exps.size()) != braid.strands) {
    throw std::invalid_argument("--eps length must equal the strand count");
  }
  for (int& e : eps.exps) e = ((e % spec.N) + spec.N) % spec.N;
  CycleDecomposition cd = cycle_decomposition(induced_permutation(braid));
  if (!verify_epsilon(eps, cd, spec)) {
    throw std::invalid_argument("--eps is not compatible with the labels");
  }
  return eps;
}

void emit(const std::string& json, const CommonOpts& opts) {
  if (!opts.out.empty()) {
    std::ofstream f(opts.out);
    if (!f) throw std::invalid_argument("cannot open output path: " + opts.out);
    f << json << '\n';
  }
  if (opts.json || opts.out.empty()) std::cout << json << '\n';
}

int run_invariant(const CommonOpts& opts) {
  BraidWord braid = resolve_braid(opts);
  LabelSpec spec = resolve_labels(opts);
  InvariantConfig cfg = resolve_config(opts);
  auto eps = resolve_eps(opts, braid, spec);
  InvariantReport rep = eps ? casson_lin_with_epsilon(braid, spec, *eps, cfg)
                            : casson_lin(braid, spec, cfg);
  std::string json = invariant_report_json(rep, cfg, make_provenance("invariant"));
  emit(json, opts);
  if (!opts.json && !opts.out.empty()) {
    if (rep.h_defined) {
      std::cout << "h = " << rep.h << " (defined up to a global sign), classes: "
                << rep.classes.size() << ", converged " << rep.stats.converged << "/"
                << rep.stats.converged + rep.stats.stalled << '\n';
    } else {
      std::cout << "h undefined (unrecognized degeneracy), classes: " << rep.classes.size()
                << '\n';
    }
  }
  return rep.h_defined ? kExitOk : kExitUndefined;
}

int run_solve(const CommonOpts& opts) {
  BraidWord braid = resolve_braid(opts);
  LabelSpec spec = resolve_labels(opts);
  InvariantConfig cfg = resolve_config(opts);
  CycleDecomposition cd = cycle_decomposition(induced_permutation(braid));
  if (cd.component_count() != static_cast<int>(spec.labels.size())) {
    throw std::invalid_argument("component count of the closure does not match the label count");
  }
  auto eps_opt = resolve_eps(opts, braid, spec);
  EpsilonVector eps = eps_opt ? *eps_opt : compatible_epsilon(cd, spec);
  SolutionSet sols = solve_fixed_points(braid, eps, cfg.solver);
  std::string json = solution_dump_json(braid, spec, eps, sols, cfg.solver, make_provenance("solve"));
  emit(json, opts);
  return kExitOk;
}

int run_validate(const CommonOpts& opts) {
  if (opts.N < 2) throw std::invalid_argument("--N must be at least 2");
  LabelSpec spec;
  spec.N = opts.N;
  spec.labels = parse_csv_ints(opts.labels_csv, "labels");
  LabelCheck check = validate_labels(spec);
  if (!check.ok) {
    std::cerr << check.message << '\n';
    return kExitInputError;
  }
  if (!opts.braid_text.empty() || !opts.name.empty()) {
    BraidWord braid = resolve_braid(opts);
    CycleDecomposition cd = cycle_decomposition(induced_permutation(braid));
    if (cd.component_count() != static_cast<int>(spec.labels.size())) {
      std::cerr << "label count " << spec.labels.size() << " does not match the "
                << cd.component_count() << " closure components\n";
      return kExitInputError;
    }
  }
  std::cout << "labels ok\n";
  return kExitOk;
}

int run_markov(const CommonOpts& opts) {
  BraidWord braid = resolve_braid(opts);
  LabelSpec spec = resolve_labels(opts);
  InvariantConfig cfg = resolve_config(opts);
  std::vector<MarkovMove> moves;
  BraidWord s1{braid.strands, {1}};
  BraidWord s1inv{braid.strands, {-1}};
  moves.push_back(MarkovMove{1, s1, 0});
  moves.push_back(MarkovMove{1, s1inv, 0});
  moves.push_back(MarkovMove{2, BraidWord{}, +1});
  moves.push_back(MarkovMove{2, BraidWord{}, -1});
  MarkovCheckReport rep = markov_invariance_check(braid, spec, moves, cfg);
  std::string json = markov_report_json(rep, cfg, make_provenance("markov-check"));
  emit(json, opts);
  if (!rep.all_equal) {
    std::cout << "markov check FAILED\n";
  } else if (rep.any_inconclusive) {
    std::cout << "markov check inconclusive: a transformed presentation has an"
                 " unclassified degeneracy\n";
  } else {
    std::cout << "markov check passed\n";
  }
  return rep.all_equal && !rep.any_inconclusive ? kExitOk : kExitUndefined;
}

int run_epsilon(const CommonOpts& opts, int variants) {
  BraidWord braid = resolve_braid(opts);
  LabelSpec spec = resolve_labels(opts);
  InvariantConfig cfg = resolve_config(opts);
  EpsilonCheckReport rep = epsilon_check(braid, spec, variants, cfg);
  std::string json = epsilon_report_json(rep, cfg, make_provenance("epsilon-check"));
  emit(json, opts);
  std::cout << "compatible twists tried: " << rep.runs.size() << ", "
            << (rep.all_equal ? "all agree\n" : "MISMATCH\n");
  return rep.all_equal ? kExitOk : kExitUndefined;
}

int run_conjecture(const CommonOpts& opts, int qmax, int nmax) {
  if (qmax < 1 || qmax > 4 || nmax < 2 || nmax > 4) {
    throw std::invalid_argument("conjecture scan is desk-scale: q in 1..4, N in 2..4");
  }
  InvariantConfig cfg = resolve_config(opts);
  std::printf("exploratory scan:  |h| for the (2,2q) torus link vs q^(N-1)\n");
  std::printf("%4s %4s %12s %12s\n", "q", "N", "|h|", "q^(N-1)");
  for (int q = 1; q <= qmax; ++q) {
    for (int N = 2; N <= nmax; ++N) {
      LabelSpec spec{N, {1, N - 1}};
      InvariantReport rep = casson_lin(torus2_braid(q), spec, cfg);
      double target = std::pow(static_cast<double>(q), N - 1);
      if (rep.h_defined) {
        std::printf("%4d %4d %12d %12.0f\n", q, N, std::abs(rep.h), target);
      } else {
        std::printf("%4d %4d %12s %12.0f\n", q, N, "undef", target);
      }
    }
  }
  std::printf("computed values are reported, not asserted\n");
  return kExitOk;
}

int run_catalog() {
  for (const auto& e : catalog()) {
    std::printf("%-18s %-22s components=%d   %s\n", e.name.c_str(),
                braid_to_text(e.braid).c_str(), e.components, e.provenance.c_str());
    for (const auto& x : e.expected) {
      std::string labels;
      for (size_t t = 0; t < x.labels.size(); ++t) {
        labels += (t ? "," : "") + std::to_string(x.labels[t]);
      }
      std::printf("    N=%d a=%s  expected |h| = %d  (%s)\n", x.N, labels.c_str(), x.abs_h,
                  x.note.c_str());
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SU(N) Casson-Lin invariants of braid-closure links"};
  app.set_version_flag("--version", CASSONLIN_VERSION);
  app.require_subcommand(1);

  CommonOpts opts;
  int variants = 3;
  int qmax = 3;
  int nmax = 3;

  auto* validate = app.add_subcommand("validate", "check labels (and optionally a braid) for allowability");
  add_braid_options(validate, opts);
  add_label_options(validate, opts, true);

  auto* solve = app.add_subcommand("solve", "solve the twisted fixed-point equation and dump solutions");
  add_braid_options(solve, opts);
  add_label_options(solve, opts, true);
  add_solver_options(solve, opts);

  auto* invariant = app.add_subcommand("invariant", "compute the invariant h");
  add_braid_options(invariant, opts);
  add_label_options(invariant, opts, true);
  add_solver_options(invariant, opts);

  auto* markov = app.add_subcommand("markov-check", "verify invariance under Markov moves");
  add_braid_options(markov, opts);
  add_label_options(markov, opts, true);
  add_solver_options(markov, opts);

  auto* epscheck = app.add_subcommand("epsilon-check", "verify independence of the twist choice");
  add_braid_options(epscheck, opts);
  add_label_options(epscheck, opts, true);
  add_solver_options(epscheck, opts);
  epscheck->add_option("--variants", variants, "number of compatible twists to try");

  auto* conjecture = app.add_subcommand("conjecture-scan",
                                        "exploratory table of |h| against powers of the linking number");
  add_solver_options(conjecture, opts);
  conjecture->add_option("--qmax", qmax, "largest torus parameter q");
  conjecture->add_option("--Nmax", nmax, "largest rank N");

  auto* cat = app.add_subcommand("catalog", "list the built-in links");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return run_validate(opts);
    if (app.got_subcommand(solve)) {
      apply_config_file(opts, solve);
      return run_solve(opts);
    }
    if (app.got_subcommand(invariant)) {
      apply_config_file(opts, invariant);
      return run_invariant(opts);
    }
    if (app.got_subcommand(markov)) {
      apply_config_file(opts, markov);
      return run_markov(opts);
    }
    if (app.got_subcommand(epscheck)) {
      apply_config_file(opts, epscheck);
      return run_epsilon(opts, variants);
    }
    if (app.got_subcommand(conjecture)) {
      apply_config_file(opts, conjecture);
      return run_conjecture(opts, qmax, nmax);
    }
    if (app.got_subcommand(cat)) return run_catalog();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
