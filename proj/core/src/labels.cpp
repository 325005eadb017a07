#include "cassonlin/labels.hpp"

#include <numeric>
#include <stdexcept>

namespace casson {

namespace {

int mod(int v, int N) {
  int r = v % N;
  return r < 0 ? r + N : r;
}

}  // namespace

LabelCheck validate_labels(const LabelSpec& spec) {
  LabelCheck c;
  if (spec.N < 2) {
    c.message = "rank N must be at least 2";
    return c;
  }
  if (spec.labels.empty()) {
    c.message = "at least one label required";
    return c;
  }
  c.cond_i = true;
  for (int a : spec.labels) {
    if (a < 0 || a >= spec.N) c.cond_i = false;
  }
  int g = 0;
  for (int a : spec.labels) g = std::gcd(g, a);
  c.cond_ii = std::gcd(g, spec.N) == 1;
  long long sum = 0;
  for (int a : spec.labels) sum += a;
  c.cond_iii = sum % spec.N == 0;
  c.ok = c.cond_i && c.cond_ii && c.cond_iii;
  if (!c.ok) {
    std::string m = "labels violate condition(s):";
    if (!c.cond_i) m += " (i) entries must lie in [0, N)";
    if (!c.cond_ii) m += " (ii) gcd of labels must be coprime to N";
    if (!c.cond_iii) m += " (iii) label sum must be a multiple of N";
    c.message = m;
  }
  return c;
}

EpsilonVector compatible_epsilon(const CycleDecomposition& cycles, const LabelSpec& spec) {
  LabelCheck c = validate_labels(spec);
  if (!c.ok) throw std::invalid_argument(c.message);
  if (cycles.component_count() != static_cast<int>(spec.labels.size())) {
    throw std::invalid_argument("cycle count does not match label count");
  }
  int k = 0;
  for (const auto& cyc : cycles.cycles) k += static_cast<int>(cyc.size());
  EpsilonVector eps;
  eps.N = spec.N;
  eps.exps.assign(static_cast<size_t>(k), 0);
  for (size_t j = 0; j < cycles.cycles.size(); ++j) {
    int last = cycles.cycles[j].back();
    eps.exps[static_cast<size_t>(last) - 1] = mod(spec.labels[j], spec.N);
  }
  return eps;
}

bool verify_epsilon(const EpsilonVector& eps, const CycleDecomposition& cycles,
                    const LabelSpec& spec) {
  if (eps.N != spec.N) throw std::invalid_argument("rank mismatch between epsilon and labels");
  if (cycles.component_count() != static_cast<int>(spec.labels.size())) {
    throw std::invalid_argument("cycle count does not match label count");
  }
  int k = 0;
  for (const auto& cyc : cycles.cycles) k += static_cast<int>(cyc.size());
  if (static_cast<int>(eps.exps.size()) != k) {
    throw std::invalid_argument("epsilon length does not match strand count");
  }
  for (size_t j = 0; j < cycles.cycles.size(); ++j) {
    int sum = 0;
    for (int i : cycles.cycles[j]) sum += eps.exps[static_cast<size_t>(i) - 1];
    if (mod(sum - spec.labels[j], spec.N) != 0) return false;
  }
  return true;
}

DeltaVector recalibration_delta(const EpsilonVector& eps, const EpsilonVector& eps2,
                                const Permutation& perm, const CycleDecomposition& cycles) {
  if (eps.N != eps2.N) throw std::invalid_argument("rank mismatch between epsilon vectors");
  if (eps.exps.size() != eps2.exps.size() ||
      static_cast<int>(eps.exps.size()) != perm.size()) {
    throw std::invalid_argument("size mismatch between epsilon vectors and permutation");
  }
  int N = eps.N;
  DeltaVector d;
  d.N = N;
  d.exps.assign(eps.exps.size(), 0);
  for (const auto& cycle : cycles.cycles) {
    int cur = cycle.front();
    int val = 0;  // delta = 1 at the cycle start
    for (size_t t = 0; t < cycle.size(); ++t) {
      int next = perm.apply(cur);
      int nextval =
          mod(val + eps.exps[static_cast<size_t>(cur) - 1] - eps2.exps[static_cast<size_t>(cur) - 1], N);
      if (t + 1 == cycle.size()) {
        // Wrapped around; the recursion must reproduce the initial value.
        if (next != cycle.front() || nextval != 0) {
          throw std::invalid_argument(
              "delta recursion does not close around a cycle; epsilon vectors are incompatible");
        }
      } else {
        d.exps[static_cast<size_t>(next) - 1] = nextval;
      }
      cur = next;
      val = nextval;
    }
  }
  return d;
}

bool split_obstruction(const LabelSpec& spec, const std::vector<int>& first_block) {
  LabelCheck c = validate_labels(spec);
  if (!c.ok) throw std::invalid_argument(c.message);
  int n = static_cast<int>(spec.labels.size());
  if (first_block.empty() || static_cast<int>(first_block.size()) >= n) {
    throw std::invalid_argument("component partition must be nonempty on both sides");
  }
  int sum = 0;
  for (int j : first_block) {
    if (j < 1 || j > n) throw std::invalid_argument("component index out of range");
    sum += spec.labels[static_cast<size_t>(j) - 1];
  }
  return mod(sum, spec.N) != 0;
}

}  // namespace casson
