#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cassonlin/braid.hpp"

// Built-in links with known braid presentations and, where available, the
// expected invariant values that the acceptance runs are checked against.

namespace casson {

struct ExpectedValue {
  int N = 0;
  std::vector<int> labels;
  int abs_h = 0;
  std::string note;
};

struct CatalogEntry {
  std::string name;
  BraidWord braid;
  int components = 0;
  std::vector<ExpectedValue> expected;
  std::string provenance;
};

// hopf, chain<n>, torus2_<q>, unlink<n>, split braids.
const std::vector<CatalogEntry>& catalog();

std::optional<CatalogEntry> catalog_lookup(const std::string& name);

// chain(n) = s1^2 s2^2 ... s_{n-1}^2 in B_n; torus2(q) = s1^{2q} in B_2.
BraidWord chain_braid(int components);
BraidWord torus2_braid(int q);

}  // namespace casson
