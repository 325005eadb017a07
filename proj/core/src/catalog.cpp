#include "cassonlin/catalog.hpp"

#include <stdexcept>

namespace casson {

BraidWord chain_braid(int components) {
  if (components < 1) throw std::invalid_argument("chain needs at least one component");
  BraidWord b;
  b.strands = components;
  for (int i = 1; i < components; ++i) {
    b.letters.push_back(i);
    b.letters.push_back(i);
  }
  return b;
}

BraidWord torus2_braid(int q) {
  if (q < 0) throw std::invalid_argument("torus2 needs q >= 0");
  BraidWord b;
  b.strands = 2;
  for (int t = 0; t < 2 * q; ++t) b.letters.push_back(1);
  return b;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> c;

    CatalogEntry hopf;
    hopf.name = "hopf";
    hopf.braid = torus2_braid(1);
    hopf.components = 2;
    hopf.provenance = "closure of s1^2; the two-component link with linking number one";
    hopf.expected = {
        {2, {1, 1}, 1, "unique irreducible commutator pair"},
        {3, {1, 2}, 1, "unique irreducible commutator pair"},
        {3, {2, 1}, 1, "unique irreducible commutator pair"},
        {4, {1, 3}, 1, "unique irreducible commutator pair"},
        {4, {3, 1}, 1, "unique irreducible commutator pair"},
        {5, {2, 3}, 1, "unique irreducible commutator pair"},
    };
    c.push_back(hopf);

    for (int n = 3; n <= 5; ++n) {
      CatalogEntry chain;
      chain.name = "chain" + std::to_string(n);
      chain.braid = chain_braid(n);
      chain.components = n;
      chain.provenance = "closure of s1^2 s2^2 ... s_{n-1}^2; the n-ring chain";
      if (n <= 4) {
        std::vector<int> ones(static_cast<size_t>(n), 1);
        chain.expected = {{n, ones, 0, "torus family, Euler characteristic zero"}};
      }
      c.push_back(chain);
    }

    for (int q = 1; q <= 4; ++q) {
      CatalogEntry t;
      t.name = "torus2_" + std::to_string(q);
      t.braid = torus2_braid(q);
      t.components = 2;
      t.provenance = "closure of s1^{2q}; the (2,2q) torus link, linking number q";
      t.expected = {{2, {1, 1}, q, "linking number count"}};
      c.push_back(t);
    }

    for (int n = 2; n <= 4; ++n) {
      CatalogEntry u;
      u.name = "unlink" + std::to_string(n);
      u.braid = BraidWord{n, {}};
      u.components = n;
      u.provenance = "empty braid; the n-component unlink";
      if (n == 2) u.expected = {{2, {1, 1}, 0, "split obstruction"}};
      c.push_back(u);
    }

    CatalogEntry split22;
    split22.name = "split_hopf_hopf";
    split22.braid = BraidWord{4, {1, 1, 3, 3}};
    split22.components = 4;
    split22.provenance = "block juxtaposition of two Hopf braids, a split union";
    split22.expected = {{2, {1, 0, 1, 0}, 0, "split obstruction"}};
    c.push_back(split22);

    CatalogEntry splithu;
    splithu.name = "split_hopf_unknot";
    splithu.braid = BraidWord{3, {1, 1}};
    splithu.components = 3;
    splithu.provenance = "Hopf braid with one trivial strand added, a split union";
    c.push_back(splithu);

    return c;
  }();
  return entries;
}

std::optional<CatalogEntry> catalog_lookup(const std::string& name) {
  for (const auto& e : catalog()) {
    if (e.name == name) return e;
  }
  return std::nullopt;
}

}  // namespace casson
