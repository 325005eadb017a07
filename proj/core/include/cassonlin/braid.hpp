#pragma once

#include <optional>
#include <string>
#include <vector>

// Exact symbolic layer: braid words in the Artin generators, the induced
// strand permutation and its cycles, the right action on free-group words,
// conjugator/longitude extraction, Markov moves and split detection.
//
// Composition convention. A braid word acts on the free group F_k by
// substitution, processing letters from the rightmost to the leftmost
// (the rightmost letter substitutes innermost). With this convention, on
// F_3 one gets
//
//   x1 -> x2,  x2 -> x3,  x3 -> x3^-1 x2^-1 x1 x2 x3      for s1 s2,
//   x1 -> x3,  x2 -> x3^-1 x1 x3,  x3 -> x3^-1 x2 x3      for s2 s1,
//
// and every other choice in this file (permutation composition, conjugator
// chaining, the twisted tuple action downstream) is derived from it.

namespace casson {

// A word in the Artin generators of B_k. Letters are nonzero signed
// integers: +i is the generator s_i, -i its inverse, |i| in 1..k-1.
// Words are not reduced; equality of letter lists is syntactic.
struct BraidWord {
  int strands = 1;
  std::vector<int> letters;
};

// Image table of the induced permutation, 0-indexed internally:
// image[i-1] is (i)^sigma-bar for strand i in 1..k.
struct Permutation {
  std::vector<int> image;  // values 1..k, a bijection

  int size() const { return static_cast<int>(image.size()); }
  int apply(int i) const { return image[static_cast<size_t>(i) - 1]; }
};

// Disjoint cycles of a permutation, sorted by smallest contained index,
// each cycle starting at its smallest index and following the permutation.
// The cycle count is the number of components of the braid closure.
struct CycleDecomposition {
  std::vector<std::vector<int>> cycles;

  int component_count() const { return static_cast<int>(cycles.size()); }
};

// A reduced word in the free generators x_1..x_k. Symbols are nonzero
// signed integers (+i for x_i, -i for x_i^-1); the symbol list is kept
// fully reduced at all times, so equality is syntactic.
class FreeWord {
 public:
  FreeWord() = default;
  explicit FreeWord(std::vector<int> symbols);

  static FreeWord generator(int i);

  const std::vector<int>& symbols() const { return syms_; }
  bool empty() const { return syms_.empty(); }
  int length() const { return static_cast<int>(syms_.size()); }

  FreeWord inverse() const;
  FreeWord concat(const FreeWord& other) const;

  // Largest generator index mentioned, 0 for the empty word.
  int max_generator() const;

  bool operator==(const FreeWord& other) const { return syms_ == other.syms_; }

  std::string str() const;  // e.g. "x2^-1 x1 x2"

 private:
  std::vector<int> syms_;
};

void validate_braid(const BraidWord& b);

BraidWord compose(const BraidWord& b1, const BraidWord& b2);
BraidWord inverse(const BraidWord& b);

Permutation induced_permutation(const BraidWord& b);
CycleDecomposition cycle_decomposition(const Permutation& p);

// The reduced word x_i^b.
FreeWord act_on_generator(const BraidWord& b, int i);

// Homomorphic extension of act_on_generator; the result is reduced.
FreeWord act_on_word(const BraidWord& b, const FreeWord& w);

// The reduced word w with x_i^b = w x_m w^-1, m = (i)^b-bar. Throws if
// x_i^b is not of conjugate form (that would be an action bug).
FreeWord conjugator_word(const BraidWord& b, int i);

// Longitude-type word for the closure component j (1-based): the product
// of the conjugator words chained along the j-th cycle, reduced. Canonical
// only up to conjugation and the fixed traversal start (cycle minimum).
FreeWord longitude_word(const BraidWord& b, int component);

BraidWord markov_conjugate(const BraidWord& b, const BraidWord& g);
BraidWord markov_stabilize(const BraidWord& b, int sign);

// Syntactic split detection: a position k1 such that every letter index is
// either < k1 (left block) or > k1 (right block). Letters may interleave.
struct SplitParts {
  int k1 = 0;
  BraidWord left;   // on k1 strands
  BraidWord right;  // on k - k1 strands, indices shifted down by k1
};

std::optional<SplitParts> split_decomposition(const BraidWord& b);

// All split positions k1 in 1..k-1 that satisfy the block condition.
std::vector<int> split_positions(const BraidWord& b);

// Text format "B<k>: 1 1 2 2"; negative integers are inverse generators.
// The colon after the header is optional. Rejects 0 and out-of-range
// indices.
BraidWord parse_braid(const std::string& text);
std::string braid_to_text(const BraidWord& b);

}  // namespace casson
