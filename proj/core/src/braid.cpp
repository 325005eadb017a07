#include "cassonlin/braid.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace casson {

namespace {

void reduce_append(std::vector<int>& out, int sym) {
  if (!out.empty() && out.back() == -sym) {
    out.pop_back();
  } else {
    out.push_back(sym);
  }
}

std::vector<int> reduce(const std::vector<int>& syms) {
  std::vector<int> out;
  out.reserve(syms.size());
  for (int s : syms) reduce_append(out, s);
  return out;
}

}  // namespace

FreeWord::FreeWord(std::vector<int> symbols) {
  for (int s : symbols) {
    if (s == 0) throw std::invalid_argument("free word symbol must be nonzero");
  }
  syms_ = reduce(symbols);
}

FreeWord FreeWord::generator(int i) {
  if (i == 0) throw std::invalid_argument("generator index must be nonzero");
  FreeWord w;
  w.syms_ = {i};
  return w;
}

FreeWord FreeWord::inverse() const {
  FreeWord w;
  w.syms_.reserve(syms_.size());
  for (auto it = syms_.rbegin(); it != syms_.rend(); ++it) w.syms_.push_back(-*it);
  return w;
}

FreeWord FreeWord::concat(const FreeWord& other) const {
  FreeWord w;
  w.syms_ = syms_;
  for (int s : other.syms_) reduce_append(w.syms_, s);
  return w;
}

int FreeWord::max_generator() const {
  int m = 0;
  for (int s : syms_) m = std::max(m, std::abs(s));
  return m;
}

std::string FreeWord::str() const {
  if (syms_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (int s : syms_) {
    if (!first) os << ' ';
    first = false;
    os << 'x' << std::abs(s);
    if (s < 0) os << "^-1";
  }
  return os.str();
}

void validate_braid(const BraidWord& b) {
  if (b.strands < 1) throw std::invalid_argument("braid needs at least one strand");
  for (int l : b.letters) {
    if (l == 0 || std::abs(l) > b.strands - 1) {
      throw std::invalid_argument("braid letter index out of range 1..k-1");
    }
  }
}

BraidWord compose(const BraidWord& b1, const BraidWord& b2) {
  if (b1.strands != b2.strands) throw std::invalid_argument("strand count mismatch");
  BraidWord out = b1;
  out.letters.insert(out.letters.end(), b2.letters.begin(), b2.letters.end());
  return out;
}

BraidWord inverse(const BraidWord& b) {
  BraidWord out;
  out.strands = b.strands;
  out.letters.reserve(b.letters.size());
  for (auto it = b.letters.rbegin(); it != b.letters.rend(); ++it) out.letters.push_back(-*it);
  return out;
}

Permutation induced_permutation(const BraidWord& b) {
  validate_braid(b);
  Permutation p;
  p.image.resize(static_cast<size_t>(b.strands));
  for (int i = 1; i <= b.strands; ++i) {
    // Rightmost letter acts first, matching the word action below.
    int cur = i;
    for (auto it = b.letters.rbegin(); it != b.letters.rend(); ++it) {
      int j = std::abs(*it);
      if (cur == j) {
        cur = j + 1;
      } else if (cur == j + 1) {
        cur = j;
      }
    }
    p.image[static_cast<size_t>(i) - 1] = cur;
  }
  return p;
}

CycleDecomposition cycle_decomposition(const Permutation& p) {
  CycleDecomposition cd;
  int k = p.size();
  std::vector<bool> seen(static_cast<size_t>(k) + 1, false);
  for (int start = 1; start <= k; ++start) {
    if (seen[static_cast<size_t>(start)]) continue;
    std::vector<int> cycle;
    int cur = start;
    do {
      seen[static_cast<size_t>(cur)] = true;
      cycle.push_back(cur);
      cur = p.apply(cur);
    } while (cur != start);
    cd.cycles.push_back(std::move(cycle));
  }
  return cd;
}

namespace {

// Substitution of a single generator letter, applied homomorphically.
// letter = +j:  x_j -> x_{j+1}, x_{j+1} -> x_{j+1}^-1 x_j x_{j+1}
// letter = -j:  x_j -> x_j x_{j+1} x_j^-1, x_{j+1} -> x_j
FreeWord substitute_letter(int letter, const FreeWord& w) {
  int j = std::abs(letter);
  std::vector<int> out;
  out.reserve(w.symbols().size() * 3);
  auto emit = [&out](std::initializer_list<int> syms, bool invert) {
    if (!invert) {
      for (int s : syms) reduce_append(out, s);
    } else {
      for (auto it = std::rbegin(syms); it != std::rend(syms); ++it) reduce_append(out, -*it);
    }
  };
  for (int s : w.symbols()) {
    int g = std::abs(s);
    bool inv = s < 0;
    if (letter > 0) {
      if (g == j) {
        emit({j + 1}, inv);
      } else if (g == j + 1) {
        emit({-(j + 1), j, j + 1}, inv);
      } else {
        reduce_append(out, s);
      }
    } else {
      if (g == j) {
        emit({j, j + 1, -j}, inv);
      } else if (g == j + 1) {
        emit({j}, inv);
      } else {
        reduce_append(out, s);
      }
    }
  }
  return FreeWord(out);
}

}  // namespace

FreeWord act_on_generator(const BraidWord& b, int i) {
  validate_braid(b);
  if (i < 1 || i > b.strands) throw std::invalid_argument("generator index out of range");
  FreeWord w = FreeWord::generator(i);
  for (auto it = b.letters.rbegin(); it != b.letters.rend(); ++it) {
    w = substitute_letter(*it, w);
  }
  return w;
}

FreeWord act_on_word(const BraidWord& b, const FreeWord& w) {
  validate_braid(b);
  if (w.max_generator() > b.strands) {
    throw std::invalid_argument("word alphabet exceeds strand count");
  }
  FreeWord out = w;
  for (auto it = b.letters.rbegin(); it != b.letters.rend(); ++it) {
    out = substitute_letter(*it, out);
  }
  return out;
}

FreeWord conjugator_word(const BraidWord& b, int i) {
  FreeWord u = act_on_generator(b, i);
  int m = induced_permutation(b).apply(i);
  const auto& s = u.symbols();
  int n = static_cast<int>(s.size());
  if (n % 2 != 1) throw std::runtime_error("image of generator is not of conjugate form");
  int mid = n / 2;
  if (s[static_cast<size_t>(mid)] != m) {
    throw std::runtime_error("middle letter of conjugate form does not match permutation");
  }
  for (int t = 0; t < mid; ++t) {
    if (s[static_cast<size_t>(t)] != -s[static_cast<size_t>(n - 1 - t)]) {
      throw std::runtime_error("image of generator is not symmetric around its core");
    }
  }
  return FreeWord(std::vector<int>(s.begin(), s.begin() + mid));
}

FreeWord longitude_word(const BraidWord& b, int component) {
  CycleDecomposition cd = cycle_decomposition(induced_permutation(b));
  if (component < 1 || component > cd.component_count()) {
    throw std::invalid_argument("component index out of range");
  }
  const auto& cycle = cd.cycles[static_cast<size_t>(component) - 1];
  FreeWord w;
  for (int idx : cycle) w = w.concat(conjugator_word(b, idx));
  return w;
}

BraidWord markov_conjugate(const BraidWord& b, const BraidWord& g) {
  if (b.strands != g.strands) throw std::invalid_argument("strand count mismatch");
  return compose(compose(inverse(g), b), g);
}

BraidWord markov_stabilize(const BraidWord& b, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("stabilization sign must be +-1");
  BraidWord out;
  out.strands = b.strands + 1;
  out.letters = b.letters;
  out.letters.push_back(sign * b.strands);
  return out;
}

std::vector<int> split_positions(const BraidWord& b) {
  validate_braid(b);
  std::vector<int> out;
  for (int k1 = 1; k1 < b.strands; ++k1) {
    bool ok = true;
    for (int l : b.letters) {
      int j = std::abs(l);
      if (j == k1) {  // generator j braids strands j and j+1, crossing the wall
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(k1);
  }
  return out;
}

std::optional<SplitParts> split_decomposition(const BraidWord& b) {
  auto positions = split_positions(b);
  if (positions.empty()) return std::nullopt;
  SplitParts parts;
  parts.k1 = positions.front();
  parts.left.strands = parts.k1;
  parts.right.strands = b.strands - parts.k1;
  for (int l : b.letters) {
    if (std::abs(l) < parts.k1) {
      parts.left.letters.push_back(l);
    } else {
      parts.right.letters.push_back(l > 0 ? l - parts.k1 : l + parts.k1);
    }
  }
  return parts;
}

BraidWord parse_braid(const std::string& text) {
  std::istringstream is(text);
  std::string head;
  if (!(is >> head)) throw std::invalid_argument("empty braid text");
  if (head.size() < 2 || (head[0] != 'B' && head[0] != 'b')) {
    throw std::invalid_argument("braid text must start with header B<k>");
  }
  if (head.back() == ':') head.pop_back();
  int k = 0;
  try {
    size_t pos = 0;
    k = std::stoi(head.substr(1), &pos);
    if (pos != head.size() - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed braid header: " + head);
  }
  BraidWord b;
  b.strands = k;
  std::string tok;
  while (is >> tok) {
    if (tok == ":") continue;
    if (!tok.empty() && tok.back() == ',') tok.pop_back();
    int v = 0;
    try {
      size_t pos = 0;
      v = std::stoi(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed braid letter: " + tok);
    }
    b.letters.push_back(v);
  }
  validate_braid(b);
  return b;
}

std::string braid_to_text(const BraidWord& b) {
  std::ostringstream os;
  os << 'B' << b.strands << ':';
  for (int l : b.letters) os << ' ' << l;
  return os.str();
}

}  // namespace casson
