#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bnf/classify.hpp"
#include "bnf/error.hpp"
#include "bnf/formula.hpp"
#include "bnf/structure.hpp"

namespace bnf {

using Rng = std::mt19937_64;

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// Each possible tuple of each relation is present with probability `density`.
inline Structure random_structure(Rng& rng, const Signature& sig, std::size_t size, double density = 0.4,
                                  std::string name = "") {
  std::vector<std::vector<ElementTuple>> tables(sig.size());
  for (std::size_t r = 0; r < sig.size(); ++r) {
    const std::size_t k = sig[r].arity;
    if (size == 0) continue;
    ElementTuple t(k, 0);
    while (true) {
      if (coin(rng, density)) tables[r].push_back(t);
      std::size_t q = k;
      bool more = false;
      while (q-- > 0) {
        if (++t[q] < size) {
          more = true;
          break;
        }
        t[q] = 0;
      }
      if (!more) break;
    }
  }
  return Structure(sig, size, std::move(tables), std::move(name));
}

inline Signature binary_signature(const std::string& name = "R") { return Signature({{name, 2}}); }

inline ElementTuple random_tuple(Rng& rng, const Structure& m, std::size_t len) {
  ElementTuple t(len);
  for (auto& e : t) e = static_cast<Element>(uniform_index(rng, m.size()));
  return t;
}

struct FormulaGrammar {
  Signature signature;
  std::vector<std::string> free_vars;
  int max_depth = 5;
  std::size_t max_width = 3;
  std::size_t max_block = 2;
  bool equality = true;
};

namespace detail {

class FormulaDrawer {
 public:
  FormulaDrawer(Rng& rng, const FormulaGrammar& g) : rng_(rng), g_(g) {}

  Formula draw(int depth, std::vector<std::string>& scope) {
    if (depth <= 0 || coin(rng_, 0.2)) return leaf(scope);
    switch (uniform_index(rng_, 4)) {
      case 0:
      case 1: {
        std::vector<Formula> cs;
        const std::size_t w = 1 + uniform_index(rng_, g_.max_width);
        for (std::size_t i = 0; i < w; ++i) cs.push_back(draw(depth - 1, scope));
        return uniform_index(rng_, 2) == 0 ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
      }
      default: {
        const std::size_t b = 1 + uniform_index(rng_, g_.max_block);
        std::vector<std::string> vars;
        for (std::size_t i = 0; i < b; ++i) vars.push_back("y" + std::to_string(counter_++));
        const std::size_t old = scope.size();
        scope.insert(scope.end(), vars.begin(), vars.end());
        Formula body = draw(depth - 1, scope);
        scope.resize(old);
        return uniform_index(rng_, 2) == 0 ? Formula::exists(std::move(vars), std::move(body))
                                           : Formula::forall(std::move(vars), std::move(body));
      }
    }
  }

 private:
  Formula leaf(const std::vector<std::string>& scope) {
    if (scope.empty()) return coin(rng_, 0.5) ? Formula::truth() : Formula::falsity();
    const std::size_t choices = g_.signature.size() + (g_.equality ? 1 : 0);
    if (choices == 0) return coin(rng_, 0.5) ? Formula::truth() : Formula::falsity();
    const std::size_t pick = uniform_index(rng_, choices);
    const bool positive = coin(rng_, 0.5);
    if (pick == g_.signature.size())
      return Formula::equal(scope[uniform_index(rng_, scope.size())], scope[uniform_index(rng_, scope.size())],
                            positive);
    std::vector<std::string> args;
    for (std::size_t i = 0; i < g_.signature[pick].arity; ++i) args.push_back(scope[uniform_index(rng_, scope.size())]);
    return Formula::atom(g_.signature[pick].name, std::move(args), positive);
  }

  Rng& rng_;
  const FormulaGrammar& g_;
  std::size_t counter_ = 0;
};

}  // namespace detail

/// One unconstrained draw with depth up to `depth`.
inline Formula draw_formula(Rng& rng, const FormulaGrammar& g, int depth) {
  std::vector<std::string> scope = g.free_vars;
  return detail::FormulaDrawer(rng, g).draw(depth, scope);
}

/// Reproducible formula whose rank in `target` is at most `rank`.
inline Formula random_formula(std::uint64_t seed, const FormulaGrammar& g, FormulaClass target, int rank,
                              std::size_t max_draws = 10000) {
  Rng rng(seed);
  for (std::size_t i = 0; i < max_draws; ++i) {
    const int depth = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(g.max_depth) + 1));
    Formula f = draw_formula(rng, g, depth);
    if (rank_of(classify(f), target) <= rank) return f;
  }
  throw InvalidArgument("no formula of class " + class_name(target) + " rank " + std::to_string(rank) +
                        " found within the draw budget");
}

}  // namespace bnf
