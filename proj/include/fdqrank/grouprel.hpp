#pragma once

// Finite group presentations and the polynomial relation system they induce.
//
// A group with generators g_1..g_m is realized by n = 2m self-adjoint
// variables X_j = g_j + g_j^{-1}, X_{m+j} = i (g_j - g_j^{-1}). Inverting this
// gives the substitution g_j -> (t_j - i t_{m+j}) / 2 and
// g_j^{-1} -> (t_j + i t_{m+j}) / 2, under which the relations
// g g^{-1} = g^{-1} g = 1 and every relator R = 1 become polynomial equations.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdqrank/ncalg.hpp"

namespace fdq {

struct Letter {
  std::uint32_t generator;  // 0-based
  int exponent;             // +1 or -1

  friend bool operator==(const Letter&, const Letter&) = default;
};

/// A word in the free group, kept exactly as written (no automatic reduction).
class GroupWord {
 public:
  GroupWord() = default;
  explicit GroupWord(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }

  GroupWord inverse() const;
  GroupWord free_reduced() const;
  std::string to_string(const std::vector<std::string>& generator_names) const;

  friend bool operator==(const GroupWord&, const GroupWord&) = default;

 private:
  std::vector<Letter> letters_;
};

struct Presentation {
  std::string name;
  std::vector<std::string> generators;
  std::vector<GroupWord> relators;
  std::optional<std::uint64_t> order;  // nullopt: infinite

  std::size_t m() const { return generators.size(); }
  /// 1/|G| for finite groups, 0 otherwise. Never inferred from the relators.
  double beta0() const { return order ? 1.0 / static_cast<double>(*order) : 0.0; }
};

/// Parses the line-oriented presentation format:
///
///   group <name>              (optional)
///   gens <id> <id> ...
///   rel <word>                (zero or more)
///   order infinite | order finite <k>
///
/// A word is whitespace-separated tokens `gen` or `gen^<nonzero int>`. `#`
/// starts a comment and `;` separates statements on one line.
Presentation parse_presentation(std::string_view text, std::string_view source = "<input>");
Presentation load_presentation(const std::filesystem::path& path);

/// Images of g_j and g_j^{-1} as degree-one polynomials in n = 2m variables.
struct GeneratorSubstitution {
  std::size_t n = 0;
  std::vector<NCPoly> forward;  // g_j
  std::vector<NCPoly> inverse;  // g_j^{-1}
};

GeneratorSubstitution build_generators(const Presentation& p);

/// Product of the letter images of w, in order.
NCPoly substitute_word(const GroupWord& w, const GeneratorSubstitution& subst,
                       const ExpansionLimits& limits = {});

enum class RelationKind { unit_forward, unit_backward, relator };

struct RelationSystem {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  /// 2m unit relations (F'_j, F''_j interleaved per generator), then one
  /// polynomial per relator.
  std::vector<NCPoly> polys;
  std::vector<RelationKind> kinds;
  std::vector<std::string> labels;
  GeneratorSubstitution substitution;
};

RelationSystem build_relation_system(const Presentation& p, const ExpansionLimits& limits = {});

/// k x n matrix of free difference quotients, row-major.
class Jacobian {
 public:
  Jacobian(std::size_t k, std::size_t n, std::vector<TensorPoly> entries);

  std::size_t k() const { return k_; }
  std::size_t n() const { return n_; }
  const TensorPoly& at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

 private:
  std::size_t k_;
  std::size_t n_;
  std::vector<TensorPoly> entries_;
};

Jacobian build_jacobian(const RelationSystem& rs);
/// Jacobian of an arbitrary polynomial tuple in nvars variables.
Jacobian build_jacobian(const std::vector<NCPoly>& polys, std::size_t nvars);

/// Canonical text used by the `relations` and `jacobian` subcommands.
std::string relations_text(const RelationSystem& rs);
std::string jacobian_text(const RelationSystem& rs, const Jacobian& jac);

}  // namespace fdq
