#pragma once

// Finite-dimensional unitary images of the group generators, and evaluation
// of polynomials and tensor polynomials on them.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fdqrank/grouprel.hpp"
#include "fdqrank/ncalg.hpp"

namespace fdq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

enum class RepKind { permutation, dense };

/// Eigenvalues of every generator in one common orthonormal eigenbasis:
/// eigenvalue(p, j) is the eigenvalue of generator j on basis vector p.
/// Only commuting families carry one.
struct JointSpectrum {
  std::size_t dim = 0;
  std::size_t m = 0;
  std::vector<Complex> values;  // dim x m, row-major

  Complex eigenvalue(std::size_t p, std::size_t j) const { return values[p * m + j]; }
};

/// Spectrum of a single permutation matrix, read off its cycles.
JointSpectrum permutation_spectrum(std::span<const std::uint32_t> images);

struct UnitarityTolerance {
  double max_entry_error = 1e-12;
};

class Representation {
 public:
  /// images[j][v] = sigma_j(v); the matrix has (u, v) entry 1 iff u = sigma_j(v).
  static Representation from_permutations(std::vector<std::vector<std::uint32_t>> images,
                                          std::string provenance, bool exact);
  static Representation from_dense(std::vector<Matrix> mats, std::string provenance, bool exact,
                                   UnitarityTolerance tol = {});

  std::size_t dim() const { return dim_; }
  std::size_t m() const { return m_; }
  std::size_t nvars() const { return 2 * m_; }
  RepKind kind() const { return kind_; }
  const std::string& provenance() const { return provenance_; }
  /// Exact finite-quotient family (relator defects must vanish) as opposed
  /// to a sofic proxy.
  bool exact() const { return exact_; }

  const std::vector<std::vector<std::uint32_t>>& permutations() const { return perms_; }
  Matrix generator(std::size_t j) const;

  const std::optional<JointSpectrum>& joint_spectrum() const { return joint_; }
  void set_joint_spectrum(JointSpectrum js);

  /// X_j = U_j + U_j^*, X_{m+j} = i (U_j - U_j^*), j < m.
  std::vector<Matrix> variable_values() const;

  friend bool operator==(const Representation& a, const Representation& b);

 private:
  Representation() = default;

  std::size_t dim_ = 0;
  std::size_t m_ = 0;
  RepKind kind_ = RepKind::permutation;
  bool exact_ = true;
  std::string provenance_;
  std::vector<std::vector<std::uint32_t>> perms_;
  std::vector<Matrix> dense_;
  std::optional<JointSpectrum> joint_;
};

// Families.
Representation cyclic_shift(std::size_t n);
Representation torus(std::size_t n);
Representation regular_cyclic(std::size_t k);
/// m independent uniform permutations of size n from CounterRng(seed, j).
Representation random_permutations(std::size_t n, std::size_t m, std::uint64_t seed);

/// Representation file: header `rep <D> <m> perm|dense`, then for perm m lines
/// of D 0-based images, for dense m blocks of D lines of D `re,im` tokens.
Representation parse_representation(std::string_view text, std::string_view source = "<input>",
                                    UnitarityTolerance tol = {});
Representation load_representation(const std::filesystem::path& path, UnitarityTolerance tol = {});
std::string representation_text(const Representation& rep);

/// Parsed family descriptor: `cyclic:N`, `torus:N`, `regular-cyclic:k`,
/// `randperm:N:seed`, `file:PATH`. The size may be omitted (`cyclic`,
/// `randperm`) when it is supplied by a size sweep.
struct FamilySpec {
  std::string family;
  std::optional<std::size_t> size;
  std::optional<std::uint64_t> seed;
  std::string path;

  std::string descriptor() const;
};

FamilySpec parse_family(std::string_view descriptor);
/// Builds the representation; m is the presentation's generator count (used
/// by randperm).
Representation make_representation(const FamilySpec& spec, std::size_t m);

/// ||R(U) - I|| in operator norm, one entry per relator.
std::vector<double> relator_defects(const Representation& rep, const Presentation& p);
double operator_norm(const Matrix& a);

// Evaluation.

/// Products of monomials evaluated at a fixed tuple, memoized by word.
class MonomialEvaluator {
 public:
  explicit MonomialEvaluator(std::span<const Matrix> values);
  const Matrix& operator()(const Monomial& w);

 private:
  std::vector<Matrix> values_;
  std::size_t dim_;
  std::map<Monomial, Matrix> cache_;
};

Matrix evaluate_poly(const NCPoly& p, std::span<const Matrix> values);
Matrix evaluate_poly(const NCPoly& p, const Representation& rep);

/// How a D x D matrix is flattened into a D^2 vector when an operator on
/// matrices is materialized.
enum class Flattening {
  column_major,  // vec(A T B) = (B^T kron A) vec(T)
  row_major,     // vec(A T B) = (A kron B^T) vec(T)
};

/// T -> sum c a(X) T b(X) over the terms a (x) b of a tensor polynomial.
class TensorOperator {
 public:
  struct Term {
    Complex coeff;
    Matrix left;
    Matrix right;
  };

  TensorOperator(std::size_t dim, std::vector<Term> terms) : dim_(dim), terms_(std::move(terms)) {}

  std::size_t dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }

  Matrix apply(const Matrix& t) const;
  /// D^2 x D^2 matrix acting on flattened T.
  Matrix materialize(Flattening f = Flattening::column_major) const;

 private:
  std::size_t dim_;
  std::vector<Term> terms_;
};

TensorOperator evaluate_tensor(const TensorPoly& tp, std::span<const Matrix> values);
TensorOperator evaluate_tensor(const TensorPoly& tp, const Representation& rep);
TensorOperator evaluate_tensor(const TensorPoly& tp, MonomialEvaluator& eval, std::size_t dim);

Matrix flatten(const Matrix& t, Flattening f);
Matrix unflatten(const Matrix& v, std::size_t dim, Flattening f);

}  // namespace fdq
