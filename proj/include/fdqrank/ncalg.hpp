#pragma once

// Exact noncommutative polynomial algebra over Q(i).
//
// Variables are indexed from 0 in the C++ interface and rendered 1-based
// ("t1", "t2", ...) in canonical text.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace fdq {

/// a + b i with a, b exact rationals in lowest terms.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long re) : re_(re), im_(0) {}  // NOLINT(implicit)
  GaussianRational(mpq_class re, mpq_class im);

  /// (re_num/re_den) + (im_num/im_den) i.
  static GaussianRational from_fractions(long re_num, long re_den, long im_num = 0,
                                         long im_den = 1);
  static GaussianRational imaginary_unit() { return {mpq_class(0), mpq_class(1)}; }

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }
  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  /// Renders as "a/b+c/d*i" (denominator omitted when it is 1).
  std::string to_string() const;

  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  GaussianRational operator-() const { return {-re_, -im_}; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

/// A word t_{v1} t_{v2} ... t_{vd}; the empty word is the unit.
/// Ordered by degree, then lexicographically on the index sequence.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<std::uint32_t> vars) : vars_(std::move(vars)) {}
  Monomial(std::initializer_list<std::uint32_t> vars) : vars_(vars) {}

  std::size_t degree() const { return vars_.size(); }
  bool is_unit() const { return vars_.empty(); }
  std::span<const std::uint32_t> vars() const { return vars_; }
  std::uint32_t max_var() const;

  Monomial reversed() const;
  /// Sub-word [begin, end).
  Monomial slice(std::size_t begin, std::size_t end) const;

  std::string to_string() const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) = default;
  friend bool operator<(const Monomial& a, const Monomial& b) {
    if (a.vars_.size() != b.vars_.size()) return a.vars_.size() < b.vars_.size();
    return a.vars_ < b.vars_;
  }

 private:
  std::vector<std::uint32_t> vars_;
};

/// Caps on symbolic expansion. Relator substitution grows as 2^length, so
/// every product is checked against these.
struct ExpansionLimits {
  std::size_t max_degree = 64;
  std::size_t max_terms = 1'000'000;
};

class TensorPoly;

/// Noncommutative polynomial in nvars variables with Gaussian-rational
/// coefficients. Canonical: no stored coefficient is zero, so structural
/// equality is algebraic equality.
class NCPoly {
 public:
  using Terms = std::map<Monomial, GaussianRational>;

  explicit NCPoly(std::size_t nvars);

  static NCPoly constant(std::size_t nvars, const GaussianRational& c);
  static NCPoly variable(std::size_t nvars, std::uint32_t j);
  static NCPoly monomial(std::size_t nvars, Monomial w, const GaussianRational& c = 1);

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t degree() const;
  GaussianRational coefficient(const Monomial& w) const;

  /// Adds c*w, dropping the term if the coefficient cancels.
  void add_term(const Monomial& w, const GaussianRational& c);

  NCPoly involution() const;
  std::string to_string() const;

  NCPoly& operator+=(const NCPoly& o);
  NCPoly& operator-=(const NCPoly& o);
  friend NCPoly operator+(NCPoly a, const NCPoly& b) { return a += b; }
  friend NCPoly operator-(NCPoly a, const NCPoly& b) { return a -= b; }
  friend NCPoly operator*(const NCPoly& a, const NCPoly& b);
  friend NCPoly operator*(const GaussianRational& c, const NCPoly& p);
  friend bool operator==(const NCPoly& a, const NCPoly& b) = default;

 private:
  std::size_t nvars_;
  Terms terms_;
};

NCPoly add(const NCPoly& p, const NCPoly& q);
NCPoly mul(const NCPoly& p, const NCPoly& q, const ExpansionLimits& limits = {});
NCPoly scale(const NCPoly& p, const GaussianRational& c);
inline NCPoly involution(const NCPoly& p) { return p.involution(); }

/// Ordering of simple tensors: total degree, then left leg, then right leg.
struct TensorKeyLess {
  bool operator()(const std::pair<Monomial, Monomial>& a,
                  const std::pair<Monomial, Monomial>& b) const;
};

/// Element of C<t> (x) C<t>, canonical like NCPoly.
class TensorPoly {
 public:
  using Key = std::pair<Monomial, Monomial>;
  using Terms = std::map<Key, GaussianRational, TensorKeyLess>;

  explicit TensorPoly(std::size_t nvars);

  /// 1 (x) 1.
  static TensorPoly unit(std::size_t nvars);
  /// a (x) b, expanded bilinearly.
  static TensorPoly outer(const NCPoly& a, const NCPoly& b, const ExpansionLimits& limits = {});

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add_term(const Monomial& left, const Monomial& right, const GaussianRational& c);

  /// a (x) b -> conj(c) b* (x) a*: the image of a derivative under the
  /// involution when the variables are self-adjoint.
  TensorPoly flip_conjugate() const;
  std::string to_string() const;

  TensorPoly& operator+=(const TensorPoly& o);
  friend TensorPoly operator+(TensorPoly a, const TensorPoly& b) { return a += b; }
  friend TensorPoly operator*(const GaussianRational& c, const TensorPoly& t);
  /// Factorwise product (a (x) b)(c (x) d) = ac (x) bd.
  friend TensorPoly operator*(const TensorPoly& x, const TensorPoly& y);
  friend bool operator==(const TensorPoly& a, const TensorPoly& b) = default;

 private:
  std::size_t nvars_;
  Terms terms_;
};

TensorPoly multiply(const TensorPoly& x, const TensorPoly& y, const ExpansionLimits& limits = {});

/// Free difference quotient: d_j(v1...vd) = sum over positions a with v_a = j
/// of (v1...v_{a-1}) (x) (v_{a+1}...vd).
TensorPoly differentiate(const NCPoly& p, std::uint32_t j);

/// (a (x) b) # x = a x b, extended linearly.
NCPoly contract(const TensorPoly& tp, const NCPoly& x, const ExpansionLimits& limits = {});

}  // namespace fdq
