#pragma once

// Test-side helpers and oracles. Nothing here calls the library's evaluation
// or SVD code: products, operators and Jacobians are rebuilt from first
// principles so they can serve as independent references.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fdqrank/grouprel.hpp"
#include "fdqrank/ncalg.hpp"

namespace fdqtest {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline fdq::GaussianRational random_coeff(std::mt19937_64& g) {
  std::uniform_int_distribution<long> num(-5, 5), den(1, 4);
  for (;;) {
    auto c = fdq::GaussianRational::from_fractions(num(g), den(g), num(g), den(g));
    if (!c.is_zero()) return c;
  }
}

inline fdq::Monomial random_monomial(std::mt19937_64& g, std::size_t nvars, std::size_t max_deg) {
  std::uniform_int_distribution<std::size_t> deg(0, max_deg);
  std::uniform_int_distribution<std::uint32_t> var(0, static_cast<std::uint32_t>(nvars - 1));
  std::vector<std::uint32_t> v(deg(g));
  for (auto& x : v) x = var(g);
  return fdq::Monomial(std::move(v));
}

inline fdq::NCPoly random_poly(std::mt19937_64& g, std::size_t nvars, std::size_t max_deg, int terms) {
  fdq::NCPoly p(nvars);
  for (int t = 0; t < terms; ++t) p.add_term(random_monomial(g, nvars, max_deg), random_coeff(g));
  return p;
}

inline fdq::TensorPoly random_tensor(std::mt19937_64& g, std::size_t nvars, std::size_t max_deg, int terms) {
  fdq::TensorPoly t(nvars);
  for (int i = 0; i < terms; ++i)
    t.add_term(random_monomial(g, nvars, max_deg), random_monomial(g, nvars, max_deg), random_coeff(g));
  return t;
}

inline Matrix random_matrix(std::mt19937_64& g, std::size_t d) {
  std::normal_distribution<double> n;
  Matrix a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(n(g), n(g));
  return a;
}

inline Matrix random_hermitian(std::mt19937_64& g, std::size_t d) {
  Matrix a = random_matrix(g, d);
  return (a + a.adjoint()) / 2.0;
}

/// Word evaluation by plain left-to-right multiplication.
inline Matrix word_value(const fdq::Monomial& w, const std::vector<Matrix>& x) {
  const auto d = x.front().rows();
  Matrix acc = Matrix::Identity(d, d);
  for (std::uint32_t v : w.vars()) acc = acc * x[v];
  return acc;
}

inline Matrix poly_value(const fdq::NCPoly& p, const std::vector<Matrix>& x) {
  const auto d = x.front().rows();
  Matrix acc = Matrix::Zero(d, d);
  for (const auto& [w, c] : p.terms()) acc += c.to_complex() * word_value(w, x);
  return acc;
}

/// T -> sum c a(X) T b(X), applied directly.
inline Matrix tensor_apply(const fdq::TensorPoly& tp, const std::vector<Matrix>& x, const Matrix& t) {
  Matrix acc = Matrix::Zero(t.rows(), t.cols());
  for (const auto& [key, c] : tp.terms()) acc += c.to_complex() * word_value(key.first, x) * t * word_value(key.second, x);
  return acc;
}

/// Dense Jacobian built column by column from the action on matrix units,
/// with column-major flattening.
inline Matrix brute_jacobian(const fdq::Jacobian& jac, const std::vector<Matrix>& x) {
  const auto d = x.front().rows();
  const auto d2 = d * d;
  Matrix j = Matrix::Zero(static_cast<Eigen::Index>(jac.k()) * d2, static_cast<Eigen::Index>(jac.n()) * d2);
  for (std::size_t l = 0; l < jac.n(); ++l)
    for (Eigen::Index c = 0; c < d; ++c)
      for (Eigen::Index r = 0; r < d; ++r) {
        Matrix e = Matrix::Zero(d, d);
        e(r, c) = 1.0;
        const Eigen::Index col = static_cast<Eigen::Index>(l) * d2 + c * d + r;
        for (std::size_t i = 0; i < jac.k(); ++i) {
          Matrix y = tensor_apply(jac.at(i, l), x, e);
          for (Eigen::Index cc = 0; cc < d; ++cc)
            for (Eigen::Index rr = 0; rr < d; ++rr) j(static_cast<Eigen::Index>(i) * d2 + cc * d + rr, col) = y(rr, cc);
        }
      }
  return j;
}

/// Singular values by Eigen's one-sided Jacobi SVD, descending.
inline std::vector<double> oracle_svals(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

/// Number of singular values with sigma^2 >= rel * sigma_max^2.
inline std::size_t oracle_rank(const std::vector<double>& s, double rel) {
  if (s.empty() || s.front() == 0.0) return 0;
  const double cut = rel * s.front() * s.front();
  std::size_t c = 0;
  for (double v : s)
    if (v * v >= cut) ++c;
  return c;
}

/// X_j = U_j + U_j^*, X_{m+j} = i (U_j - U_j^*), computed from explicit
/// permutation matrices.
inline std::vector<Matrix> perm_variables(const std::vector<std::vector<std::uint32_t>>& perms) {
  const std::size_t m = perms.size();
  const auto d = static_cast<Eigen::Index>(perms.front().size());
  std::vector<Matrix> x(2 * m);
  for (std::size_t j = 0; j < m; ++j) {
    Matrix u = Matrix::Zero(d, d);
    for (Eigen::Index v = 0; v < d; ++v) u(perms[j][static_cast<std::size_t>(v)], v) = 1.0;
    x[j] = u + u.adjoint();
    x[m + j] = Complex(0, 1) * (u - u.adjoint());
  }
  return x;
}

}  // namespace fdqtest
