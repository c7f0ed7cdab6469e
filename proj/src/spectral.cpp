#include "fdqrank/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "fdqrank/errors.hpp"
#include "fdqrank/prng.hpp"

namespace fdq {

namespace {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

std::string gib(double entries) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f GiB", entries * 16.0 / (1024.0 * 1024.0 * 1024.0));
  return buf;
}

void check_dimension(std::size_t dim, std::size_t n, const SpectralConfig& cfg) {
  if (dim > cfg.max_dim)
    throw ResourceError("representation dimension " + std::to_string(dim) + " exceeds cap " +
                        std::to_string(cfg.max_dim));
  if (n * dim * dim > cfg.max_side)
    throw ResourceError("operator side n*D^2 = " + std::to_string(n * dim * dim) + " exceeds cap " +
                        std::to_string(cfg.max_side));
}

void check_dense(std::size_t rows, std::size_t cols, const SpectralConfig& cfg) {
  const double entries = static_cast<double>(rows) * static_cast<double>(cols);
  if (entries > static_cast<double>(cfg.max_dense_entries))
    throw ResourceError("dense SVD of a " + std::to_string(rows) + " x " + std::to_string(cols) +
                        " matrix needs " + gib(entries) + " (cap " +
                        gib(static_cast<double>(cfg.max_dense_entries)) + ")");
}

SparseMatrix to_sparse(const Matrix& a) {
  SparseMatrix s = a.sparseView();
  s.makeCompressed();
  return s;
}

/// Appends the materialized operator of `op` at block offset (r0, c0).
void append_block(const TensorOperator& op, Flattening f, Eigen::Index r0, Eigen::Index c0,
                  std::vector<Triplet>& out) {
  for (const auto& term : op.terms()) {
    SparseMatrix left = to_sparse(term.left);
    SparseMatrix right_t = to_sparse(term.right.transpose());
    SparseMatrix kron = f == Flattening::column_major ? SparseMatrix(Eigen::kroneckerProduct(right_t, left))
                                                      : SparseMatrix(Eigen::kroneckerProduct(left, right_t));
    for (Eigen::Index col = 0; col < kron.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(kron, col); it; ++it)
        out.emplace_back(r0 + it.row(), c0 + it.col(), term.coeff * it.value());
  }
}

SparseMatrix assemble_rows_cols(const Jacobian& jac, const std::vector<std::size_t>& rows,
                                const std::vector<std::size_t>& cols, MonomialEvaluator& eval, std::size_t dim,
                                Flattening f) {
  const auto d2 = static_cast<Eigen::Index>(dim * dim);
  std::vector<Triplet> trips;
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) {
      const TensorPoly& tp = jac.at(rows[a], cols[b]);
      if (tp.is_zero()) continue;
      append_block(evaluate_tensor(tp, eval, dim), f, static_cast<Eigen::Index>(a) * d2,
                   static_cast<Eigen::Index>(b) * d2, trips);
    }
  SparseMatrix j(static_cast<Eigen::Index>(rows.size()) * d2, static_cast<Eigen::Index>(cols.size()) * d2);
  j.setFromTriplets(trips.begin(), trips.end());
  return j;
}

struct Component {
  std::vector<std::size_t> generators;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};

/// Splits dF into blocks that share no generator. Columns j and m+j belong to
/// generator j; rows with no nonzero entry belong to no component.
std::vector<Component> split_components(const Jacobian& jac, std::size_t m) {
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::vector<std::size_t>> row_gens(jac.k());
  for (std::size_t i = 0; i < jac.k(); ++i) {
    for (std::size_t l = 0; l < jac.n(); ++l)
      if (!jac.at(i, l).is_zero()) row_gens[i].push_back(l % m);
    for (std::size_t g : row_gens[i]) parent[find(g)] = find(row_gens[i].front());
  }
  std::map<std::size_t, Component> by_root;
  for (std::size_t i = 0; i < jac.k(); ++i)
    if (!row_gens[i].empty()) by_root[find(row_gens[i].front())].rows.push_back(i);
  for (std::size_t g = 0; g < m; ++g) {
    auto it = by_root.find(find(g));
    if (it != by_root.end()) it->second.generators.push_back(g);
  }
  std::vector<Component> out;
  for (auto& [root, c] : by_root) {
    for (std::size_t g : c.generators) c.cols.push_back(g);
    for (std::size_t g : c.generators) c.cols.push_back(m + g);
    std::sort(c.cols.begin(), c.cols.end());
    out.push_back(std::move(c));
  }
  return out;
}

/// Block path: in a common eigenbasis of the generators, T -> a(X) T b(X)
/// scales entry (p, q) of T by a(x_p) b(x_q), so dF(X) is unitarily equivalent
/// to the direct sum over (p, q) of small |rows| x |cols| scalar matrices.
std::vector<double> block_singular_values(const Jacobian& jac, const Component& comp, const JointSpectrum& spec,
                                          const std::vector<std::size_t>& spec_column, std::size_t m) {
  const std::size_t d = spec.dim;
  const auto dd = static_cast<Eigen::Index>(d);
  // Scalar value of each variable on basis vector p. With eigenvalue z of U:
  // U + U^* -> 2 Re z and i (U - U^*) -> -2 Im z.
  auto var_value = [&](std::uint32_t var, std::size_t p) {
    const std::size_t g = var % m;
    Complex z = spec.eigenvalue(p, spec_column[g]);
    return var < m ? 2.0 * z.real() : -2.0 * z.imag();
  };
  std::map<Monomial, Eigen::VectorXd> mono_cache;
  auto mono_values = [&](const Monomial& w) -> const Eigen::VectorXd& {
    auto it = mono_cache.find(w);
    if (it != mono_cache.end()) return it->second;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(dd);
    for (std::uint32_t var : w.vars())
      for (std::size_t p = 0; p < d; ++p) v(static_cast<Eigen::Index>(p)) *= var_value(var, p);
    return mono_cache.emplace(w, std::move(v)).first->second;
  };

  const std::size_t kr = comp.rows.size();
  const std::size_t nc = comp.cols.size();
  // entry_mats[a * nc + b](p, q) = sum_t c_t a_t(x_p) b_t(x_q).
  std::vector<Matrix> entry_mats(kr * nc);
  std::vector<bool> nonzero(kr * nc, false);
  for (std::size_t a = 0; a < kr; ++a)
    for (std::size_t b = 0; b < nc; ++b) {
      const TensorPoly& tp = jac.at(comp.rows[a], comp.cols[b]);
      if (tp.is_zero()) continue;
      const auto nt = static_cast<Eigen::Index>(tp.terms().size());
      Matrix left(dd, nt), right(dd, nt);
      Eigen::Index t = 0;
      for (const auto& [key, c] : tp.terms()) {
        left.col(t) = mono_values(key.first).cast<Complex>() * c.to_complex();
        right.col(t) = mono_values(key.second).cast<Complex>();
        ++t;
      }
      entry_mats[a * nc + b] = left * right.transpose();
      nonzero[a * nc + b] = true;
    }

  std::vector<double> out;
  out.reserve(std::min(kr, nc) * d * d);
  Matrix block(static_cast<Eigen::Index>(kr), static_cast<Eigen::Index>(nc));
  for (Eigen::Index p = 0; p < dd; ++p)
    for (Eigen::Index q = 0; q < dd; ++q) {
      for (std::size_t a = 0; a < kr; ++a)
        for (std::size_t b = 0; b < nc; ++b)
          block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              nonzero[a * nc + b] ? entry_mats[a * nc + b](p, q) : Complex{};
      Eigen::JacobiSVD<Matrix> svd(block);
      const auto& s = svd.singularValues();
      for (Eigen::Index r = 0; r < s.size(); ++r) out.push_back(s(r));
    }
  return out;
}

bool has_eigenbasis(const Representation& rep, const Component& comp) {
  return rep.joint_spectrum().has_value() ||
         (comp.generators.size() == 1 && rep.kind() == RepKind::permutation);
}

}  // namespace

ThresholdPolicy ThresholdPolicy::parse(std::string_view text) {
  ThresholdPolicy p;
  if (text == "plateau") return p;
  if (text.rfind("fixed:", 0) == 0) {
    std::string v(text.substr(6));
    char* end = nullptr;
    double rel = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !(rel > 0.0))
      throw UsageError("threshold 'fixed:<relative>' needs a positive number, got '" + v + "'");
    p.kind = Kind::fixed;
    p.relative = rel;
    return p;
  }
  throw UsageError("unknown threshold policy '" + std::string(text) + "' (expected plateau or fixed:<relative>)");
}

std::string ThresholdPolicy::to_string() const {
  if (kind == Kind::plateau) return "plateau";
  std::ostringstream s;
  s.precision(17);
  s << "fixed:" << relative;
  return s.str();
}

EvaluatedJacobian assemble(const Jacobian& jac, const Representation& rep, const SpectralConfig& cfg) {
  if (jac.n() != rep.nvars())
    throw UsageError("Jacobian has " + std::to_string(jac.n()) + " variables, representation supplies " +
                     std::to_string(rep.nvars()));
  const std::size_t d = rep.dim();
  check_dimension(d, jac.n(), cfg);
  check_dense(jac.k() * d * d, jac.n() * d * d, cfg);
  auto x = rep.variable_values();
  MonomialEvaluator eval(x);
  std::vector<std::size_t> rows(jac.k()), cols(jac.n());
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  EvaluatedJacobian ej;
  ej.k = jac.k();
  ej.n = jac.n();
  ej.dim = d;
  ej.matrix = assemble_rows_cols(jac, rows, cols, eval, d, cfg.flattening);
  return ej;
}

std::vector<double> singular_values(const Matrix& a) {
  const auto rows = static_cast<lapack_int>(a.rows());
  const auto cols = static_cast<lapack_int>(a.cols());
  std::vector<double> s(static_cast<std::size_t>(std::min(rows, cols)));
  if (s.empty()) return s;
  Matrix work = a;  // zgesdd overwrites its input
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, work.data(), rows, s.data(), nullptr, 1,
                                   nullptr, 1);
  if (info != 0) throw NumericalError("zgesdd failed (info = " + std::to_string(info) + ")");
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

std::vector<double> singular_values(const EvaluatedJacobian& ej) {
  return singular_values(Matrix(ej.matrix.toDense()));
}

SingularValues jacobian_singular_values(const Jacobian& jac, const Representation& rep, const SpectralConfig& cfg) {
  if (jac.n() != rep.nvars())
    throw UsageError("Jacobian has " + std::to_string(jac.n()) + " variables, representation supplies " +
                     std::to_string(rep.nvars()));
  const std::size_t d = rep.dim();
  const std::size_t total = std::min(jac.k(), jac.n()) * d * d;
  check_dimension(d, jac.n(), cfg);

  SingularValues result;
  if (cfg.method == SvdMethod::dense) {
    result.values = singular_values(assemble(jac, rep, cfg));
    result.method = "dense";
    result.components = 1;
    return result;
  }

  const std::size_t m = rep.m();
  auto components = split_components(jac, m);
  auto x = rep.variable_values();
  MonomialEvaluator eval(x);
  bool used_dense = false, used_blocks = false;
  for (const Component& comp : components) {
    std::vector<double> part;
    if (has_eigenbasis(rep, comp)) {
      std::vector<std::size_t> spec_column(m, 0);
      if (rep.joint_spectrum()) {
        for (std::size_t g = 0; g < m; ++g) spec_column[g] = g;
        part = block_singular_values(jac, comp, *rep.joint_spectrum(), spec_column, m);
      } else {
        JointSpectrum js = permutation_spectrum(rep.permutations()[comp.generators.front()]);
        part = block_singular_values(jac, comp, js, spec_column, m);
      }
      used_blocks = true;
    } else {
      if (cfg.method == SvdMethod::blocks)
        throw UsageError("block SVD route unavailable: no common eigenbasis for a component of " +
                         std::to_string(comp.generators.size()) + " generators");
      check_dense(comp.rows.size() * d * d, comp.cols.size() * d * d, cfg);
      part = singular_values(Matrix(assemble_rows_cols(jac, comp.rows, comp.cols, eval, d, cfg.flattening)));
      used_dense = true;
    }
    result.values.insert(result.values.end(), part.begin(), part.end());
  }
  if (result.values.size() > total) throw NumericalError("component split produced too many singular values");
  result.values.resize(total, 0.0);
  std::sort(result.values.begin(), result.values.end(), std::greater<>());
  result.method = used_dense && used_blocks ? "mixed" : used_dense ? "dense" : "blocks";
  result.components = components.size();
  return result;
}

RankEstimate rank_estimate(std::span<const double> svals, std::size_t dim, const ThresholdPolicy& policy,
                           int decades) {
  if (dim == 0) throw UsageError("rank_estimate: dimension must be positive");
  if (decades < 1) throw UsageError("rank_estimate: grid needs at least one decade");
  const double d2 = static_cast<double>(dim) * static_cast<double>(dim);
  double smax2 = 0.0;
  for (double s : svals) smax2 = std::max(smax2, s * s);
  auto count_at = [&](double lambda) {
    std::size_t c = 0;
    for (double s : svals)
      if (s > 0.0 && s * s >= lambda) ++c;
    return c;
  };

  RankEstimate est;
  for (int e = 1; e <= decades; ++e) {
    double rel = std::pow(10.0, -e);
    double lambda = rel * smax2;
    std::size_t c = count_at(lambda);
    est.curve.push_back({rel, lambda, c, static_cast<double>(c) / d2});
  }

  if (policy.kind == ThresholdPolicy::Kind::fixed) {
    est.threshold = policy.relative * smax2;
    est.count = count_at(est.threshold);
    est.rank = static_cast<double>(est.count) / d2;
    return est;
  }

  // Longest run of equal counts; on ties the later (smaller lambda) run wins.
  std::size_t best_begin = 0, best_len = 0;
  for (std::size_t a = 0; a < est.curve.size();) {
    std::size_t b = a;
    while (b + 1 < est.curve.size() && est.curve[b + 1].count == est.curve[a].count) ++b;
    std::size_t len = b - a + 1;
    if (len >= best_len) {
      best_begin = a;
      best_len = len;
    }
    a = b + 1;
  }
  est.plateau_begin = best_begin;
  est.plateau_length = best_len;
  const RankPoint& last = est.curve[best_begin + best_len - 1];
  est.threshold = last.lambda;
  est.count = last.count;
  est.rank = last.rank;
  return est;
}

LogDeterminant fk_logdet(std::span<const double> svals, std::size_t dim, double lambda_cut, std::size_t q_size) {
  if (!(lambda_cut > 0.0)) throw UsageError("fk_logdet: cut must be positive");
  const double d2 = static_cast<double>(dim) * static_cast<double>(dim);
  LogDeterminant out;
  out.cut = lambda_cut;
  std::size_t kept = 0;
  double sum = 0.0;
  for (double s : svals) {
    double q = s * s;
    if (q > lambda_cut) {
      sum += std::log(q);
      ++kept;
    }
  }
  out.value = sum / d2;
  out.discarded = std::max(q_size, svals.size()) - kept;
  return out;
}

std::vector<TailRow> tail_diagnostic(std::span<const double> svals, std::size_t dim, double kernel_threshold,
                                     std::span<const double> lambdas) {
  const double d2 = static_cast<double>(dim) * static_cast<double>(dim);
  std::vector<TailRow> out;
  for (double lambda : lambdas) {
    std::size_t c = 0;
    for (double s : svals) {
      double q = s * s;
      if (q > 0.0 && q >= kernel_threshold && q < lambda) ++c;
    }
    double phi = static_cast<double>(c) / d2;
    double product = (phi == 0.0 || lambda <= 0.0) ? 0.0 : phi * std::abs(std::log(lambda));
    out.push_back({lambda, phi, product});
  }
  return out;
}

SpectralMeasure mu_histogram(std::span<const double> svals, std::size_t dim, std::size_t n, double kernel_threshold,
                             std::size_t bins) {
  const std::size_t d2 = dim * dim;
  const double norm = static_cast<double>(d2);
  std::vector<double> live;
  for (double s : svals) {
    double q = s * s;
    if (q > 0.0 && q >= kernel_threshold) live.push_back(q);
  }
  SpectralMeasure mu;
  const std::size_t total = std::max(n * d2, svals.size());
  mu.kernel_mass = static_cast<double>(total - live.size()) / norm;
  if (!live.empty() && bins > 0) {
    double hi = *std::max_element(live.begin(), live.end());
    double lo = kernel_threshold > 0.0 ? kernel_threshold : *std::min_element(live.begin(), live.end());
    std::vector<std::size_t> counts(bins, 0);
    const double span = std::log(hi / lo);
    for (double q : live) {
      std::size_t b = 0;
      if (span > 0.0) {
        double pos = std::floor(static_cast<double>(bins) * std::log(q / lo) / span);
        b = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
      }
      ++counts[b];
    }
    for (std::size_t b = 0; b < bins; ++b) {
      double e0 = lo * std::exp(span * static_cast<double>(b) / static_cast<double>(bins));
      double e1 = b + 1 == bins ? hi : lo * std::exp(span * static_cast<double>(b + 1) / static_cast<double>(bins));
      mu.bins.push_back({e0, e1, static_cast<double>(counts[b]) / norm});
    }
  }
  mu.total_mass = static_cast<double>(total) / norm;
  return mu;
}

BettiEstimate betti_estimate(double rank, std::size_t n, double beta0, bool infinite_order, double tolerance) {
  const double nn = static_cast<double>(n);
  if (!(rank >= -1e-9 && rank <= nn + 1e-9))
    throw UsageError("betti_estimate: rank " + std::to_string(rank) + " outside [0, " + std::to_string(n) + "]");
  BettiEstimate b;
  b.rank = rank;
  b.beta0 = beta0;
  b.beta1 = nn - rank - 1.0 + beta0;
  b.delta_upper = nn - rank;
  b.r_bound = b.beta1 - beta0 + 1.0;
  char buf[256];
  if (std::abs(b.beta1) <= tolerance && infinite_order) {
    b.strongly_one_bounded = true;
    b.verdict =
        "consistent with strong 1-boundedness of L(G) (requires: G sofic, finitely presented, infinite, "
        "beta1 = 0); finite-dimensional estimate, not a proof";
  } else {
    std::snprintf(buf, sizeof buf,
                  "generating set is r-bounded with r = beta1 - beta0 + 1 = %.9g (requires: G sofic, "
                  "finitely presented); finite-dimensional estimate, not a proof",
                  b.r_bound);
    b.verdict = buf;
  }
  return b;
}

SpectralReport spectral_report(const Jacobian& jac, const Representation& rep, std::vector<double> relator_defects,
                               const SpectralConfig& cfg) {
  SpectralReport r;
  r.k = jac.k();
  r.n = jac.n();
  r.dim = rep.dim();
  SingularValues sv = jacobian_singular_values(jac, rep, cfg);
  r.svals = std::move(sv.values);
  r.method = sv.method;
  r.q_spectrum.reserve(r.svals.size());
  for (double s : r.svals) r.q_spectrum.push_back(s * s);
  r.rank = rank_estimate(r.svals, r.dim, cfg.threshold, cfg.grid_decades);
  const double cut = r.rank.threshold > 0.0 ? r.rank.threshold : std::numeric_limits<double>::min();
  r.logdet = fk_logdet(r.svals, r.dim, cut, r.n * r.dim * r.dim);
  std::vector<double> lambdas;
  for (const auto& p : r.rank.curve) lambdas.push_back(p.lambda);
  r.tail = tail_diagnostic(r.svals, r.dim, r.rank.threshold, lambdas);
  r.mu = mu_histogram(r.svals, r.dim, r.n, r.rank.threshold, cfg.histogram_bins);
  r.relator_defects = std::move(relator_defects);
  return r;
}

double commutator_identity_residual(const NCPoly& f, std::span<const TensorPoly> row, std::span<const Matrix> x,
                                    const Matrix& t) {
  if (row.size() != x.size()) throw UsageError("commutator identity: row length does not match variable count");
  MonomialEvaluator eval(x);
  const std::size_t d = static_cast<std::size_t>(t.rows());
  Matrix fx = evaluate_poly(f, x);
  Matrix residual = fx * t - t * fx;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k].is_zero()) continue;
    Matrix y = evaluate_tensor(row[k], eval, d).apply(t);
    residual -= y * x[k] - x[k] * y;
  }
  return residual.norm();
}

double tuple_norm(std::span<const Matrix> tuple) {
  double sum = 0.0;
  for (const Matrix& a : tuple) sum += a.squaredNorm() / static_cast<double>(a.rows());
  return std::sqrt(sum);
}

Matrix gaussian_self_adjoint(std::size_t dim, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, 0x5EED000000000000ULL + stream);
  const auto d = static_cast<Eigen::Index>(dim);
  const double diag_scale = 1.0 / std::sqrt(static_cast<double>(dim));
  const double off_scale = 1.0 / std::sqrt(2.0 * static_cast<double>(dim));
  Matrix s(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    s(i, i) = rng.normal() * diag_scale;
    for (Eigen::Index j = i + 1; j < d; ++j) {
      double re = rng.normal();
      double im = rng.normal();
      s(i, j) = Complex(re, im) * off_scale;
      s(j, i) = std::conj(s(i, j));
    }
  }
  return s;
}

ProbeResult perturbation_probe(const RelationSystem& rs, const Jacobian& jac, const Representation& rep,
                               std::span<const double> eps, std::uint64_t seed) {
  if (jac.n() != rep.nvars() || rs.n != rep.nvars())
    throw UsageError("perturbation probe: variable count mismatch with representation");
  for (double e : eps)
    if (!(e >= 0.0 && e <= 1.0)) throw UsageError("perturbation probe: eps values must lie in [0, 1]");
  const std::size_t d = rep.dim();
  const std::size_t n = rep.nvars();
  auto x = rep.variable_values();
  std::vector<Matrix> s;
  for (std::size_t l = 0; l < n; ++l) s.push_back(gaussian_self_adjoint(d, seed, l));

  MonomialEvaluator eval_x(x);
  std::vector<Matrix> fx, linear;
  for (std::size_t i = 0; i < rs.k; ++i) {
    const auto dd = static_cast<Eigen::Index>(d);
    Matrix f = Matrix::Zero(dd, dd);
    for (const auto& [w, c] : rs.polys[i].terms()) f += c.to_complex() * eval_x(w);
    fx.push_back(std::move(f));
    Matrix lin = Matrix::Zero(dd, dd);
    for (std::size_t l = 0; l < n; ++l)
      if (!jac.at(i, l).is_zero()) lin += evaluate_tensor(jac.at(i, l), eval_x, d).apply(s[l]);
    linear.push_back(std::move(lin));
  }

  auto shifted = [&](double e) {
    const double r = std::sqrt(e);
    std::vector<Matrix> y(n);
    for (std::size_t l = 0; l < n; ++l) y[l] = x[l] + r * s[l];
    MonomialEvaluator eval_y(y);
    std::vector<Matrix> fy;
    for (std::size_t i = 0; i < rs.k; ++i) {
      const auto dd = static_cast<Eigen::Index>(d);
      Matrix f = Matrix::Zero(dd, dd);
      for (const auto& [w, c] : rs.polys[i].terms()) f += c.to_complex() * eval_y(w);
      fy.push_back(std::move(f));
    }
    return fy;
  };
  auto defect_of = [&](double e, const std::vector<Matrix>& fy) {
    const double r = std::sqrt(e);
    std::vector<Matrix> diff(rs.k);
    for (std::size_t i = 0; i < rs.k; ++i) diff[i] = fy[i] - fx[i] - r * linear[i];
    return tuple_norm(diff);
  };

  ProbeResult out;
  out.linear_norm = tuple_norm(linear);
  for (double e : eps) {
    auto fy = shifted(e);
    double defect = defect_of(e, fy);
    out.rows.push_back({e, defect, e > 0.0 ? defect / e : 0.0});
    std::vector<Matrix> first(rs.k);
    for (std::size_t i = 0; i < rs.k; ++i) first[i] = fy[i] - fx[i];
    out.first_order_norms.push_back(e > 0.0 ? tuple_norm(first) / std::sqrt(e) : 0.0);
    double half = defect_of(e / 2.0, shifted(e / 2.0));
    out.halving_ratios.push_back(defect > 0.0 ? half / defect : 0.0);
  }
  return out;
}

}  // namespace fdq
