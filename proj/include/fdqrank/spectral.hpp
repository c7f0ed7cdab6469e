#pragma once

// Spectral analysis of the evaluated Jacobian dF(X).
//
// At dimension D the Jacobian acts on n-tuples of D x D matrices; it is a
// (k D^2) x (n D^2) complex matrix. All traces are divided by D^2, so the
// normalized rank lands in [0, n].

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "fdqrank/grouprel.hpp"
#include "fdqrank/repkit.hpp"

namespace fdq {

enum class SvdMethod {
  automatic,  // block-diagonalize where an eigenbasis is known, dense otherwise
  dense,      // reference path: one dense SVD of the full matrix
  blocks,     // require the block path for every component
};

struct ThresholdPolicy {
  enum class Kind { plateau, fixed };
  Kind kind = Kind::plateau;
  double relative = 1e-8;  // fixed: cut at relative * sigma_max^2

  /// "plateau" or "fixed:<relative>".
  static ThresholdPolicy parse(std::string_view text);
  std::string to_string() const;
};

struct SpectralConfig {
  SvdMethod method = SvdMethod::automatic;
  Flattening flattening = Flattening::column_major;
  std::size_t max_dim = 64;
  std::size_t max_side = 20'000;                 // n D^2
  std::size_t max_dense_entries = 150'000'000;   // entries of one dense SVD input
  int grid_decades = 10;                         // lambda grid 1e-1 .. 1e-decades times sigma_max^2
  ThresholdPolicy threshold;
  std::size_t histogram_bins = 24;
  double beta_tolerance = 1e-6;
};

/// The full block matrix: block (i, j) is the materialized operator of d_j F_i.
struct EvaluatedJacobian {
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t dim = 0;
  Eigen::SparseMatrix<Complex> matrix;
};

EvaluatedJacobian assemble(const Jacobian& jac, const Representation& rep, const SpectralConfig& cfg = {});

/// Singular values of a dense matrix, descending (LAPACK zgesdd).
std::vector<double> singular_values(const Matrix& a);
std::vector<double> singular_values(const EvaluatedJacobian& ej);

struct SingularValues {
  std::vector<double> values;  // descending, length min(k, n) D^2
  std::string method;          // "dense", "blocks" or "mixed"
  std::size_t components = 0;
};

/// Singular values of dF(X) along the route chosen by cfg.method. The
/// Jacobian is split into independent generator components first; a
/// component is block-diagonalized when the representation supplies a joint
/// eigenbasis for its generators (or it has one permutation generator).
SingularValues jacobian_singular_values(const Jacobian& jac, const Representation& rep,
                                        const SpectralConfig& cfg = {});

struct RankPoint {
  double relative;  // lambda / sigma_max^2
  double lambda;
  std::size_t count;  // #{sigma^2 >= lambda}
  double rank;        // count / D^2
};

struct RankEstimate {
  std::vector<RankPoint> curve;
  double rank = 0.0;
  std::size_t count = 0;
  /// Kernel boundary: values with sigma^2 below this are treated as kernel.
  double threshold = 0.0;
  std::size_t plateau_begin = 0;
  std::size_t plateau_length = 0;
};

/// Normalized rank curve over the relative lambda grid and its plateau
/// value. The longest run of equal counts wins; ties go to smaller lambda.
RankEstimate rank_estimate(std::span<const double> svals, std::size_t dim, const ThresholdPolicy& policy = {},
                           int decades = 10);

struct LogDeterminant {
  double value = 0.0;
  std::size_t discarded = 0;  // Q-eigenvalues at or below the cut, out of q_size
  double cut = 0.0;
};

/// (1/D^2) sum over sigma^2 > cut of log(sigma^2). q_size is n D^2, the
/// number of eigenvalues of Q counted with multiplicity.
LogDeterminant fk_logdet(std::span<const double> svals, std::size_t dim, double lambda_cut, std::size_t q_size);

struct TailRow {
  double lambda;
  double phi;      // (1/D^2) #{threshold <= sigma^2 < lambda}
  double product;  // phi |log lambda|
};

std::vector<TailRow> tail_diagnostic(std::span<const double> svals, std::size_t dim, double kernel_threshold,
                                     std::span<const double> lambdas);

struct HistogramBin {
  double lo;
  double hi;
  double mass;
};

struct SpectralMeasure {
  double kernel_mass = 0.0;  // includes the n D^2 - len(svals) implicit zeros
  std::vector<HistogramBin> bins;  // log-spaced over [threshold, sigma_max^2]
  double total_mass = 0.0;         // = n
};

SpectralMeasure mu_histogram(std::span<const double> svals, std::size_t dim, std::size_t n, double kernel_threshold,
                             std::size_t bins);

struct BettiEstimate {
  double rank = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;        // n - rank - 1 + beta0
  double delta_upper = 0.0;  // n - rank
  double r_bound = 0.0;      // beta1 - beta0 + 1
  bool strongly_one_bounded = false;
  std::string verdict;
};

BettiEstimate betti_estimate(double rank, std::size_t n, double beta0, bool infinite_order,
                             double tolerance = 1e-6);

struct SpectralReport {
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> svals;
  std::vector<double> q_spectrum;
  RankEstimate rank;
  SpectralMeasure mu;
  LogDeterminant logdet;
  std::vector<TailRow> tail;
  std::vector<double> relator_defects;
  std::string method;
};

SpectralReport spectral_report(const Jacobian& jac, const Representation& rep, std::vector<double> relator_defects,
                               const SpectralConfig& cfg = {});

/// ||[F(X), T] - sum_k [(d_k F)(X) # T, X_k]||, the commutator identity
/// residual for one relation.
double commutator_identity_residual(const NCPoly& f, std::span<const TensorPoly> row, std::span<const Matrix> x,
                                    const Matrix& t);

/// Normalized Hilbert-Schmidt norm sqrt(sum_i Tr(A_i^* A_i) / D) of a tuple.
double tuple_norm(std::span<const Matrix> tuple);

struct ProbeRow {
  double eps;
  double defect;
  double defect_over_eps;
};

struct ProbeResult {
  std::vector<ProbeRow> rows;
  /// defect(eps/2) / defect(eps) per row.
  std::vector<double> halving_ratios;
  /// ||F(X + sqrt(eps) S) - F(X)|| / sqrt(eps) per row.
  std::vector<double> first_order_norms;
  /// ||dF(X) # S||.
  double linear_norm = 0.0;
};

/// Taylor probe F(X + sqrt(eps) S) = F(X) + sqrt(eps) dF(X) # S + O(eps) with
/// S an n-tuple of independent self-adjoint Gaussian matrices normalized to
/// Tr(S_j^2) / D = 1 in expectation.
ProbeResult perturbation_probe(const RelationSystem& rs, const Jacobian& jac, const Representation& rep,
                               std::span<const double> eps, std::uint64_t seed);

/// Self-adjoint Gaussian matrix with E|s_ij|^2 = 1/D (stream `stream` of seed).
Matrix gaussian_self_adjoint(std::size_t dim, std::uint64_t seed, std::uint64_t stream);

}  // namespace fdq
