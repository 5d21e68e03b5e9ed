// Dense and iterative complex linear-algebra kernels. Fixes the numeric
// conventions (tolerances, vectorization order, deterministic randomness)
// used by every other module.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <future>
#include <random>
#include <thread>
#include <vector>

#include "symham/errors.hpp"

namespace symham {

using cx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;

// Default tolerances. Double precision leaves at least five digits of
// headroom at desk dimensions, so the validation gates sit well above
// roundoff and well below any physical scale in the fixtures.
struct Tolerances {
  double rank = 1e-9;      // relative singular-value cutoff
  double herm = 1e-10;     // hermiticity precondition
  double unitary = 1e-10;  // unitarity / isometry checks
  double eig = 1e-10;      // eigen residuals
  double pf = 1e-12;       // fixed-point (Perron) residuals
  double rep = 1e-8;       // representation / intertwiner identities
  double deg = 1e-8;       // degeneracy grouping threshold (absolute)
  long max_iter = 100000;
};

inline const Tolerances& default_tol() {
  static const Tolerances t{};
  return t;
}

// ---------------------------------------------------------------------------
// Deterministic pseudo-randomness: one 64-bit seed threaded everywhere.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  cx cnormal() { return cx(normal(), normal()) / std::sqrt(2.0); }
  std::uint64_t next_seed() { return gen_(); }

  cmat gaussian(Eigen::Index rows, Eigen::Index cols) {
    cmat a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = cnormal();
    return a;
  }

  cvec gaussian_vec(Eigen::Index n) {
    cvec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal();
    return v;
  }

  cmat hermitian(Eigen::Index n) {
    cmat a = gaussian(n, n);
    return (a + a.adjoint()) / 2.0;
  }

  // Haar-ish unitary via QR of a Ginibre matrix with the R-diagonal phase fix.
  cmat unitary(Eigen::Index n) {
    cmat a = gaussian(n, n);
    Eigen::HouseholderQR<cmat> qr(a);
    cmat q = qr.householderQ() * cmat::Identity(n, n);
    cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
      cx d = r(i, i);
      double m = std::abs(d);
      q.col(i) *= (m > 0) ? d / m : cx(1, 0);
    }
    return q;
  }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Small helpers shared across modules.

inline cmat kron(const cmat& a, const cmat& b) {
  cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Row-major vectorization: entry (i,j) of a k x k matrix lands at index i*k+j.
// This is the convention under which the transfer matrix of a Kraus family is
// sum_mu v_mu (x) conj(v_mu).
inline cvec vec_rm(const cmat& a) {
  cvec v(a.rows() * a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

inline cmat unvec_rm(const cvec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw error(errc::shape_mismatch, "unvec_rm: size mismatch");
  cmat a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = v(i * cols + j);
  return a;
}

inline bool finite_entries(const cmat& a) { return a.allFinite(); }

// ---------------------------------------------------------------------------
// Hermitian eigensystems.

struct HermitianEigenSystem {
  rvec eigenvalues;   // ascending
  cmat eigenvectors;  // orthonormal columns, phase-fixed
};

// Phase-fix: rotate each column so its first component of non-negligible
// modulus is positive real. Keeps reports reproducible across runs.
inline void phase_fix_columns(cmat& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    double colnorm = v.col(j).norm();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      double m = std::abs(v(i, j));
      if (m > 1e-12 * colnorm) {
        v.col(j) *= std::conj(v(i, j)) / m;
        break;
      }
    }
  }
}

inline HermitianEigenSystem hermitian_eigensystem(const cmat& a,
                                                  double tol_herm = default_tol().herm) {
  if (a.rows() != a.cols()) throw error(errc::shape_mismatch, "hermitian_eigensystem: not square");
  double scale = a.norm();
  if ((a - a.adjoint()).norm() > tol_herm * std::max(scale, 1.0))
    throw error(errc::not_hermitian, "hermitian_eigensystem: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<cmat> es((a + a.adjoint()) / 2.0);
  if (es.info() != Eigen::Success)
    throw error(errc::convergence_failure, "hermitian_eigensystem: solver did not converge");
  HermitianEigenSystem out{es.eigenvalues(), es.eigenvectors()};
  phase_fix_columns(out.eigenvectors);
  return out;
}

// ---------------------------------------------------------------------------
// Orthonormal span (rank-revealing).

struct SpanBasis {
  Eigen::Index rank = 0;
  cmat basis;  // orthonormal columns spanning the input
};

inline SpanBasis orthonormal_span_cols(const cmat& cols, double tol_rank = default_tol().rank) {
  if (cols.cols() == 0) return SpanBasis{0, cmat(cols.rows(), 0)};
  Eigen::JacobiSVD<cmat> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol_rank * smax) ++rank;
  if (smax == 0.0) rank = 0;
  return SpanBasis{rank, svd.matrixU().leftCols(rank)};
}

inline SpanBasis orthonormal_span(const std::vector<cvec>& vectors,
                                  double tol_rank = default_tol().rank) {
  if (vectors.empty()) return SpanBasis{0, cmat(0, 0)};
  cmat cols(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != cols.rows())
      throw error(errc::shape_mismatch, "orthonormal_span: vector lengths differ");
    cols.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return orthonormal_span_cols(cols, tol_rank);
}

// ---------------------------------------------------------------------------
// Polar factor and principal logarithm of a unitary.

inline cmat polar_unitary(const cmat& a, double tol_rank = default_tol().rank) {
  if (a.rows() != a.cols()) throw error(errc::shape_mismatch, "polar_unitary: not square");
  Eigen::JacobiSVD<cmat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= tol_rank * sv(0))
    throw error(errc::singular_matrix, "polar_unitary: matrix is numerically singular");
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Principal logarithm H of a unitary S: H Hermitian, exp(iH) = S, eigenphases
// in (-pi, pi]. Uses the complex Schur form, which is diagonal for a unitary.
inline cmat principal_log_unitary(const cmat& s, double tol_unitary = default_tol().unitary) {
  if (s.rows() != s.cols()) throw error(errc::shape_mismatch, "principal_log_unitary: not square");
  Eigen::Index n = s.rows();
  if ((s.adjoint() * s - cmat::Identity(n, n)).norm() > tol_unitary * std::max(1.0, s.norm()))
    throw error(errc::not_unitary, "principal_log_unitary: input is not unitary");
  Eigen::ComplexSchur<cmat> schur(s);
  if (schur.info() != Eigen::Success)
    throw error(errc::convergence_failure, "principal_log_unitary: Schur iteration failed");
  const cmat& q = schur.matrixU();
  const cmat& t = schur.matrixT();
  rvec phases(n);
  for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::arg(t(i, i));
  cmat h = q * phases.asDiagonal().toDenseMatrix().cast<cx>() * q.adjoint();
  return (h + h.adjoint()) / 2.0;
}

// exp(i z H) for Hermitian H and complex z, via the spectral decomposition.
inline cmat exp_i_hermitian(const cmat& h, cx z = cx(1, 0)) {
  HermitianEigenSystem es = hermitian_eigensystem(h, 1e-8);
  cvec d(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    d(i) = std::exp(cx(0, 1) * z * es.eigenvalues(i));
  return es.eigenvectors * d.asDiagonal() * es.eigenvectors.adjoint();
}

// ---------------------------------------------------------------------------
// Lowest eigenvalues of a Hermitian operator given by matrix-vector products.
// Dense reference path below `dense_cutoff`; block Lanczos (Rayleigh-Ritz over
// a block-Krylov subspace with full reorthogonalization and thick restarts)
// above it.

using ApplyFn = std::function<cvec(const cvec&)>;

struct LowestEigOptions {
  double tol = default_tol().eig;
  Eigen::Index dense_cutoff = 4096;
  std::uint64_t seed = 0;
  Eigen::Index max_subspace = 0;  // 0: automatic
  int max_restarts = 12;
};

inline cmat materialize(const ApplyFn& apply, Eigen::Index dim) {
  cmat h(dim, dim);
  cvec e = cvec::Zero(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    e(j) = 1.0;
    h.col(j) = apply(e);
    e(j) = 0.0;
  }
  return h;
}

inline rvec lowest_eigenvalues_dense(const cmat& h, Eigen::Index q) {
  Eigen::SelfAdjointEigenSolver<cmat> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw error(errc::convergence_failure, "lowest_eigenvalues: dense solver failed");
  return es.eigenvalues().head(q);
}

namespace detail {

// Orthonormalize the columns of w against q_basis (two Gram-Schmidt passes)
// and among themselves; rank-deficient directions are replaced by seeded
// random vectors so the block size stays constant.
inline cmat orthonormal_block(cmat w, const cmat& q_basis, Eigen::Index ncols, Rng& rng) {
  for (int pass = 0; pass < 2; ++pass)
    if (ncols > 0) w -= q_basis.leftCols(ncols) * (q_basis.leftCols(ncols).adjoint() * w);
  cmat out(w.rows(), w.cols());
  Eigen::Index got = 0;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    cvec v = w.col(j);
    double before = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      if (got > 0) v -= out.leftCols(got) * (out.leftCols(got).adjoint() * v);
      if (ncols > 0) v -= q_basis.leftCols(ncols) * (q_basis.leftCols(ncols).adjoint() * v);
    }
    if (v.norm() > 1e-8 * std::max(before, 1e-300)) {
      out.col(got++) = v / v.norm();
    } else {
      // replace a collapsed direction with a fresh random one
      cvec r = rng.gaussian_vec(w.rows());
      for (int pass = 0; pass < 2; ++pass) {
        if (got > 0) r -= out.leftCols(got) * (out.leftCols(got).adjoint() * r);
        if (ncols > 0) r -= q_basis.leftCols(ncols) * (q_basis.leftCols(ncols).adjoint() * r);
      }
      if (r.norm() > 1e-12) out.col(got++) = r / r.norm();
    }
  }
  return out.leftCols(got);
}

}  // namespace detail

inline rvec lowest_eigenvalues_iterative(const ApplyFn& apply, Eigen::Index dim, Eigen::Index q,
                                         const LowestEigOptions& opt) {
  Rng rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
  const Eigen::Index b = std::min<Eigen::Index>(q, dim);
  Eigen::Index kmax = opt.max_subspace > 0 ? opt.max_subspace
                                           : std::min<Eigen::Index>(dim, std::max<Eigen::Index>(6 * q, 160));
  kmax = std::max<Eigen::Index>(kmax, 2 * b);
  cmat qb(dim, kmax);   // orthonormal basis
  cmat hqb(dim, kmax);  // images under the operator
  Eigen::Index k = 0;
  cmat block = detail::orthonormal_block(rng.gaussian(dim, b), qb, 0, rng);

  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    // expand the subspace
    while (k < kmax && block.cols() > 0) {
      Eigen::Index take = std::min<Eigen::Index>(block.cols(), kmax - k);
      qb.middleCols(k, take) = block.leftCols(take);
      for (Eigen::Index j = 0; j < take; ++j) hqb.col(k + j) = apply(qb.col(k + j));
      Eigen::Index prev = k;
      k += take;
      if (k >= kmax || k >= dim) break;
      block = detail::orthonormal_block(hqb.middleCols(prev, take), qb, k, rng);
    }
    // Rayleigh-Ritz on the accumulated subspace
    cmat t = qb.leftCols(k).adjoint() * hqb.leftCols(k);
    t = (t + t.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<cmat> es(t);
    rvec theta = es.eigenvalues();
    cmat s = es.eigenvectors();
    double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());

    Eigen::Index nq = std::min<Eigen::Index>(q, k);
    cmat ritz = qb.leftCols(k) * s.leftCols(nq);
    cmat hritz = hqb.leftCols(k) * s.leftCols(nq);
    bool converged = (nq == q) || (k >= dim);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < nq; ++j) {
      double res = (hritz.col(j) - theta(j) * ritz.col(j)).norm();
      worst = std::max(worst, res);
      if (res > opt.tol * scale) converged = false;
    }
    if (k >= dim) return theta.head(std::min<Eigen::Index>(q, k));
    if (converged) return theta.head(q);
    if (restart == opt.max_restarts) break;

    // thick restart: keep the lowest Ritz vectors, expand from their residual
    Eigen::Index keep = std::min<Eigen::Index>(k, 3 * q);
    cmat qs = qb.leftCols(k) * s.leftCols(keep);
    cmat hqs = hqb.leftCols(k) * s.leftCols(keep);
    qb.leftCols(keep) = qs;
    hqb.leftCols(keep) = hqs;
    k = keep;
    block = detail::orthonormal_block(hqb.leftCols(b), qb, k, rng);
  }
  throw error(errc::convergence_failure, "lowest_eigenvalues: restarts exhausted");
}

inline rvec lowest_eigenvalues(const ApplyFn& apply, Eigen::Index dim, Eigen::Index q,
                               const LowestEigOptions& opt = {}) {
  if (q > dim) throw error(errc::shape_mismatch, "lowest_eigenvalues: q exceeds dimension");
  if (dim <= opt.dense_cutoff) return lowest_eigenvalues_dense(materialize(apply, dim), q);
  return lowest_eigenvalues_iterative(apply, dim, q, opt);
}

// ---------------------------------------------------------------------------
// Leading eigenpair of a general (non-Hermitian) operator by power iteration
// with Rayleigh-quotient convergence. Failure to converge within max_iter
// signals a (near-)degenerate peripheral spectrum.

struct LeadingPair {
  cx value;
  cvec right;
  cvec left;
};

namespace detail {

inline std::pair<cx, cvec> power_iterate(const ApplyFn& apply, Eigen::Index dim, double tol,
                                         long max_iter, const cvec* start, Rng& rng) {
  cvec x = start ? *start : rng.gaussian_vec(dim);
  double nx = x.norm();
  if (nx == 0.0) x = rng.gaussian_vec(dim);
  x /= x.norm();
  cx lambda(0, 0);
  for (long it = 0; it < max_iter; ++it) {
    cvec y = apply(x);
    lambda = x.dot(y);  // Eigen dot conjugates the left argument
    double resid = (y - lambda * x).norm();
    double scale = std::max(std::abs(lambda), 1e-30);
    if (resid <= tol * scale) return {lambda, x};
    double ny = y.norm();
    if (ny == 0.0) return {cx(0, 0), x};  // operator annihilates the iterate
    x = y / ny;
  }
  throw error(errc::convergence_failure,
              "leading_eigenpair: power iteration did not converge (peripheral spectrum "
              "degenerate or near-degenerate)");
}

}  // namespace detail

inline LeadingPair leading_eigenpair(const ApplyFn& apply, const ApplyFn& apply_transpose,
                                     Eigen::Index dim, double tol_pf = default_tol().pf,
                                     long max_iter = default_tol().max_iter,
                                     const cvec* start = nullptr, std::uint64_t seed = 0) {
  Rng rng(seed ^ 0xd1b54a32d192ed03ULL);
  auto [value, right] = detail::power_iterate(apply, dim, tol_pf, max_iter, start, rng);
  auto [lvalue, left] = detail::power_iterate(apply_transpose, dim, tol_pf, max_iter, nullptr, rng);
  if (std::abs(lvalue - value) > 1e-6 * std::max(1.0, std::abs(value)))
    throw error(errc::convergence_failure,
                "leading_eigenpair: left/right leading values disagree");
  return LeadingPair{value, right, left};
}

inline LeadingPair leading_eigenpair(const cmat& l, double tol_pf = default_tol().pf,
                                     long max_iter = default_tol().max_iter,
                                     const cvec* start = nullptr, std::uint64_t seed = 0) {
  ApplyFn fwd = [&l](const cvec& x) { return cvec(l * x); };
  ApplyFn bwd = [&l](const cvec& x) { return cvec(l.transpose() * x); };
  return leading_eigenpair(fwd, bwd, l.rows(), tol_pf, max_iter, start, seed);
}

// ---------------------------------------------------------------------------
// Deterministic parallel map: independent items, results written by index,
// fixed reduction order. threads == 0 means hardware concurrency.

inline void parallel_for(int n_items, int threads, const std::function<void(int)>& work) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n_items));
  if (threads == 1) {
    for (int i = 0; i < n_items; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next.fetch_add(1); i < n_items; i = next.fetch_add(1)) work(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace symham
