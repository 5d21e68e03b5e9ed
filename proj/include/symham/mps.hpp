// The matrix-product isometry triple (k, u, V): Kraus extraction, transfer
// channel, primitivity certification by span growth with determinant
// witnesses, and Perron normalization data.
#pragma once

#include <string>
#include <vector>

#include "symham/group.hpp"
#include "symham/linalg.hpp"
#include "symham/rep.hpp"

namespace symham {

constexpr Eigen::Index kMaxBondDimension = 8;

struct KrausFamily {
  std::vector<cmat> v;  // n matrices, each k x k

  Eigen::Index n() const { return static_cast<Eigen::Index>(v.size()); }
  Eigen::Index k() const { return v.empty() ? 0 : v.front().rows(); }
};

inline KrausFamily kraus_from_isometry(const cmat& V, Eigen::Index n, Eigen::Index k) {
  if (V.rows() != n * k || V.cols() != k)
    throw error(errc::shape_mismatch, "kraus_from_isometry: V must be (n*k) x k");
  KrausFamily out;
  out.v.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index mu = 0; mu < n; ++mu) out.v.push_back(V.block(mu * k, 0, k, k).adjoint());
  return out;
}

inline cmat isometry_from_kraus(const KrausFamily& f) {
  const Eigen::Index n = f.n(), k = f.k();
  cmat V(n * k, k);
  for (Eigen::Index mu = 0; mu < n; ++mu) V.block(mu * k, 0, k, k) = f.v[static_cast<std::size_t>(mu)].adjoint();
  return V;
}

inline cmat transfer_apply(const KrausFamily& f, const cmat& x) {
  const Eigen::Index k = f.k();
  if (x.rows() != k || x.cols() != k)
    throw error(errc::shape_mismatch, "transfer_apply: argument must be k x k");
  cmat out = cmat::Zero(k, k);
  for (const auto& v : f.v) out += v * x * v.adjoint();
  return out;
}

// Adjoint channel X -> sum v* X v.
inline cmat transfer_apply_adjoint(const KrausFamily& f, const cmat& x) {
  const Eigen::Index k = f.k();
  if (x.rows() != k || x.cols() != k)
    throw error(errc::shape_mismatch, "transfer_apply_adjoint: argument must be k x k");
  cmat out = cmat::Zero(k, k);
  for (const auto& v : f.v) out += v.adjoint() * x * v;
  return out;
}

// Matrix of the transfer channel on row-major vectorized arguments:
// sum_mu v_mu (x) conj(v_mu).
inline cmat transfer_matrix(const KrausFamily& f) {
  const Eigen::Index k = f.k();
  cmat out = cmat::Zero(k * k, k * k);
  for (const auto& v : f.v) out += kron(v, v.conjugate());
  return out;
}

inline double unitality_residual(const KrausFamily& f) {
  const Eigen::Index k = f.k();
  return (transfer_apply(f, cmat::Identity(k, k)) - cmat::Identity(k, k)).norm();
}

inline cmat word_product(const KrausFamily& f, const std::vector<int>& word) {
  cmat p = cmat::Identity(f.k(), f.k());
  for (int mu : word) {
    if (mu < 0 || mu >= f.n()) throw error(errc::shape_mismatch, "word letter out of range");
    p = p * f.v[static_cast<std::size_t>(mu)];
  }
  return p;
}

// ---------------------------------------------------------------------------
// Primitivity certification.
//
// Span growth: S_1 = span{v_mu}, S_{l+1} = span{v_mu A : A in basis(S_l)}.
// The channel is primitive iff some S_l is all of M_k, and the quantum
// Wielandt bound caps the search at l = k^4. For each accepted basis element
// we keep the first word that enlarged the span (FIFO), so the k^2 tracked
// words at the full level give a determinant witness: the pairing
// <zeta, x_1 (x) ... (x) x_{k^2}> of antisymmetrized basis vectors equals
// det[<chi_i, x_j>], i.e. the determinant of vectorized word products, so
// "some word collection has nonzero pairing at length l" is exactly "words of
// length l span M_k".

struct PrimitivityCertificate {
  bool primitive = false;
  int injectivity_length = -1;                  // set when primitive
  std::vector<std::vector<int>> witness_words;  // k^2 words of that length
  double witness_det_modulus = 0.0;
  Eigen::Index final_span_dim = 0;              // span dimension where the search stopped
};

inline cx witness_determinant(const KrausFamily& f, const std::vector<std::vector<int>>& words) {
  const Eigen::Index k = f.k();
  if (static_cast<Eigen::Index>(words.size()) != k * k)
    throw error(errc::shape_mismatch, "witness_determinant: need exactly k^2 words");
  std::size_t len = words.front().size();
  cmat m(k * k, k * k);
  for (std::size_t j = 0; j < words.size(); ++j) {
    if (words[j].size() != len)
      throw error(errc::shape_mismatch, "witness_determinant: words must share one length");
    m.col(static_cast<Eigen::Index>(j)) = vec_rm(word_product(f, words[j]));
  }
  return m.determinant();
}

inline PrimitivityCertificate primitivity_certificate(const KrausFamily& f,
                                                      double tol_rank = default_tol().rank) {
  const Eigen::Index k = f.k();
  const Eigen::Index n = f.n();
  const Eigen::Index target = k * k;
  const long lmax = static_cast<long>(k) * k * k * k;

  struct Tracked {
    std::vector<int> word;
    cmat product;
  };

  auto grow_level = [&](const std::vector<Tracked>& prev) {
    // materialize the level's candidates in FIFO order so acceptance can be
    // thresholded against the level scale (the SVD-rank convention: keep
    // directions above tol_rank times the largest candidate)
    std::vector<Tracked> candidates;
    if (prev.empty()) {
      for (Eigen::Index mu = 0; mu < n; ++mu)
        candidates.push_back(Tracked{{static_cast<int>(mu)}, f.v[static_cast<std::size_t>(mu)]});
    } else {
      for (Eigen::Index mu = 0; mu < n; ++mu)
        for (const auto& t : prev) {
          std::vector<int> w;
          w.reserve(t.word.size() + 1);
          w.push_back(static_cast<int>(mu));
          w.insert(w.end(), t.word.begin(), t.word.end());
          candidates.push_back(Tracked{std::move(w), f.v[static_cast<std::size_t>(mu)] * t.product});
        }
    }
    double scale = 0.0;
    for (const auto& c : candidates) scale = std::max(scale, c.product.norm());

    std::vector<Tracked> next;
    cmat q(target, target);  // orthonormalized vecs of accepted products
    Eigen::Index nq = 0;
    for (auto& c : candidates) {
      if (nq >= target) break;
      if (!c.product.allFinite()) continue;
      cvec x = vec_rm(c.product);
      for (int pass = 0; pass < 2; ++pass)
        if (nq > 0) x -= q.leftCols(nq) * (q.leftCols(nq).adjoint() * x);
      if (x.norm() > tol_rank * scale) {
        q.col(nq++) = x / x.norm();
        next.push_back(std::move(c));
      }
    }
    return std::make_pair(std::move(next), std::move(q));
  };

  std::vector<Tracked> level;
  cmat level_q;
  PrimitivityCertificate cert;
  for (long l = 1; l <= lmax; ++l) {
    auto [next, q] = grow_level(level);
    Eigen::Index dim = static_cast<Eigen::Index>(next.size());
    if (dim == target) {
      cert.primitive = true;
      cert.injectivity_length = static_cast<int>(l);
      cert.final_span_dim = dim;
      for (const auto& t : next) cert.witness_words.push_back(t.word);
      cmat wm(target, target);
      for (Eigen::Index j = 0; j < target; ++j)
        wm.col(j) = vec_rm(next[static_cast<std::size_t>(j)].product);
      cert.witness_det_modulus = std::abs(wm.determinant());
      return cert;
    }
    // stalled subspace: S_{l+1} == S_l implies the sequence is constant
    if (!level.empty() && dim == static_cast<Eigen::Index>(level.size())) {
      double leak = 0.0;
      for (Eigen::Index j = 0; j < dim; ++j) {
        cvec x = q.col(j);
        x -= level_q.leftCols(dim) * (level_q.leftCols(dim).adjoint() * x);
        leak = std::max(leak, x.norm());
      }
      if (leak < 1e-12) {
        cert.final_span_dim = dim;
        return cert;  // not primitive
      }
    }
    level = std::move(next);
    level_q = std::move(q);
    cert.final_span_dim = static_cast<Eigen::Index>(level.size());
    if (level.empty()) return cert;  // all products vanished
  }
  return cert;  // length k^4 reached without a full span: not primitive
}

// ---------------------------------------------------------------------------
// Perron data of a certified-primitive channel.

struct PerronData {
  double r = 0.0;  // spectral radius
  cmat e;          // right fixed point, Hermitian positive definite, tr(e) = k
  cmat phi;        // left fixed density, positive definite, tr(phi * e) = 1
};

namespace detail {

// Rotate the global phase so the trace is real positive, then Hermitize.
inline cmat positivize(const cmat& raw, double tol_rank, const char* what) {
  cx tr = raw.trace();
  double m = std::abs(tr);
  cmat fixed = raw;
  if (m > 1e-14 * raw.norm()) fixed *= std::conj(tr) / m;
  fixed = (fixed + fixed.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<cmat> es(fixed);
  const rvec& ev = es.eigenvalues();
  if (ev(0) <= tol_rank * ev(ev.size() - 1))
    throw error(errc::not_primitive,
                std::string(what) + ": fixed point is not strictly positive");
  return fixed;
}

}  // namespace detail

inline PerronData perron_data(const KrausFamily& f, const PrimitivityCertificate& cert,
                              const Tolerances& tol = default_tol()) {
  if (!cert.primitive)
    throw error(errc::not_primitive, "perron_data: channel is not certified primitive");
  const Eigen::Index k = f.k();
  cmat m = transfer_matrix(f);
  cvec start = vec_rm(cmat::Identity(k, k));
  LeadingPair p = leading_eigenpair(m, tol.pf / 20.0, tol.max_iter, &start);
  if (std::abs(p.value.imag()) > 10 * tol.pf * std::abs(p.value))
    throw error(errc::not_primitive, "perron_data: leading eigenvalue is not real positive");
  double r = std::abs(p.value);

  cmat e = detail::positivize(unvec_rm(p.right, k, k), tol.rank, "perron_data right");
  e *= static_cast<double>(k) / e.trace().real();
  // the left vector satisfies M^T l = r l, so the adjoint fixed density is conj(l)
  cmat phi = detail::positivize(unvec_rm(p.left.conjugate(), k, k), tol.rank, "perron_data left");
  phi /= (phi * e).trace().real();

  double re = (transfer_apply(f, e) - r * e).norm();
  double rphi = (transfer_apply_adjoint(f, phi) - r * phi).norm();
  if (re > tol.pf * r * e.norm() || rphi > tol.pf * r * phi.norm())
    throw error(errc::convergence_failure, "perron_data: fixed-point residuals exceed tolerance");
  return PerronData{r, e, phi};
}

inline KrausFamily normalize_kraus(const KrausFamily& f, const PerronData& pd,
                                   const Tolerances& tol = default_tol()) {
  const Eigen::Index k = f.k();
  Eigen::SelfAdjointEigenSolver<cmat> es(pd.e);
  const rvec& ev = es.eigenvalues();
  if (ev(0) <= 0)
    throw error(errc::not_positive, "normalize_kraus: e is not positive definite");
  rvec sq = ev.cwiseSqrt();
  cmat e_half = es.eigenvectors() * sq.asDiagonal().toDenseMatrix().cast<cx>() *
                es.eigenvectors().adjoint();
  cmat e_minus_half = es.eigenvectors() *
                      sq.cwiseInverse().asDiagonal().toDenseMatrix().cast<cx>() *
                      es.eigenvectors().adjoint();
  double scale = 1.0 / std::sqrt(pd.r);
  KrausFamily out;
  out.v.reserve(f.v.size());
  for (const auto& v : f.v) out.v.push_back(scale * e_minus_half * v * e_half);
  double res = unitality_residual(out);
  double cond = ev(ev.size() - 1) / ev(0);
  if (res > 10 * tol.pf * std::max(1.0, cond))
    throw error(errc::convergence_failure,
                "normalize_kraus: normalized channel is not unital, residual " +
                    std::to_string(res));
  return out;
}

// ---------------------------------------------------------------------------
// The validated triple.

struct MpsTriple {
  Eigen::Index n = 0;  // physical dimension
  Eigen::Index k = 0;  // bond dimension
  GroupPtr group;
  ProjectiveRep U;  // physical rep, trivial cocycle
  ProjectiveRep u;  // bond rep, group cocycle
  cmat V;           // (n*k) x k isometry
  KrausFamily kraus;
  PrimitivityCertificate certificate;
};

inline double intertwiner_residual(const ProjectiveRep& U, const ProjectiveRep& u, const cmat& V) {
  double worst = 0.0;
  for (int g = 0; g < U.group->order; ++g)
    worst = std::max(worst, (kron(U.at(g), u.at(g)) * V - V * u.at(g)).norm());
  return worst;
}

inline double isometry_residual(const cmat& V) {
  return (V.adjoint() * V - cmat::Identity(V.cols(), V.cols())).norm();
}

inline MpsTriple validate_sp_triple(GroupPtr group, const ProjectiveRep& U,
                                    const ProjectiveRep& u, const cmat& V,
                                    const Tolerances& tol = default_tol()) {
  const Eigen::Index n = U.dim;
  const Eigen::Index k = u.dim;
  if (k > kMaxBondDimension)
    throw error(errc::unsupported,
                "bond dimension " + std::to_string(k) + " exceeds the supported maximum " +
                    std::to_string(kMaxBondDimension));
  if (!same_group(*group, *U.group) || !same_group(*group, *u.group))
    throw error(errc::group_mismatch, "validate_sp_triple: reps live over different groups");
  if ((U.cocycle - trivial_cocycle(group->order)).norm() > tol.rep * group->order)
    throw error(errc::cocycle_mismatch, "validate_sp_triple: physical rep must have trivial cocycle");
  if ((u.cocycle - group->cocycle).norm() > tol.rep * group->order)
    throw error(errc::cocycle_mismatch, "validate_sp_triple: bond rep must carry the group cocycle");
  if (V.rows() != n * k || V.cols() != k)
    throw error(errc::shape_mismatch, "validate_sp_triple: V must be (n*k) x k");
  if (isometry_residual(V) > tol.unitary * std::max(1.0, V.norm()))
    throw error(errc::not_isometry, "validate_sp_triple: V is not an isometry");
  for (int g = 0; g < group->order; ++g) {
    double res = (kron(U.at(g), u.at(g)) * V - V * u.at(g)).norm();
    if (res > tol.rep)
      throw error(errc::intertwiner_violation,
                  "validate_sp_triple: covariance fails at group element " + std::to_string(g) +
                      " with residual " + std::to_string(res));
  }
  MpsTriple t;
  t.n = n;
  t.k = k;
  t.group = std::move(group);
  t.U = U;
  t.u = u;
  t.V = V;
  t.kraus = kraus_from_isometry(V, n, k);
  t.certificate = primitivity_certificate(t.kraus, tol.rank);
  if (!t.certificate.primitive)
    throw error(errc::not_primitive,
                "validate_sp_triple: transfer channel is not primitive (span dimension " +
                    std::to_string(t.certificate.final_span_dim) + " of " +
                    std::to_string(k * k) + ")");
  return t;
}

}  // namespace symham
