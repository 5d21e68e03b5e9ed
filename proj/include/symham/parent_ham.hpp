// Parent-Hamiltonian construction: window amplitude maps, ground-space
// projections, the local projector interaction h = 1 - G, finite-chain
// assembly (matrix-free), spectra and gap reports, symmetry residuals.
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "symham/linalg.hpp"
#include "symham/mps.hpp"
#include "symham/rep.hpp"

namespace symham {

inline Eigen::Index ipow(Eigen::Index base, Eigen::Index exp) {
  Eigen::Index r = 1;
  for (Eigen::Index i = 0; i < exp; ++i) r *= base;
  return r;
}

// All k^2 window amplitude vectors at once: column (i*k+j) is the length-l
// window vector generated by the matrix unit e_ij, i.e. the component at
// multi-index mu is conj((v_mu0 ... v_mu(l-1))(i,j)). Site 0 is the most
// significant digit of the row index.
inline cmat window_all(const KrausFamily& f, Eigen::Index l) {
  if (l < 1) throw error(errc::shape_mismatch, "window_all: l must be >= 1");
  const Eigen::Index n = f.n(), k = f.k();
  // grow all word products one site at a time, reusing shared prefixes
  std::vector<cmat> prods{cmat::Identity(k, k)};
  for (Eigen::Index site = 0; site < l; ++site) {
    std::vector<cmat> next(prods.size() * static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < prods.size(); ++i)
      for (Eigen::Index mu = 0; mu < n; ++mu)
        next[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(mu)] =
            prods[i] * f.v[static_cast<std::size_t>(mu)];
    prods = std::move(next);
  }
  cmat out(static_cast<Eigen::Index>(prods.size()), k * k);
  for (std::size_t flat = 0; flat < prods.size(); ++flat)
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        out(static_cast<Eigen::Index>(flat), i * k + j) = std::conj(prods[flat](i, j));
  return out;
}

// Window amplitude vector of a single boundary operator X.
inline cvec window_map(const KrausFamily& f, Eigen::Index l, const cmat& x) {
  const Eigen::Index k = f.k();
  if (x.rows() != k || x.cols() != k)
    throw error(errc::shape_mismatch, "window_map: X must be k x k");
  return window_all(f, l) * vec_rm(x);
}

// The local interaction h = 1 - G with its window data.
struct LocalInteraction {
  Eigen::Index window = 0;  // m
  Eigen::Index phys = 0;    // n
  cmat ground_projection;   // G, n^m x n^m
  cmat h;                   // 1 - G
  Eigen::Index ground_dim = 0;
};

inline LocalInteraction ground_projection(const KrausFamily& f, Eigen::Index l,
                                          double tol_rank = default_tol().rank) {
  cmat a = window_all(f, l);
  SpanBasis sb = orthonormal_span_cols(a, tol_rank);
  LocalInteraction out;
  out.window = l;
  out.phys = f.n();
  out.ground_dim = sb.rank;
  out.ground_projection = sb.basis * sb.basis.adjoint();
  out.h = cmat::Identity(a.rows(), a.rows()) - out.ground_projection;
  return out;
}

// Positive operator with the same support as the ground projection:
// the Gram accumulation of all window vectors.
inline cmat window_overlap_operator(const KrausFamily& f, Eigen::Index m) {
  cmat a = window_all(f, m);
  return a * a.adjoint();
}

// E_A(X) = V* (A (x) X) V.
inline cmat conditional_channel(const cmat& V, const cmat& a, const cmat& x) {
  const Eigen::Index n = a.rows(), k = x.rows();
  if (a.cols() != n || x.cols() != k || V.rows() != n * k || V.cols() != k)
    throw error(errc::shape_mismatch, "conditional_channel: inconsistent shapes");
  return V.adjoint() * kron(a, x) * V;
}

// ---------------------------------------------------------------------------
// Finite open chains.

struct ChainSpec {
  Eigen::Index length = 0;  // N
  LocalInteraction interaction;
};

class ChainOperator {
 public:
  ChainOperator(ChainSpec spec, Eigen::Index budget = Eigen::Index(1) << 22)
      : spec_(std::move(spec)) {
    const Eigen::Index n = spec_.interaction.phys;
    const Eigen::Index m = spec_.interaction.window;
    if (spec_.length < m)
      throw error(errc::shape_mismatch, "chain shorter than the interaction window");
    dim_ = ipow(n, spec_.length);
    if (dim_ > budget)
      throw error(errc::budget_exceeded,
                  "chain dimension " + std::to_string(dim_) + " exceeds budget " +
                      std::to_string(budget));
  }

  Eigen::Index dim() const { return dim_; }
  const ChainSpec& spec() const { return spec_; }

  // y = H x, windowed contraction: one GEMM per interaction placement.
  cvec apply(const cvec& x) const {
    const Eigen::Index n = spec_.interaction.phys;
    const Eigen::Index m = spec_.interaction.window;
    const Eigen::Index N = spec_.length;
    const Eigen::Index w = ipow(n, m);
    const cmat ht = spec_.interaction.h.transpose();
    cvec y = cvec::Zero(dim_);
    for (Eigen::Index pos = 0; pos + m <= N; ++pos) {
      const Eigen::Index left = ipow(n, pos);
      const Eigen::Index right = dim_ / (left * w);
      for (Eigen::Index lidx = 0; lidx < left; ++lidx) {
        Eigen::Map<const cmat> xb(x.data() + lidx * w * right, right, w);
        Eigen::Map<cmat> yb(y.data() + lidx * w * right, right, w);
        yb.noalias() += xb * ht;
      }
    }
    return y;
  }

  cmat dense() const {
    const Eigen::Index n = spec_.interaction.phys;
    const Eigen::Index m = spec_.interaction.window;
    const Eigen::Index N = spec_.length;
    const Eigen::Index w = ipow(n, m);
    const cmat& h = spec_.interaction.h;
    cmat out = cmat::Zero(dim_, dim_);
    for (Eigen::Index pos = 0; pos + m <= N; ++pos) {
      const Eigen::Index left = ipow(n, pos);
      const Eigen::Index right = dim_ / (left * w);
      for (Eigen::Index lidx = 0; lidx < left; ++lidx)
        for (Eigen::Index wr = 0; wr < w; ++wr)
          for (Eigen::Index wc = 0; wc < w; ++wc) {
            if (h(wr, wc) == cx(0, 0)) continue;
            const Eigen::Index rbase = (lidx * w + wr) * right;
            const Eigen::Index cbase = (lidx * w + wc) * right;
            for (Eigen::Index r = 0; r < right; ++r) out(rbase + r, cbase + r) += h(wr, wc);
          }
    }
    return out;
  }

 private:
  ChainSpec spec_;
  Eigen::Index dim_ = 0;
};

inline ChainOperator assemble_chain(const ChainSpec& spec,
                                    Eigen::Index budget = Eigen::Index(1) << 22) {
  return ChainOperator(spec, budget);
}

// ---------------------------------------------------------------------------
// Gap scans over a range of chain lengths.

struct GapRow {
  Eigen::Index length = 0;
  rvec eigenvalues;         // q lowest, ascending
  double ground_energy = 0.0;
  Eigen::Index degeneracy = 0;
  bool gap_defined = false;
  double gap = 0.0;
};

struct GapReport {
  std::vector<GapRow> rows;
  double gamma_estimate = 0.0;  // min over defined gaps
  bool all_gaps_defined = false;
};

struct GapScanOptions {
  Eigen::Index budget = Eigen::Index(1) << 22;
  Eigen::Index dense_cutoff = 4096;
  double tol_eig = default_tol().eig;
  double eps_deg = default_tol().deg;
  int threads = 1;
  std::uint64_t seed = 0;
};

inline GapReport gap_scan(const LocalInteraction& interaction, Eigen::Index n_min,
                          Eigen::Index n_max, Eigen::Index q,
                          const GapScanOptions& opt = {}) {
  if (n_min < interaction.window || n_max < n_min)
    throw error(errc::shape_mismatch, "gap_scan: invalid length range");
  const int count = static_cast<int>(n_max - n_min + 1);
  GapReport report;
  report.rows.resize(static_cast<std::size_t>(count));
  parallel_for(count, opt.threads, [&](int idx) {
    const Eigen::Index N = n_min + idx;
    ChainOperator op(ChainSpec{N, interaction}, opt.budget);
    const Eigen::Index dim = op.dim();
    const Eigen::Index qn = std::min(q, dim);
    rvec ev;
    if (dim <= opt.dense_cutoff) {
      ev = lowest_eigenvalues_dense(op.dense(), qn);
    } else {
      LowestEigOptions lo;
      lo.tol = opt.tol_eig;
      lo.dense_cutoff = 0;
      lo.seed = opt.seed + static_cast<std::uint64_t>(N);
      ev = lowest_eigenvalues_iterative([&op](const cvec& x) { return op.apply(x); }, dim, qn, lo);
    }
    GapRow row;
    row.length = N;
    row.eigenvalues = ev;
    row.ground_energy = ev(0);
    Eigen::Index deg = 1;
    while (deg < qn && ev(deg) - ev(0) <= opt.eps_deg) ++deg;
    row.degeneracy = deg;
    if (deg < qn) {
      row.gap_defined = true;
      row.gap = ev(deg) - ev(0);
    }
    report.rows[static_cast<std::size_t>(idx)] = std::move(row);
  });
  report.all_gaps_defined = true;
  double gamma = std::numeric_limits<double>::infinity();
  for (const auto& row : report.rows) {
    if (row.gap_defined)
      gamma = std::min(gamma, row.gap);
    else
      report.all_gaps_defined = false;
  }
  report.gamma_estimate = std::isfinite(gamma) ? gamma : 0.0;
  return report;
}

// Max over the group of || U_g^(x)m h U_g^(x)m* - h ||.
inline double symmetry_residual(const LocalInteraction& interaction, const ProjectiveRep& U) {
  if (U.dim != interaction.phys)
    throw error(errc::dimension_mismatch, "symmetry_residual: physical dimensions differ");
  double worst = 0.0;
  for (int g = 0; g < U.group->order; ++g) {
    cmat ug = cmat::Identity(1, 1);
    for (Eigen::Index s = 0; s < interaction.window; ++s) ug = kron(ug, U.at(g));
    worst = std::max(worst, (ug * interaction.h * ug.adjoint() - interaction.h).norm());
  }
  return worst;
}

}  // namespace symham
