// The interpolation pipeline between two symmetric triples sharing an
// equivalent bond representation: gauge alignment, block decomposition of the
// isometry against the shared irreducible structure, block rotations with
// Hermitian generators, the holomorphic isometry family, primitivity-safe
// contour selection, Perron renormalization along the contour, and the
// finite-volume verification report.
#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "symham/linalg.hpp"
#include "symham/mps.hpp"
#include "symham/parent_ham.hpp"
#include "symham/rep.hpp"

namespace symham {

// ---------------------------------------------------------------------------
// Block decomposition of the isometry V against the irreducible structure of
// the bond rep u and the site-plus-bond rep U (x) u. Both decompositions are
// aligned to share identical irrep representative matrices, so V becomes
// blkdiag(1_d (x) omega) exactly up to numerical tolerance.

struct IsometryBlock {
  int label = 0;          // index into irreps
  Eigen::Index dim = 0;   // irrep dimension d
  Eigen::Index mult = 0;  // multiplicity in u (may be 0)
  Eigen::Index mult_out = 0;  // multiplicity in U (x) u
  cmat omega;             // mult_out x mult isometry
};

struct BlockDecomposition {
  Eigen::Index n = 0, k = 0;
  cmat W;    // k x k, decomposes u
  cmat Wp;   // nk x nk, decomposes U (x) u
  std::vector<IsometryBlock> blocks;
  std::vector<ProjectiveRep> irreps;

  cmat middle() const {  // blkdiag(1_d (x) omega), nk x k
    cmat out = cmat::Zero(n * k, k);
    Eigen::Index ro = 0, co = 0;
    for (const auto& b : blocks) {
      if (b.mult > 0)
        out.block(ro, co, b.dim * b.mult_out, b.dim * b.mult) =
            kron(cmat::Identity(b.dim, b.dim), b.omega);
      ro += b.dim * b.mult_out;
      co += b.dim * b.mult;
    }
    return out;
  }

  double reassembly_residual(const cmat& V) const { return (V - Wp.adjoint() * middle() * W).norm(); }
};

inline BlockDecomposition block_decompose(const MpsTriple& t, std::uint64_t seed = 0,
                                          const Tolerances& tol = default_tol()) {
  IrrepDecomposition dec_u = irreducible_decomposition(t.u, seed, tol);
  ProjectiveRep big = tensor_rep(t.U, t.u, tol);
  IrrepDecomposition dec_b = irreducible_decomposition(big, seed + 1, tol);
  align_representatives(dec_b, dec_u.representatives, seed + 2);

  BlockDecomposition out;
  out.n = t.n;
  out.k = t.k;
  out.W = dec_u.change_of_basis;
  out.Wp = dec_b.change_of_basis;

  // match classes of dec_u into dec_b (all classes of u must appear in U(x)u
  // for an isometry to exist at all); unmatched dec_b classes carry mult 0
  std::vector<int> u_class_of_b(dec_b.blocks.size(), -1);
  std::vector<bool> u_used(dec_u.blocks.size(), false);
  for (std::size_t bi = 0; bi < dec_b.blocks.size(); ++bi) {
    const ProjectiveRep& pb = dec_b.representatives[static_cast<std::size_t>(dec_b.blocks[bi].label)];
    for (std::size_t ui = 0; ui < dec_u.blocks.size(); ++ui) {
      const ProjectiveRep& pu = dec_u.representatives[static_cast<std::size_t>(dec_u.blocks[ui].label)];
      if (pb.dim != pu.dim) continue;
      bool identical = true;
      for (int g = 0; g < t.group->order && identical; ++g)
        identical = (pb.at(g) - pu.at(g)).norm() < 1e-8 * std::max(1.0, pu.at(g).norm());
      if (identical) {
        u_class_of_b[bi] = static_cast<int>(ui);
        u_used[ui] = true;
        break;
      }
    }
  }
  for (std::size_t ui = 0; ui < dec_u.blocks.size(); ++ui)
    if (!u_used[ui])
      throw error(errc::block_leakage,
                  "block_decompose: a bond irrep does not occur in the site-plus-bond rep");

  cmat m = out.Wp * t.V * out.W.adjoint();

  // column offsets in the dec_u ordering
  std::vector<Eigen::Index> col_off(dec_u.blocks.size() + 1, 0);
  for (std::size_t ui = 0; ui < dec_u.blocks.size(); ++ui)
    col_off[ui + 1] = col_off[ui] + dec_u.blocks[ui].dim * dec_u.blocks[ui].mult;

  double leak = 0.0;
  Eigen::Index ro = 0;
  for (std::size_t bi = 0; bi < dec_b.blocks.size(); ++bi) {
    const auto& bb = dec_b.blocks[bi];
    IsometryBlock blk;
    blk.label = static_cast<int>(out.irreps.size());
    blk.dim = bb.dim;
    blk.mult_out = bb.mult;
    out.irreps.push_back(dec_b.representatives[static_cast<std::size_t>(bb.label)]);

    const Eigen::Index rh = bb.dim * bb.mult;
    int ui = u_class_of_b[bi];
    if (ui >= 0) {
      const auto& ub = dec_u.blocks[static_cast<std::size_t>(ui)];
      blk.mult = ub.mult;
      // average the d diagonal copies of omega out of the block of W' V W*
      cmat sub = m.block(ro, col_off[static_cast<std::size_t>(ui)], rh, ub.dim * ub.mult);
      cmat omega = cmat::Zero(bb.mult, ub.mult);
      for (Eigen::Index a = 0; a < bb.dim; ++a)
        omega += sub.block(a * bb.mult, a * ub.mult, bb.mult, ub.mult);
      omega /= static_cast<double>(bb.dim);
      blk.omega = omega;
      leak = std::max(leak, (sub - kron(cmat::Identity(bb.dim, bb.dim), omega)).norm());
    } else {
      blk.mult = 0;
      blk.omega = cmat::Zero(bb.mult, 0);
    }
    out.blocks.push_back(std::move(blk));
    ro += rh;
  }

  // off-block mass and per-block deviation from the 1 (x) omega model
  double recon = out.reassembly_residual(t.V);
  if (recon > tol.rep || leak > tol.rep)
    throw error(errc::block_leakage, "block_decompose: off-block mass " + std::to_string(recon) +
                                         " exceeds tolerance (rep-matching bug or invalid input)");

  for (const auto& b : out.blocks)
    if (b.mult > 0) {
      double iso = (b.omega.adjoint() * b.omega -
                    cmat::Identity(b.mult, b.mult)).norm();
      if (iso > tol.rep)
        throw error(errc::block_leakage, "block_decompose: omega block is not an isometry");
    }
  return out;
}

// ---------------------------------------------------------------------------
// Block rotations S omega_0 = omega_1 with Hermitian generators.

struct BlockRotation {
  std::vector<cmat> S;  // per block, unitary on C^{mult_out}
  std::vector<cmat> H;  // per block, Hermitian with exp(iH) = S
  cmat assembled;       // blkdiag(1_d (x) H), nk x nk in the Wp basis
};

namespace detail {

// Deterministic orthonormal completion of an isometry's column span:
// Gram-Schmidt of the standard basis in index order.
inline cmat orthonormal_complement(const cmat& iso) {
  const Eigen::Index rows = iso.rows(), cols = iso.cols();
  cmat full(rows, rows);
  Eigen::Index got = 0;
  if (cols > 0) {
    full.leftCols(cols) = iso;
    got = cols;
  }
  for (Eigen::Index j = 0; j < rows && got < rows; ++j) {
    cvec cand = cvec::Zero(rows);
    cand(j) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      cand -= full.leftCols(got) * (full.leftCols(got).adjoint() * cand);
    if (cand.norm() > 1e-8) full.col(got++) = cand / cand.norm();
  }
  if (got != rows)
    throw error(errc::structure_mismatch, "orthonormal completion failed");
  return full.rightCols(rows - cols);
}

}  // namespace detail

inline BlockRotation block_rotation(const BlockDecomposition& d0, const BlockDecomposition& d1,
                                    const Tolerances& tol = default_tol()) {
  if (d0.blocks.size() != d1.blocks.size() || d0.n != d1.n || d0.k != d1.k)
    throw error(errc::structure_mismatch, "block_rotation: decompositions differ in structure");
  for (std::size_t i = 0; i < d0.blocks.size(); ++i) {
    const auto& a = d0.blocks[i];
    const auto& b = d1.blocks[i];
    if (a.dim != b.dim || a.mult != b.mult || a.mult_out != b.mult_out)
      throw error(errc::structure_mismatch, "block_rotation: block shape mismatch at index " +
                                                std::to_string(i));
  }
  BlockRotation rot;
  Eigen::Index total = 0;
  for (const auto& b : d0.blocks) total += b.dim * b.mult_out;
  rot.assembled = cmat::Zero(total, total);
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < d0.blocks.size(); ++i) {
    const auto& a = d0.blocks[i];
    const auto& b = d1.blocks[i];
    cmat s, h;
    if (a.mult == 0) {
      s = cmat::Identity(a.mult_out, a.mult_out);
      h = cmat::Zero(a.mult_out, a.mult_out);
    } else {
      cmat c0 = detail::orthonormal_complement(a.omega);
      cmat c1 = detail::orthonormal_complement(b.omega);
      s = b.omega * a.omega.adjoint() + c1 * c0.adjoint();
      double uni = (s.adjoint() * s - cmat::Identity(a.mult_out, a.mult_out)).norm();
      if (uni > tol.rep)
        throw error(errc::structure_mismatch, "block_rotation: S is not unitary");
      if ((s * a.omega - b.omega).norm() > tol.rep)
        throw error(errc::structure_mismatch, "block_rotation: S omega0 != omega1");
      h = principal_log_unitary(s, 1e-8);
    }
    rot.assembled.block(off, off, a.dim * a.mult_out, a.dim * a.mult_out) =
        kron(cmat::Identity(a.dim, a.dim), h);
    rot.S.push_back(std::move(s));
    rot.H.push_back(std::move(h));
    off += a.dim * a.mult_out;
  }
  return rot;
}

// ---------------------------------------------------------------------------
// The holomorphic isometry family V(z) = Wp* exp(izH) blkdiag(1 (x) omega_0) W
// and its Kraus matrices, entire in z.

inline std::pair<cmat, KrausFamily> holomorphic_isometry(const BlockDecomposition& d0,
                                                         const BlockRotation& rot, cx z) {
  Eigen::Index total = d0.n * d0.k;
  cmat expz = cmat::Zero(total, total);
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < d0.blocks.size(); ++i) {
    const auto& b = d0.blocks[i];
    cmat blk = kron(cmat::Identity(b.dim, b.dim), exp_i_hermitian(rot.H[i], z));
    expz.block(off, off, blk.rows(), blk.cols()) = blk;
    off += blk.rows();
  }
  cmat vz = d0.Wp.adjoint() * expz * d0.middle() * d0.W;

  // Kraus convention: v_mu(z) is the adjoint of the mu-th row block of
  // V(conj z), entrywise entire in z.
  cmat vzbar = vz;
  if (z.imag() != 0.0) {
    cmat expzbar = cmat::Zero(total, total);
    off = 0;
    for (std::size_t i = 0; i < d0.blocks.size(); ++i) {
      const auto& b = d0.blocks[i];
      cmat blk = kron(cmat::Identity(b.dim, b.dim), exp_i_hermitian(rot.H[i], std::conj(z)));
      expzbar.block(off, off, blk.rows(), blk.cols()) = blk;
      off += blk.rows();
    }
    vzbar = d0.Wp.adjoint() * expzbar * d0.middle() * d0.W;
  }
  return {vz, kraus_from_isometry(vzbar, d0.n, d0.k)};
}

// ---------------------------------------------------------------------------
// Primitivity-safe contour through the interpolation parameter.

struct ContourSample {
  double t = 0.0;
  cx value;                    // varpi(t)
  bool primitive = false;
  int injectivity_length = -1;
  double witness0 = 0.0;       // |det| of endpoint-0 word set (diagnostic)
  double witness1 = 0.0;       // |det| of endpoint-1 word set (diagnostic)
};

struct Contour {
  std::vector<ContourSample> samples;  // ascending t, varpi(0)=0, varpi(1)=1
  double epsilon = 0.0;                // deformation amplitude
};

inline Contour primitive_contour(const BlockDecomposition& d0, const BlockRotation& rot,
                                 const std::vector<std::vector<int>>& words0,
                                 const std::vector<std::vector<int>>& words1,
                                 Eigen::Index n_samples,
                                 const std::vector<double>& eps_schedule = {0.05, 0.1, 0.2, 0.4},
                                 double tol_rank = default_tol().rank) {
  std::vector<double> schedule;
  schedule.push_back(0.0);
  schedule.insert(schedule.end(), eps_schedule.begin(), eps_schedule.end());
  std::string failures;
  for (double eps : schedule) {
    Contour contour;
    contour.epsilon = eps;
    bool all_primitive = true;
    for (Eigen::Index i = 0; i <= n_samples; ++i) {
      ContourSample s;
      s.t = static_cast<double>(i) / static_cast<double>(n_samples);
      s.value = cx(s.t, 4.0 * eps * s.t * (1.0 - s.t));
      KrausFamily v = holomorphic_isometry(d0, rot, s.value).second;
      PrimitivityCertificate cert = primitivity_certificate(v, tol_rank);
      s.primitive = cert.primitive;
      s.injectivity_length = cert.injectivity_length;
      if (!words0.empty()) s.witness0 = std::abs(witness_determinant(v, words0));
      if (!words1.empty()) s.witness1 = std::abs(witness_determinant(v, words1));
      if (!s.primitive) {
        all_primitive = false;
        failures += " eps=" + std::to_string(eps) + ",t=" + std::to_string(s.t);
      }
      contour.samples.push_back(s);
    }
    if (all_primitive) return contour;
  }
  throw error(errc::contour_not_found,
              "no contour in the schedule kept every sample primitive; failing samples:" + failures);
}

// ---------------------------------------------------------------------------
// Gauge alignment: rotate triple 0 so its bond rep literally equals the bond
// rep of triple 1. The rotated triple generates the same interaction.

struct GaugeAlignment {
  MpsTriple aligned;  // (k, u1, (1 (x) W) V0 W*)
  cmat W;             // unitary intertwiner u0 -> u1
  cmat H;             // principal log of W
};

inline GaugeAlignment gauge_align(const MpsTriple& t0, const MpsTriple& t1,
                                  std::uint64_t seed = 0,
                                  const Tolerances& tol = default_tol()) {
  if (!same_group(*t0.group, *t1.group))
    throw error(errc::group_mismatch, "gauge_align: triples live over different groups");
  if (t0.n != t1.n || t0.k != t1.k)
    throw error(errc::dimension_mismatch, "gauge_align: dimensions differ");
  auto w = find_unitary_intertwiner(t0.u, t1.u, seed, tol);
  if (!w)
    throw error(errc::not_equivalent_representations,
                "gauge_align: bond representations are not unitarily equivalent");
  GaugeAlignment out;
  out.W = *w;
  out.H = principal_log_unitary(*w, 1e-8);
  cmat v = kron(cmat::Identity(t0.n, t0.n), *w) * t0.V * w->adjoint();
  out.aligned = validate_sp_triple(t1.group, t1.U, t1.u, v, tol);
  return out;
}

// ---------------------------------------------------------------------------
// The assembled path of Hamiltonians.

struct GaugeSegment {
  cmat W_gauge;           // intertwiner u0 -> u1
  cmat H_W;               // principal log of W_gauge
  std::vector<double> s;  // sample parameters
  std::vector<cmat> unitaries;  // What(s) = exp(is H_W)
  LocalInteraction interaction;  // constant along the segment
  double max_delta = 0.0;        // max over samples of ||h(s) - h(0)||
};

struct PathSample {
  double t = 0.0;
  cx contour_value;
  KrausFamily kraus;      // normalized family vhat(t)
  PerronData perron;
  LocalInteraction interaction;
  int injectivity_length = -1;
  double unitality = 0.0;
  double intertwiner = 0.0;
  double e_commutator = 0.0;
};

struct HamiltonianPath {
  Eigen::Index n = 0, k = 0, window = 0;
  GroupPtr group;
  ProjectiveRep U;
  ProjectiveRep u;  // the shared bond rep (u of triple 1)
  GaugeSegment gauge;
  Contour contour;
  std::vector<PathSample> samples;
  PrimitivityCertificate cert0;  // of the gauged start triple
  PrimitivityCertificate cert1;  // of the end triple
  double rotation_generator_norm = 0.0;  // ||blkdiag(1 (x) H)||
  double endpoint_delta_kraus0 = 0.0;  // vhat(0) vs gauged v0
  double endpoint_delta_kraus1 = 0.0;  // vhat(1) vs v1
  double endpoint_delta_h0 = 0.0;      // h(0) vs input interaction 0
  double endpoint_delta_h1 = 0.0;      // h(1) vs input interaction 1
};

struct BuildPathOptions {
  Eigen::Index gauge_samples = 8;
  std::vector<double> eps_schedule = {0.05, 0.1, 0.2, 0.4};
  int threads = 1;
  std::uint64_t seed = 0;
  double endpoint_tol = 1e-9;
};

inline HamiltonianPath build_path(const MpsTriple& t0, const MpsTriple& t1, Eigen::Index window,
                                  Eigen::Index n_samples, const BuildPathOptions& opt = {},
                                  const Tolerances& tol = default_tol()) {
  if (!same_group(*t0.group, *t1.group))
    throw error(errc::group_mismatch, "build_path: triples live over different groups");
  if (t0.n != t1.n || t0.k != t1.k)
    throw error(errc::dimension_mismatch, "build_path: dimensions differ");
  for (int g = 0; g < t0.group->order; ++g)
    if ((t0.U.at(g) - t1.U.at(g)).norm() > tol.rep)
      throw error(errc::structure_mismatch, "build_path: physical representations differ");

  GaugeAlignment ga = gauge_align(t0, t1, opt.seed, tol);
  HamiltonianPath path;
  path.n = t0.n;
  path.k = t0.k;
  path.window = window;
  path.group = t0.group;
  path.U = t1.U;
  path.u = t1.u;

  // segment A: rotate triple 0 into the gauge of triple 1; h is constant
  path.gauge.W_gauge = ga.W;
  path.gauge.H_W = ga.H;
  LocalInteraction h_input0 = ground_projection(t0.kraus, window, tol.rank);
  const Eigen::Index n_gauge = std::max<Eigen::Index>(1, opt.gauge_samples);
  for (Eigen::Index j = 0; j <= n_gauge; ++j) {
    double s = static_cast<double>(j) / static_cast<double>(n_gauge);
    cmat ws = exp_i_hermitian(path.gauge.H_W, s);
    path.gauge.s.push_back(s);
    path.gauge.unitaries.push_back(ws);
    KrausFamily ks;
    for (const auto& v : t0.kraus.v) ks.v.push_back(ws * v * ws.adjoint());
    LocalInteraction hs = ground_projection(ks, window, tol.rank);
    if (j == 0) path.gauge.interaction = hs;
    path.gauge.max_delta = std::max(path.gauge.max_delta, (hs.h - h_input0.h).norm());
  }

  // the gauged triple carries the bond rep of triple 1 exactly
  const MpsTriple& t0g = ga.aligned;
  path.cert0 = t0g.certificate;
  path.cert1 = t1.certificate;

  BlockDecomposition d0 = block_decompose(t0g, opt.seed, tol);
  BlockDecomposition d1 = block_decompose(t1, opt.seed, tol);
  BlockRotation rot = block_rotation(d0, d1, tol);
  path.rotation_generator_norm = rot.assembled.norm();

  path.contour = primitive_contour(d0, rot, t0g.certificate.witness_words,
                                   t1.certificate.witness_words, n_samples,
                                   opt.eps_schedule, tol.rank);

  path.samples.resize(path.contour.samples.size());
  std::string failure;
  std::mutex failure_mutex;
  parallel_for(static_cast<int>(path.contour.samples.size()), opt.threads, [&](int i) {
    const ContourSample& cs = path.contour.samples[static_cast<std::size_t>(i)];
    PathSample ps;
    ps.t = cs.t;
    ps.contour_value = cs.value;
    KrausFamily raw = holomorphic_isometry(d0, rot, cs.value).second;
    PrimitivityCertificate cert = primitivity_certificate(raw, tol.rank);
    if (!cert.primitive)
      throw error(errc::path_validation_failure,
                  "sample t=" + std::to_string(cs.t) + " lost primitivity");
    PerronData pd = perron_data(raw, cert, tol);
    ps.kraus = normalize_kraus(raw, pd, tol);
    ps.perron = pd;
    ps.injectivity_length = cert.injectivity_length;
    ps.unitality = unitality_residual(ps.kraus);
    cmat vhat = isometry_from_kraus(ps.kraus);
    ps.intertwiner = intertwiner_residual(path.U, path.u, vhat);
    double comm = 0.0;
    for (int g = 0; g < path.group->order; ++g)
      comm = std::max(comm, (pd.e * path.u.at(g) - path.u.at(g) * pd.e).norm());
    ps.e_commutator = comm;
    if (ps.unitality > 1e-9 || ps.intertwiner > 1e-9) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      failure += " t=" + std::to_string(cs.t);
    }
    ps.interaction = ground_projection(ps.kraus, window, tol.rank);
    path.samples[static_cast<std::size_t>(i)] = std::move(ps);
  });
  if (!failure.empty())
    throw error(errc::path_validation_failure,
                "unitality or covariance residual above 1e-9 at samples:" + failure);

  // endpoint agreement
  const KrausFamily& k0 = t0g.kraus;
  double d_k0 = 0.0, d_k1 = 0.0;
  for (Eigen::Index mu = 0; mu < t0.n; ++mu) {
    d_k0 = std::max(d_k0, (path.samples.front().kraus.v[static_cast<std::size_t>(mu)] -
                           k0.v[static_cast<std::size_t>(mu)]).norm());
    d_k1 = std::max(d_k1, (path.samples.back().kraus.v[static_cast<std::size_t>(mu)] -
                           t1.kraus.v[static_cast<std::size_t>(mu)]).norm());
  }
  path.endpoint_delta_kraus0 = d_k0;
  path.endpoint_delta_kraus1 = d_k1;
  LocalInteraction h1 = ground_projection(t1.kraus, window, tol.rank);
  path.endpoint_delta_h0 = (path.samples.front().interaction.h - h_input0.h).norm();
  path.endpoint_delta_h1 = (path.samples.back().interaction.h - h1.h).norm();
  if (d_k0 > opt.endpoint_tol || d_k1 > opt.endpoint_tol ||
      path.endpoint_delta_h0 > opt.endpoint_tol || path.endpoint_delta_h1 > opt.endpoint_tol)
    throw error(errc::path_validation_failure,
                "endpoint mismatch: kraus(" + std::to_string(d_k0) + "," + std::to_string(d_k1) +
                    ") h(" + std::to_string(path.endpoint_delta_h0) + "," +
                    std::to_string(path.endpoint_delta_h1) + ")");
  return path;
}

// ---------------------------------------------------------------------------
// Verification of a built path at finite volume.

struct PathReportRow {
  std::string segment;  // "A" or "B"
  double t = 0.0;
  double min_gap = 0.0;
  bool gap_defined = false;
  double symmetry = 0.0;
  double intertwiner = 0.0;
  double delta_h = 0.0;  // ||h(t_i) - h(t_{i-1})|| within the segment
};

struct PathReport {
  std::vector<PathReportRow> rows;
  double min_gap = 0.0;
  double max_symmetry = 0.0;
  double max_intertwiner = 0.0;
  double max_first_difference = 0.0;
  double max_second_difference = 0.0;
  double continuity_constant = 0.0;  // M * max_first_difference
  bool pass = false;
  std::string failure_reason;
};

struct VerifyPathOptions {
  Eigen::Index q = 0;  // 0: ground_dim + 4
  double eps_deg = default_tol().deg;
  double gamma_min = 1e-2;
  double residual_max = 1e-8;
  double continuity_bound = 100.0;
  Eigen::Index dense_cutoff = 4096;
  Eigen::Index budget = Eigen::Index(1) << 22;
  int threads = 1;
  std::uint64_t seed = 0;
};

inline PathReport verify_path(const HamiltonianPath& path, Eigen::Index n_min, Eigen::Index n_max,
                              const VerifyPathOptions& opt = {}) {
  PathReport report;
  auto scan_gap = [&](const LocalInteraction& h) {
    GapScanOptions gopt;
    gopt.budget = opt.budget;
    gopt.dense_cutoff = opt.dense_cutoff;
    gopt.eps_deg = opt.eps_deg;
    gopt.threads = 1;
    gopt.seed = opt.seed;
    Eigen::Index q = opt.q > 0 ? opt.q : h.ground_dim + 4;
    GapReport gr = gap_scan(h, n_min, n_max, q, gopt);
    return std::make_pair(gr.gamma_estimate, gr.all_gaps_defined);
  };

  // segment A: h is constant; scan once and reuse
  auto [gap_a, def_a] = scan_gap(path.gauge.interaction);
  double sym_a = symmetry_residual(path.gauge.interaction, path.U);
  for (std::size_t j = 0; j < path.gauge.s.size(); ++j) {
    PathReportRow row;
    row.segment = "A";
    row.t = path.gauge.s[j];
    row.min_gap = gap_a;
    row.gap_defined = def_a;
    row.symmetry = sym_a;
    row.intertwiner = 0.0;
    row.delta_h = (j == 0) ? 0.0 : path.gauge.max_delta;
    report.rows.push_back(row);
  }

  // segment B: per-sample scans, parallel
  std::vector<PathReportRow> rows_b(path.samples.size());
  parallel_for(static_cast<int>(path.samples.size()), opt.threads, [&](int i) {
    const PathSample& ps = path.samples[static_cast<std::size_t>(i)];
    PathReportRow row;
    row.segment = "B";
    row.t = ps.t;
    auto [g, defined] = scan_gap(ps.interaction);
    row.min_gap = g;
    row.gap_defined = defined;
    row.symmetry = symmetry_residual(ps.interaction, path.U);
    row.intertwiner = ps.intertwiner;
    rows_b[static_cast<std::size_t>(i)] = row;
  });
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    if (i > 0)
      rows_b[i].delta_h =
          (path.samples[i].interaction.h - path.samples[i - 1].interaction.h).norm();
    report.rows.push_back(rows_b[i]);
  }

  // aggregate
  report.min_gap = std::numeric_limits<double>::infinity();
  bool all_defined = true;
  for (const auto& row : report.rows) {
    report.min_gap = std::min(report.min_gap, row.min_gap);
    all_defined = all_defined && row.gap_defined;
    report.max_symmetry = std::max(report.max_symmetry, row.symmetry);
    report.max_intertwiner = std::max(report.max_intertwiner, row.intertwiner);
    report.max_first_difference = std::max(report.max_first_difference, row.delta_h);
  }
  for (std::size_t i = 2; i < path.samples.size(); ++i) {
    double second = (path.samples[i].interaction.h - 2.0 * path.samples[i - 1].interaction.h +
                     path.samples[i - 2].interaction.h)
                        .norm();
    report.max_second_difference = std::max(report.max_second_difference, second);
  }
  double m_count = static_cast<double>(path.samples.size() > 1 ? path.samples.size() - 1 : 1);
  report.continuity_constant = m_count * report.max_first_difference;

  report.pass = true;
  if (!all_defined) {
    report.pass = false;
    report.failure_reason += "gap undefined at some sample; ";
  }
  if (report.min_gap < opt.gamma_min) {
    report.pass = false;
    report.failure_reason += "min gap below gamma_min; ";
  }
  if (report.max_symmetry > opt.residual_max || report.max_intertwiner > opt.residual_max) {
    report.pass = false;
    report.failure_reason += "residual above bound; ";
  }
  if (report.continuity_constant > opt.continuity_bound) {
    report.pass = false;
    report.failure_reason += "continuity constant above bound; ";
  }
  return report;
}

}  // namespace symham
