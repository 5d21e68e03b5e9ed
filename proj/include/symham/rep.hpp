// Projective unitary representations of a finite group with a 2-cocycle:
// validation, characters, commutants, irreducible decomposition by Schur
// splitting, and unitary-equivalence testing by group averaging.
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "symham/group.hpp"
#include "symham/linalg.hpp"

namespace symham {

struct ProjectiveRep {
  GroupPtr group;
  cmat cocycle;             // the cocycle this rep satisfies (may be trivial)
  std::vector<cmat> mats;   // one unitary per group element
  Eigen::Index dim = 0;

  const cmat& at(int g) const { return mats[static_cast<std::size_t>(g)]; }
};

inline cvec character(const ProjectiveRep& u) {
  cvec chi(u.group->order);
  for (int g = 0; g < u.group->order; ++g) chi(g) = u.at(g).trace();
  return chi;
}

inline double rep_residual(const ProjectiveRep& u) {
  double worst = 0.0;
  const int n = u.group->order;
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) {
      cmat lhs = u.at(g) * u.at(h);
      cmat rhs = u.cocycle(g, h) * u.at(u.group->op(g, h));
      worst = std::max(worst, (lhs - rhs).norm());
    }
  return worst;
}

inline ProjectiveRep validate_rep(const std::vector<cmat>& mats, GroupPtr group,
                                  const cmat& cocycle,
                                  const Tolerances& tol = default_tol()) {
  if (static_cast<int>(mats.size()) != group->order)
    throw error(errc::shape_mismatch, "validate_rep: one matrix per group element required");
  Eigen::Index d = mats.front().rows();
  for (int g = 0; g < group->order; ++g) {
    const cmat& m = mats[static_cast<std::size_t>(g)];
    if (m.rows() != d || m.cols() != d)
      throw error(errc::shape_mismatch, "validate_rep: matrices must share a square dimension");
    if ((m.adjoint() * m - cmat::Identity(d, d)).norm() > tol.unitary * std::max(1.0, m.norm()))
      throw error(errc::not_unitary, "validate_rep: element " + std::to_string(g) + " is not unitary");
  }
  if ((mats[static_cast<std::size_t>(group->identity)] - cmat::Identity(d, d)).norm() > tol.rep)
    throw error(errc::not_unitary, "validate_rep: identity element does not map to 1");
  ProjectiveRep rep{group, cocycle, mats, d};
  for (int g = 0; g < group->order; ++g)
    for (int h = 0; h < group->order; ++h) {
      cmat lhs = rep.at(g) * rep.at(h);
      cmat rhs = cocycle(g, h) * rep.at(group->op(g, h));
      if ((lhs - rhs).norm() > tol.rep)
        throw error(errc::cocycle_mismatch, "validate_rep: product identity fails at (" +
                                                std::to_string(g) + "," + std::to_string(h) + ")");
    }
  return rep;
}

inline ProjectiveRep tensor_rep(const ProjectiveRep& a, const ProjectiveRep& b,
                                const Tolerances& tol = default_tol()) {
  if (!same_group(*a.group, *b.group))
    throw error(errc::group_mismatch, "tensor_rep: representations live over different groups");
  std::vector<cmat> mats;
  mats.reserve(a.mats.size());
  for (int g = 0; g < a.group->order; ++g) mats.push_back(kron(a.at(g), b.at(g)));
  cmat cocycle = a.cocycle.cwiseProduct(b.cocycle);
  return validate_rep(mats, b.group, cocycle, tol);
}

// Basis of {X : X u_g = u_g X for all g}, via the joint nullspace.
inline std::vector<cmat> commutant_basis(const ProjectiveRep& u,
                                         double tol_rank = default_tol().rank) {
  const Eigen::Index k = u.dim;
  const int n = u.group->order;
  cmat sys(n * k * k, k * k);
  cmat id = cmat::Identity(k, k);
  for (int g = 0; g < n; ++g)
    sys.middleRows(g * k * k, k * k) = kron(id, u.at(g).transpose()) - kron(u.at(g), id);
  Eigen::JacobiSVD<cmat> svd(sys, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol_rank * std::max(smax, 1e-300)) ++rank;
  if (smax == 0.0) rank = 0;
  std::vector<cmat> basis;
  for (Eigen::Index j = rank; j < k * k; ++j)
    basis.push_back(unvec_rm(svd.matrixV().col(j), k, k));
  return basis;
}

namespace detail {

// Restriction of a rep to an invariant subspace given by an isometry.
inline std::vector<cmat> restrict_mats(const ProjectiveRep& u, const cmat& embed) {
  std::vector<cmat> out;
  out.reserve(u.mats.size());
  for (const auto& m : u.mats) out.push_back(embed.adjoint() * m * embed);
  return out;
}

inline ProjectiveRep make_sub_rep(const ProjectiveRep& u, const cmat& embed) {
  ProjectiveRep sub;
  sub.group = u.group;
  sub.cocycle = u.cocycle;
  sub.mats = restrict_mats(u, embed);
  sub.dim = embed.cols();
  return sub;
}

// Averaging intertwiner search without the character-based contract of the
// public operation; returns nothing if every random average is singular.
inline std::optional<cmat> try_intertwiner(const ProjectiveRep& u0, const ProjectiveRep& u1,
                                           Rng& rng, int retries = 8,
                                           double tol_rank = default_tol().rank) {
  const Eigen::Index k = u0.dim;
  const int n = u0.group->order;
  for (int attempt = 0; attempt < retries; ++attempt) {
    cmat x = rng.gaussian(k, k);
    cmat avg = cmat::Zero(k, k);
    for (int g = 0; g < n; ++g) avg += u1.at(g) * x * u0.at(g).adjoint();
    avg /= static_cast<double>(n);
    Eigen::JacobiSVD<cmat> svd(avg);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > tol_rank * std::max(sv(0), 1e-300) && sv(0) > 1e-14)
      return polar_unitary(avg, tol_rank);
  }
  return std::nullopt;
}

// Recursively split into irreducible invariant subspaces; leaves are
// orthogonal isometries whose restrictions have one-dimensional commutant.
inline void schur_split(const ProjectiveRep& u, const cmat& embed, Rng& rng,
                        std::vector<cmat>& leaves, int depth = 0) {
  if (depth > 64) throw error(errc::split_failure, "schur split recursion exceeded");
  ProjectiveRep sub = make_sub_rep(u, embed);
  auto comm = commutant_basis(sub);
  if (comm.size() <= 1) {
    leaves.push_back(embed);
    return;
  }
  const Eigen::Index d = sub.dim;
  for (int attempt = 0; attempt < 8; ++attempt) {
    cmat r = cmat::Zero(d, d);
    for (const auto& b : comm) r += rng.cnormal() * b;
    r = (r + r.adjoint()) / 2.0;
    if (r.norm() < 1e-10) continue;
    Eigen::SelfAdjointEigenSolver<cmat> es(r);
    const rvec& ev = es.eigenvalues();
    double spread = std::max(ev(d - 1) - ev(0), 1e-300);
    // cluster eigenvalues; each cluster spans an invariant subspace
    std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= d; ++i) {
      if (i == d || ev(i) - ev(i - 1) > 1e-6 * spread) {
        clusters.emplace_back(start, i - start);
        start = i;
      }
    }
    if (clusters.size() < 2) continue;
    for (const auto& [from, len] : clusters)
      schur_split(u, embed * es.eigenvectors().middleCols(from, len), rng, leaves, depth + 1);
    return;
  }
  throw error(errc::split_failure,
              "random commutant elements failed to split a reducible representation");
}

// Character comparison with a tolerance grid, for canonical ordering.
inline bool char_less(const cvec& a, const cvec& b, double tol = 1e-8) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::abs(a(i).real() - b(i).real()) > tol) return a(i).real() < b(i).real();
    if (std::abs(a(i).imag() - b(i).imag()) > tol) return a(i).imag() < b(i).imag();
  }
  return false;
}

}  // namespace detail

struct IrrepBlock {
  int label = 0;            // index into representatives
  Eigen::Index dim = 0;     // irrep dimension
  Eigen::Index mult = 0;    // multiplicity
};

struct IrrepDecomposition {
  cmat change_of_basis;     // W with W u_g W* = blkdiag(pi_a(g) (x) 1_mult)
  std::vector<IrrepBlock> blocks;
  std::vector<ProjectiveRep> representatives;

  // The block-diagonal model at group element g.
  cmat model(int g) const {
    Eigen::Index total = 0;
    for (const auto& b : blocks) total += b.dim * b.mult;
    cmat out = cmat::Zero(total, total);
    Eigen::Index off = 0;
    for (const auto& b : blocks) {
      cmat blk = kron(representatives[static_cast<std::size_t>(b.label)].at(g),
                      cmat::Identity(b.mult, b.mult));
      out.block(off, off, blk.rows(), blk.cols()) = blk;
      off += blk.rows();
    }
    return out;
  }

  double reassembly_residual(const ProjectiveRep& u) const {
    double worst = 0.0;
    for (int g = 0; g < u.group->order; ++g)
      worst = std::max(worst,
                       (change_of_basis * u.at(g) * change_of_basis.adjoint() - model(g)).norm());
    return worst;
  }
};

inline IrrepDecomposition irreducible_decomposition(const ProjectiveRep& u,
                                                    std::uint64_t seed = 0,
                                                    const Tolerances& tol = default_tol()) {
  Rng rng(seed ^ 0xa2u);
  std::vector<cmat> leaves;
  detail::schur_split(u, cmat::Identity(u.dim, u.dim), rng, leaves);

  struct Class {
    ProjectiveRep rep;
    cvec chi;
    std::vector<cmat> copies;  // per copy: embed * intertwiner^dagger, a (k x d) isometry
  };
  std::vector<Class> classes;
  for (const auto& q : leaves) {
    ProjectiveRep sub = detail::make_sub_rep(u, q);
    cvec chi = character(sub);
    bool placed = false;
    for (auto& cl : classes) {
      if (cl.rep.dim != sub.dim) continue;
      if ((cl.chi - chi).cwiseAbs().maxCoeff() > 1e-6) continue;
      auto s = detail::try_intertwiner(sub, cl.rep, rng);
      if (s) {  // pi(g) = s u_sub(g) s*
        cl.copies.push_back(q * s->adjoint());
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back(Class{sub, chi, {q}});
  }

  std::sort(classes.begin(), classes.end(), [](const Class& a, const Class& b) {
    if (a.rep.dim != b.rep.dim) return a.rep.dim < b.rep.dim;
    return detail::char_less(a.chi, b.chi);
  });

  IrrepDecomposition out;
  cmat w(u.dim, u.dim);
  Eigen::Index row = 0;
  for (std::size_t a = 0; a < classes.size(); ++a) {
    const Class& cl = classes[a];
    IrrepBlock blk;
    blk.label = static_cast<int>(a);
    blk.dim = cl.rep.dim;
    blk.mult = static_cast<Eigen::Index>(cl.copies.size());
    out.blocks.push_back(blk);
    out.representatives.push_back(cl.rep);
    for (Eigen::Index i = 0; i < blk.dim; ++i)
      for (const auto& copy : cl.copies) w.row(row++) = copy.col(i).adjoint();
  }
  out.change_of_basis = w;

  double resid = out.reassembly_residual(u);
  if (resid > 10 * tol.rep)
    throw error(errc::split_failure,
                "irreducible decomposition reassembly residual too large: " + std::to_string(resid));
  return out;
}

inline std::optional<cmat> find_unitary_intertwiner(const ProjectiveRep& u0,
                                                    const ProjectiveRep& u1,
                                                    std::uint64_t seed = 0,
                                                    const Tolerances& tol = default_tol()) {
  if (!same_group(*u0.group, *u1.group))
    throw error(errc::group_mismatch, "find_unitary_intertwiner: different groups");
  if ((u0.cocycle - u1.cocycle).norm() > tol.rep * u0.group->order)
    throw error(errc::cocycle_mismatch, "find_unitary_intertwiner: different cocycles");
  if (u0.dim != u1.dim)
    throw error(errc::dimension_mismatch, "find_unitary_intertwiner: different dimensions");
  cvec chi0 = character(u0), chi1 = character(u1);
  bool chars_equal = (chi0 - chi1).cwiseAbs().maxCoeff() <= 1e-8;
  if (!chars_equal) return std::nullopt;  // characters are a complete invariant here
  Rng rng(seed ^ 0x17u);
  auto w = detail::try_intertwiner(u0, u1, rng, 8, tol.rank);
  if (w) return w;
  throw error(errc::convergence_failure,
              "intertwiner search inconclusive: characters agree but all averages were singular");
}

// Replace representatives of `dec` by the equivalent reference irreps, rotating
// the change of basis so the model blocks use the reference matrices exactly.
inline void align_representatives(IrrepDecomposition& dec,
                                  const std::vector<ProjectiveRep>& reference,
                                  std::uint64_t seed = 0) {
  Rng rng(seed ^ 0x31u);
  Eigen::Index off = 0;
  for (auto& blk : dec.blocks) {
    ProjectiveRep& rep = dec.representatives[static_cast<std::size_t>(blk.label)];
    for (const auto& ref : reference) {
      if (ref.dim != rep.dim) continue;
      if ((character(ref) - character(rep)).cwiseAbs().maxCoeff() > 1e-6) continue;
      auto t = detail::try_intertwiner(rep, ref, rng);  // ref = t rep t*
      if (!t) continue;
      dec.change_of_basis.middleRows(off, blk.dim * blk.mult) =
          kron(*t, cmat::Identity(blk.mult, blk.mult)) *
          dec.change_of_basis.middleRows(off, blk.dim * blk.mult);
      rep = ref;
      break;
    }
    off += blk.dim * blk.mult;
  }
}

}  // namespace symham
