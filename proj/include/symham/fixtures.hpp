// Bundled fixture corpus: the standard groups, representations and triples
// used by the demo command, the test suite and the acceptance runner.
#pragma once

#include <utility>
#include <vector>

#include "symham/group.hpp"
#include "symham/mps.hpp"
#include "symham/rep.hpp"

namespace symham::fixtures {

// Klein four-group; elements indexed (a1,a2) -> 2*a1 + a2. The twisted
// variant carries the cocycle c((a1,a2),(b1,b2)) = (-1)^(a2*b1), whose class
// generates H^2(Z2xZ2, T).
inline GroupPtr z2z2(bool twisted) {
  std::vector<std::vector<int>> mult(4, std::vector<int>(4, 0));
  for (int g = 0; g < 4; ++g)
    for (int h = 0; h < 4; ++h) mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)] = g ^ h;
  cmat c = trivial_cocycle(4);
  if (twisted) {
    for (int g = 0; g < 4; ++g)
      for (int h = 0; h < 4; ++h) {
        int a2 = g & 1, b1 = (h >> 1) & 1;
        c(g, h) = ((a2 * b1) % 2 == 1) ? cx(-1, 0) : cx(1, 0);
      }
  }
  return validate_group_and_cocycle(mult, c);
}

inline GroupPtr cyclic(int order) {
  std::vector<std::vector<int>> mult(static_cast<std::size_t>(order),
                                     std::vector<int>(static_cast<std::size_t>(order), 0));
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h)
      mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)] = (g + h) % order;
  return validate_group_and_cocycle(mult, trivial_cocycle(order));
}

inline GroupPtr trivial_group() { return cyclic(1); }

// S3 as permutations of {0,1,2}; element = permutation index in the fixed
// listing e, (01), (02), (12), (012), (021).
inline GroupPtr s3() {
  const int perms[6][3] = {{0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};
  auto compose = [&](int a, int b) {  // (a o b)(x) = a(b(x))
    int out[3];
    for (int x = 0; x < 3; ++x) out[x] = perms[a][perms[b][x]];
    for (int i = 0; i < 6; ++i)
      if (perms[i][0] == out[0] && perms[i][1] == out[1] && perms[i][2] == out[2]) return i;
    return -1;
  };
  std::vector<std::vector<int>> mult(6, std::vector<int>(6, 0));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) mult[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = compose(a, b);
  return validate_group_and_cocycle(mult, trivial_cocycle(6));
}

inline cmat pauli_x() {
  cmat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline cmat pauli_y() {
  cmat m(2, 2);
  m << cx(0, 0), cx(0, -1), cx(0, 1), cx(0, 0);
  return m;
}
inline cmat pauli_z() {
  cmat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// (a1,a2) -> sx^a1 sz^a2 over the twisted Klein group; the unique 2-dim
// irreducible class for the nontrivial cocycle.
inline ProjectiveRep pauli_rep(const GroupPtr& g) {
  std::vector<cmat> mats = {cmat::Identity(2, 2), pauli_z(), pauli_x(), pauli_x() * pauli_z()};
  return validate_rep(mats, g, g->cocycle);
}

// Spin-1 pi-rotations in the real (Cartesian) basis: diagonal sign matrices,
// honest linear representation of the Klein group.
inline ProjectiveRep spin1_rotation_rep(const GroupPtr& g) {
  auto d3 = [](double a, double b, double c) {
    cmat m = cmat::Zero(3, 3);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
  };
  std::vector<cmat> mats = {d3(1, 1, 1), d3(-1, -1, 1), d3(1, -1, -1), d3(-1, 1, -1)};
  return validate_rep(mats, g, trivial_cocycle(4));
}

inline ProjectiveRep trivial_rep(const GroupPtr& g, Eigen::Index dim) {
  std::vector<cmat> mats(static_cast<std::size_t>(g->order), cmat::Identity(dim, dim));
  return validate_rep(mats, g, trivial_cocycle(g->order));
}

// 2-dim irrep of S3: the permutation action restricted to the sum-zero plane.
inline ProjectiveRep s3_standard_rep(const GroupPtr& g) {
  const int perms[6][3] = {{0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};
  cmat basis(3, 2);
  basis << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0),
          -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0),
           0.0, -2.0 / std::sqrt(6.0);
  std::vector<cmat> mats;
  for (int e = 0; e < 6; ++e) {
    cmat p = cmat::Zero(3, 3);
    for (int j = 0; j < 3; ++j) p(perms[e][j], j) = 1.0;
    mats.push_back(basis.adjoint() * p * basis);
  }
  return validate_rep(mats, g, trivial_cocycle(6));
}

// Sign rep of S3.
inline ProjectiveRep s3_sign_rep(const GroupPtr& g) {
  std::vector<cmat> mats;
  const double signs[6] = {1, -1, -1, -1, 1, 1};
  for (int e = 0; e < 6; ++e) {
    cmat m(1, 1);
    m(0, 0) = signs[e];
    mats.push_back(m);
  }
  return validate_rep(mats, g, trivial_cocycle(6));
}

inline ProjectiveRep z4_phase_rep(const GroupPtr& g, int weight) {
  std::vector<cmat> mats;
  for (int j = 0; j < 4; ++j) {
    cmat m(1, 1);
    double ang = 2.0 * 3.14159265358979323846 * weight * j / 4.0;
    m(0, 0) = cx(std::cos(ang), std::sin(ang));
    mats.push_back(m);
  }
  return validate_rep(mats, g, trivial_cocycle(4));
}

// ---------------------------------------------------------------------------
// Triples.

// Spin-1 chain with Kraus family (cx sx, cy sy, cz sz): symmetric under the
// diagonal pi-rotation action for every coefficient choice, an isometry iff
// the coefficients are unit-normalized, and primitive iff at least two
// coefficients are nonzero. The isotropic point is the AKLT chain.
inline MpsTriple anisotropic_heisenberg_triple(cx cx_, cx cy_, cx cz_) {
  GroupPtr g = z2z2(true);
  ProjectiveRep u = pauli_rep(g);
  ProjectiveRep U = spin1_rotation_rep(g);
  KrausFamily f;
  f.v = {cx_ * pauli_x(), cy_ * pauli_y(), cz_ * pauli_z()};
  return validate_sp_triple(g, U, u, isometry_from_kraus(f));
}

inline MpsTriple aklt_triple() {
  const double c = -1.0 / std::sqrt(3.0);
  return anisotropic_heisenberg_triple(c, c, c);
}

// A fixed 3x3 unitary rotation applied to the AKLT coefficient vector; stays
// symmetric with the same bond rep but has a genuinely different isometry
// block, which is what the interpolation pipeline has to bridge.
inline cmat deformation_rotation() {
  cmat kgen(3, 3);
  kgen << cx(0.30, 0.00), cx(0.50, 0.20), cx(0.10, -0.30),
          cx(0.50, -0.20), cx(-0.20, 0.00), cx(0.70, 0.10),
          cx(0.10, 0.30), cx(0.70, -0.10), cx(0.40, 0.00);
  return exp_i_hermitian(kgen, 0.6);
}

inline MpsTriple deformed_aklt_triple() {
  const double c = -1.0 / std::sqrt(3.0);
  Eigen::Vector3cd coeff(c, c, c);
  Eigen::Vector3cd rotated = deformation_rotation() * coeff;
  return anisotropic_heisenberg_triple(rotated(0), rotated(1), rotated(2));
}

// Product state: bond dimension 1 over the trivial group.
inline MpsTriple product_triple() {
  GroupPtr g = trivial_group();
  cmat v(2, 1);
  v << std::sqrt(0.5), std::sqrt(0.5);
  return validate_sp_triple(g, trivial_rep(g, 2), trivial_rep(g, 1), v);
}

// Diagonal Kraus family: a perfectly valid isometry whose transfer channel is
// reducible, so triple validation must reject it.
inline cmat nonprimitive_isometry() {
  cmat v = cmat::Zero(4, 2);
  v(0, 0) = 1.0;  // v1 = diag(1,0)
  v(3, 1) = 1.0;  // v2 = diag(0,1)
  return v;
}

// A pair connected purely by a gauge move: t1 = (k, AdW(u), (1 (x) W) V W*).
inline std::pair<MpsTriple, MpsTriple> gauge_pair() {
  MpsTriple t0 = aklt_triple();
  cmat h(2, 2);
  h << 0.4, cx(0.3, 0.25), cx(0.3, -0.25), -0.2;
  cmat w = exp_i_hermitian(h);
  std::vector<cmat> mats;
  for (const auto& m : t0.u.mats) mats.push_back(w * m * w.adjoint());
  ProjectiveRep u1 = validate_rep(mats, t0.group, t0.group->cocycle);
  cmat v1 = kron(cmat::Identity(3, 3), w) * t0.V * w.adjoint();
  MpsTriple t1 = validate_sp_triple(t0.group, t0.U, u1, v1);
  return {std::move(t0), std::move(t1)};
}

}  // namespace symham::fixtures
