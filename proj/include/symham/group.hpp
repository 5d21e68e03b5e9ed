// Finite groups carrying a unit-modulus 2-cocycle, validated exhaustively at
// load time. The cocycle is required normalized (c(e,g) = c(g,e) = 1);
// non-normalized tables are rejected rather than silently renormalized.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "symham/linalg.hpp"

namespace symham {

struct TwistedGroup {
  int order = 0;
  std::vector<std::vector<int>> mult;  // mult[g][h] = index of g*h
  int identity = 0;
  std::vector<int> inverse;
  cmat cocycle;  // order x order, unit modulus, normalized

  int op(int g, int h) const { return mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)]; }
  cx c(int g, int h) const { return cocycle(g, h); }

  bool cocycle_is_trivial(double tol = 1e-12) const {
    for (int g = 0; g < order; ++g)
      for (int h = 0; h < order; ++h)
        if (std::abs(cocycle(g, h) - cx(1, 0)) > tol) return false;
    return true;
  }
};

using GroupPtr = std::shared_ptr<const TwistedGroup>;

inline bool same_group(const TwistedGroup& a, const TwistedGroup& b, double tol = 1e-9) {
  if (a.order != b.order || a.mult != b.mult) return false;
  return (a.cocycle - b.cocycle).norm() <= tol * a.order;
}

inline cmat trivial_cocycle(int order) { return cmat::Ones(order, order); }

inline GroupPtr validate_group_and_cocycle(const std::vector<std::vector<int>>& mult,
                                           const cmat& cocycle, double tol = 1e-9) {
  const int n = static_cast<int>(mult.size());
  if (n == 0) throw error(errc::not_a_group, "empty multiplication table");
  for (const auto& row : mult) {
    if (static_cast<int>(row.size()) != n)
      throw error(errc::not_a_group, "multiplication table is not square");
    for (int v : row)
      if (v < 0 || v >= n) throw error(errc::not_a_group, "table entry out of range");
  }
  if (cocycle.rows() != n || cocycle.cols() != n)
    throw error(errc::not_a_cocycle, "cocycle table shape mismatch");

  // identity
  int e = -1;
  for (int cand = 0; cand < n; ++cand) {
    bool ok = true;
    for (int g = 0; g < n && ok; ++g)
      ok = (mult[static_cast<std::size_t>(cand)][static_cast<std::size_t>(g)] == g) &&
           (mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(cand)] == g);
    if (ok) {
      e = cand;
      break;
    }
  }
  if (e < 0) throw error(errc::not_a_group, "no identity element");

  // inverses
  std::vector<int> inv(static_cast<std::size_t>(n), -1);
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      if (mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)] == e &&
          mult[static_cast<std::size_t>(h)][static_cast<std::size_t>(g)] == e) {
        inv[static_cast<std::size_t>(g)] = h;
        break;
      }
    }
    if (inv[static_cast<std::size_t>(g)] < 0)
      throw error(errc::not_a_group, "element " + std::to_string(g) + " has no inverse");
  }

  // associativity, exhaustively
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h)
      for (int l = 0; l < n; ++l) {
        int gh = mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)];
        int hl = mult[static_cast<std::size_t>(h)][static_cast<std::size_t>(l)];
        if (mult[static_cast<std::size_t>(gh)][static_cast<std::size_t>(l)] !=
            mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(hl)])
          throw error(errc::not_a_group, "associativity fails at (" + std::to_string(g) + "," +
                                             std::to_string(h) + "," + std::to_string(l) + ")");
      }

  // cocycle: unit modulus, normalized, 2-cocycle identity
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h)
      if (std::abs(std::abs(cocycle(g, h)) - 1.0) > tol)
        throw error(errc::not_a_cocycle, "cocycle value at (" + std::to_string(g) + "," +
                                             std::to_string(h) + ") is not unit modulus");
  for (int g = 0; g < n; ++g)
    if (std::abs(cocycle(e, g) - cx(1, 0)) > tol || std::abs(cocycle(g, e) - cx(1, 0)) > tol)
      throw error(errc::not_normalized,
                  "cocycle not normalized at identity with g=" + std::to_string(g));
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h)
      for (int l = 0; l < n; ++l) {
        int gh = mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)];
        int hl = mult[static_cast<std::size_t>(h)][static_cast<std::size_t>(l)];
        cx lhs = cocycle(g, h) * cocycle(gh, l);
        cx rhs = cocycle(h, l) * cocycle(g, hl);
        if (std::abs(lhs - rhs) > tol)
          throw error(errc::not_a_cocycle, "cocycle identity fails at (" + std::to_string(g) +
                                               "," + std::to_string(h) + "," + std::to_string(l) +
                                               ")");
      }

  auto out = std::make_shared<TwistedGroup>();
  out->order = n;
  out->mult = mult;
  out->identity = e;
  out->inverse = inv;
  out->cocycle = cocycle;
  return out;
}

}  // namespace symham
