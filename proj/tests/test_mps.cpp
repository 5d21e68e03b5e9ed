#include <catch2/catch_amalgamated.hpp>

#include "symham/fixtures.hpp"
#include "symham/mps.hpp"

using namespace symham;
namespace fx = symham::fixtures;

namespace {

// Oracle: dimension of the span of ALL length-l word products, by full
// enumeration and an SVD rank count. Independent of the span-growth path.
Eigen::Index brute_span_dim(const KrausFamily& f, int l) {
  const Eigen::Index n = f.n(), k = f.k();
  Eigen::Index words = 1;
  for (int i = 0; i < l; ++i) words *= n;
  cmat cols(k * k, words);
  for (Eigen::Index w = 0; w < words; ++w) {
    std::vector<int> word(static_cast<std::size_t>(l));
    Eigen::Index rest = w;
    for (int pos = l - 1; pos >= 0; --pos) {
      word[static_cast<std::size_t>(pos)] = static_cast<int>(rest % n);
      rest /= n;
    }
    cols.col(w) = vec_rm(word_product(f, word));
  }
  return orthonormal_span_cols(cols).rank;
}

KrausFamily random_family(Rng& rng, Eigen::Index n, Eigen::Index k) {
  KrausFamily f;
  for (Eigen::Index mu = 0; mu < n; ++mu) f.v.push_back(rng.gaussian(k, k) / std::sqrt(2.0 * n));
  return f;
}

// Explicit antisymmetric pairing at k=2: <zeta, x1 (x) x2 (x) x3 (x) x4> with
// zeta the fully antisymmetrized vector over (C^4)^(x)4.
cx zeta_pairing_k2(const KrausFamily& f, const std::vector<std::vector<int>>& words) {
  std::vector<cvec> xs;
  for (const auto& w : words) xs.push_back(vec_rm(word_product(f, w)));
  int idx[4];
  cx acc(0, 0);
  for (idx[0] = 0; idx[0] < 4; ++idx[0])
    for (idx[1] = 0; idx[1] < 4; ++idx[1])
      for (idx[2] = 0; idx[2] < 4; ++idx[2])
        for (idx[3] = 0; idx[3] < 4; ++idx[3]) {
          bool distinct = true;
          int inversions = 0;
          for (int a = 0; a < 4 && distinct; ++a)
            for (int b = a + 1; b < 4; ++b) {
              if (idx[a] == idx[b]) {
                distinct = false;
                break;
              }
              if (idx[a] > idx[b]) ++inversions;
            }
          if (!distinct) continue;
          double sgn = (inversions % 2 == 0) ? 1.0 : -1.0;
          acc += sgn * xs[0](idx[0]) * xs[1](idx[1]) * xs[2](idx[2]) * xs[3](idx[3]);
        }
  return acc;
}

}  // namespace

TEST_CASE("kraus extraction and reassembly") {
  SECTION("single-column isometry") {
    cmat v(2, 1);
    v << 1.0, 0.0;
    auto f = kraus_from_isometry(v, 2, 1);
    REQUIRE(std::abs(f.v[0](0, 0) - cx(1, 0)) < 1e-15);
    REQUIRE(std::abs(f.v[1](0, 0)) < 1e-15);
  }
  SECTION("the spin-one Sz-basis family round-trips") {
    KrausFamily f;
    cmat sp(2, 2), sm(2, 2);
    sp << 0, 1, 0, 0;
    sm << 0, 0, 1, 0;
    f.v = {std::sqrt(2.0 / 3.0) * sp, -std::sqrt(1.0 / 3.0) * fx::pauli_z(),
           -std::sqrt(2.0 / 3.0) * sm};
    cmat v = isometry_from_kraus(f);
    REQUIRE(isometry_residual(v) < 1e-14);  // unital family, so V is an isometry
    auto back = kraus_from_isometry(v, 3, 2);
    for (int mu = 0; mu < 3; ++mu)
      REQUIRE((back.v[static_cast<std::size_t>(mu)] - f.v[static_cast<std::size_t>(mu)]).norm() <
              1e-15);
  }
  SECTION("gauge covariance of the extraction") {
    Rng rng(101);
    auto t = fx::aklt_triple();
    cmat w = rng.unitary(2);
    cmat vg = kron(cmat::Identity(3, 3), w) * t.V * w.adjoint();
    auto fg = kraus_from_isometry(vg, 3, 2);
    for (int mu = 0; mu < 3; ++mu) {
      cmat expected = w * t.kraus.v[static_cast<std::size_t>(mu)] * w.adjoint();
      REQUIRE((fg.v[static_cast<std::size_t>(mu)] - expected).norm() < 1e-13);
    }
  }
  SECTION("non-unital family does not give an isometry") {
    KrausFamily f;
    f.v = {fx::pauli_x(), fx::pauli_z()};  // sum v v* = 2
    REQUIRE(isometry_residual(isometry_from_kraus(f)) > 0.5);
  }
}

TEST_CASE("transfer channel") {
  auto aklt = fx::aklt_triple();
  SECTION("scalar case") {
    KrausFamily f;
    cmat one(1, 1), zero(1, 1);
    one << 2.0;
    zero << 0.5;
    f.v = {one, zero};
    cmat x(1, 1);
    x << 3.0;
    REQUIRE(std::abs(transfer_apply(f, x)(0, 0) - cx(3.0 * (4.0 + 0.25), 0)) < 1e-14);
    REQUIRE(std::abs(transfer_matrix(f)(0, 0) - cx(4.25, 0)) < 1e-14);
  }
  SECTION("zero maps to zero") {
    REQUIRE(transfer_apply(aklt.kraus, cmat::Zero(2, 2)).norm() == 0.0);
  }
  SECTION("AKLT channel is unital") {
    REQUIRE(unitality_residual(aklt.kraus) < 1e-14);
  }
  SECTION("matrix of the channel is consistent with direct application") {
    Rng rng(7);
    cmat x = rng.gaussian(2, 2);
    cvec lhs = transfer_matrix(aklt.kraus) * vec_rm(x);
    cvec rhs = vec_rm(transfer_apply(aklt.kraus, x));
    REQUIRE((lhs - rhs).norm() < 1e-13);
  }
  SECTION("AKLT leading eigenvalue is one") {
    auto p = leading_eigenpair(transfer_matrix(aklt.kraus));
    REQUIRE(std::abs(p.value - cx(1, 0)) < 1e-11);
  }
}

TEST_CASE("covariance residuals") {
  SECTION("trivial group gives zero") {
    auto t = fx::product_triple();
    REQUIRE(intertwiner_residual(t.U, t.u, t.V) < 1e-15);
  }
  SECTION("AKLT triple is covariant to machine precision") {
    auto t = fx::aklt_triple();
    REQUIRE(intertwiner_residual(t.U, t.u, t.V) <= 1e-12);
  }
  SECTION("perturbation shows up proportionally") {
    auto t = fx::aklt_triple();
    Rng rng(3);
    double delta = 1e-6;
    cmat vp = t.V + delta * rng.gaussian(6, 2);
    double res = intertwiner_residual(t.U, t.u, vp);
    REQUIRE(res > 1e-3 * delta);
    REQUIRE(res < 10 * delta);
  }
  SECTION("channel covariance: Ad u_g* after T after Ad u_g equals T") {
    auto t = fx::aklt_triple();
    Rng rng(5);
    cmat x = rng.gaussian(2, 2);
    for (int g = 0; g < 4; ++g) {
      const cmat& ug = t.u.at(g);
      cmat lhs = ug.adjoint() * transfer_apply(t.kraus, ug * x * ug.adjoint()) * ug;
      REQUIRE((lhs - transfer_apply(t.kraus, x)).norm() < default_tol().rep);
    }
  }
}

TEST_CASE("primitivity certification") {
  SECTION("scalar family") {
    KrausFamily f;
    cmat one(1, 1), zero(1, 1);
    one << 1.0;
    zero << 0.0;
    f.v = {one, zero};
    auto cert = primitivity_certificate(f);
    REQUIRE(cert.primitive);
    REQUIRE(cert.injectivity_length == 1);
  }
  SECTION("diagonal family is reducible") {
    auto f = kraus_from_isometry(fx::nonprimitive_isometry(), 2, 2);
    auto cert = primitivity_certificate(f);
    REQUIRE_FALSE(cert.primitive);
    REQUIRE(cert.final_span_dim == 2);
    REQUIRE(cert.injectivity_length == -1);
    // oracle: the full span at the Wielandt cutoff is still 2-dimensional
    REQUIRE(brute_span_dim(f, 6) == 2);
  }
  SECTION("upper and lower triangular pair is primitive quickly") {
    KrausFamily f;
    cmat a(2, 2), b(2, 2);
    a << 1, 1, 0, 1;
    b << 1, 0, 1, 1;
    f.v = {a / 2.0, b / 2.0};
    auto cert = primitivity_certificate(f);
    REQUIRE(cert.primitive);
    REQUIRE(cert.injectivity_length <= 3);
    // oracle: brute-force minimal full-span length agrees
    int minimal = -1;
    for (int l = 1; l <= 4 && minimal < 0; ++l)
      if (brute_span_dim(f, l) == 4) minimal = l;
    REQUIRE(minimal == cert.injectivity_length);
    REQUIRE(cert.witness_words.size() == 4);
    for (const auto& w : cert.witness_words)
      REQUIRE(static_cast<int>(w.size()) == cert.injectivity_length);
    REQUIRE(cert.witness_det_modulus > 0.0);
  }
  SECTION("single-pauli family oscillates without ever becoming primitive") {
    KrausFamily f;
    f.v = {fx::pauli_x()};
    auto cert = primitivity_certificate(f);
    REQUIRE_FALSE(cert.primitive);
  }
  SECTION("oracle agreement on random families") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::Index n = 2 + (trial % 2);
      auto f = random_family(rng, n, 2);
      auto cert = primitivity_certificate(f);
      bool brute_primitive = false;
      int brute_len = -1;
      for (int l = 1; l <= 6 && !brute_primitive; ++l)
        if (brute_span_dim(f, l) == 4) {
          brute_primitive = true;
          brute_len = l;
        }
      if (brute_primitive) {
        REQUIRE(cert.primitive);
        REQUIRE(cert.injectivity_length == brute_len);
      } else {
        // random families are primitive with very short injectivity length;
        // a disagreement would have to show past the oracle horizon
        REQUIRE((!cert.primitive || cert.injectivity_length > 6));
      }
    }
  }
  SECTION("once full, the span stays full") {
    Rng rng(77);
    auto f = random_family(rng, 2, 2);
    auto cert = primitivity_certificate(f);
    REQUIRE(cert.primitive);
    for (int l = cert.injectivity_length; l <= cert.injectivity_length + 2; ++l)
      REQUIRE(brute_span_dim(f, l) == 4);
  }
}

TEST_CASE("witness determinants") {
  SECTION("scalar words multiply") {
    KrausFamily f;
    cmat a(1, 1), b(1, 1);
    a << 1.0;
    b << 0.0;
    f.v = {a, b};
    REQUIRE(std::abs(witness_determinant(f, {{0}}) - cx(1, 0)) < 1e-15);
  }
  SECTION("repeated words vanish by antisymmetry") {
    Rng rng(4);
    auto f = random_family(rng, 2, 2);
    std::vector<std::vector<int>> words = {{0, 1}, {0, 1}, {1, 0}, {1, 1}};
    REQUIRE(std::abs(witness_determinant(f, words)) < 1e-14);
  }
  SECTION("matches the explicit antisymmetric pairing at k=2") {
    Rng rng(6);
    for (int trial = 0; trial < 5; ++trial) {
      auto f = random_family(rng, 2, 2);
      std::vector<std::vector<int>> words;
      for (int j = 0; j < 4; ++j) {
        std::vector<int> w;
        for (int p = 0; p < 3; ++p) w.push_back(static_cast<int>(rng.next_seed() % 2));
        words.push_back(w);
      }
      cx det = witness_determinant(f, words);
      cx pairing = zeta_pairing_k2(f, words);
      REQUIRE(std::abs(det - pairing) <= 1e-12 * std::max(1.0, std::abs(det)));
    }
  }
}

TEST_CASE("perron data") {
  SECTION("AKLT: unital channel has r = 1 and e = 1") {
    auto t = fx::aklt_triple();
    auto pd = perron_data(t.kraus, t.certificate);
    REQUIRE(std::abs(pd.r - 1.0) <= 1e-10);
    REQUIRE((pd.e - cmat::Identity(2, 2)).norm() <= 1e-9);
    REQUIRE(std::abs((pd.phi * pd.e).trace().real() - 1.0) < 1e-10);
  }
  SECTION("scalar family") {
    KrausFamily f;
    cmat a(1, 1), b(1, 1);
    a << cx(0.6, 0.3);
    b << cx(-0.2, 0.5);
    f.v = {a, b};
    auto cert = primitivity_certificate(f);
    auto pd = perron_data(f, cert);
    double expected = std::norm(a(0, 0)) + std::norm(b(0, 0));
    REQUIRE(pd.r == Catch::Approx(expected).epsilon(1e-10));
    REQUIRE(std::abs(pd.e(0, 0) - cx(1, 0)) < 1e-10);
    REQUIRE(std::abs((pd.phi * pd.e).trace() - cx(1, 0)) < 1e-10);
  }
  SECTION("scaling the family scales r and keeps e") {
    auto t = fx::aklt_triple();
    KrausFamily scaled;
    for (const auto& v : t.kraus.v) scaled.v.push_back(cx(0.0, 0.7) * v);
    auto cert = primitivity_certificate(scaled);
    auto pd = perron_data(scaled, cert);
    REQUIRE(pd.r == Catch::Approx(0.49).epsilon(1e-9));
    REQUIRE((pd.e - cmat::Identity(2, 2)).norm() <= 1e-9);
  }
  SECTION("fixed-point residuals meet the tolerance") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
      auto f = random_family(rng, 2, 2);
      auto cert = primitivity_certificate(f);
      if (!cert.primitive) continue;
      auto pd = perron_data(f, cert);
      REQUIRE((transfer_apply(f, pd.e) - pd.r * pd.e).norm() <= default_tol().pf * pd.r * pd.e.norm());
      REQUIRE((transfer_apply_adjoint(f, pd.phi) - pd.r * pd.phi).norm() <=
              default_tol().pf * pd.r * pd.phi.norm());
    }
  }
  SECTION("e commutes with the bond rep for symmetric triples") {
    auto t = fx::deformed_aklt_triple();
    auto pd = perron_data(t.kraus, t.certificate);
    for (int g = 0; g < 4; ++g)
      REQUIRE((pd.e * t.u.at(g) - t.u.at(g) * pd.e).norm() <= default_tol().rep);
  }
}

TEST_CASE("kraus normalization") {
  SECTION("already unital families are unchanged") {
    auto t = fx::aklt_triple();
    auto pd = perron_data(t.kraus, t.certificate);
    auto f = normalize_kraus(t.kraus, pd);
    for (int mu = 0; mu < 3; ++mu)
      REQUIRE((f.v[static_cast<std::size_t>(mu)] - t.kraus.v[static_cast<std::size_t>(mu)]).norm() <
              1e-9);
  }
  SECTION("scaled AKLT is recovered") {
    auto t = fx::aklt_triple();
    KrausFamily scaled;
    for (const auto& v : t.kraus.v) scaled.v.push_back(1.7 * v);
    auto cert = primitivity_certificate(scaled);
    auto f = normalize_kraus(scaled, perron_data(scaled, cert));
    for (int mu = 0; mu < 3; ++mu)
      REQUIRE((f.v[static_cast<std::size_t>(mu)] - t.kraus.v[static_cast<std::size_t>(mu)]).norm() <
              1e-9);
  }
  SECTION("random primitive families become unital") {
    Rng rng(55);
    int done = 0;
    for (int trial = 0; trial < 10 && done < 5; ++trial) {
      auto f = random_family(rng, 2, 2);
      auto cert = primitivity_certificate(f);
      if (!cert.primitive) continue;
      auto nf = normalize_kraus(f, perron_data(f, cert));
      REQUIRE(unitality_residual(nf) <= 1e-10);
      REQUIRE(primitivity_certificate(nf).primitive);
      ++done;
    }
    REQUIRE(done == 5);
  }
}

TEST_CASE("triple validation") {
  SECTION("AKLT validates with a short injectivity length") {
    auto t = fx::aklt_triple();
    REQUIRE(t.certificate.primitive);
    REQUIRE(t.certificate.injectivity_length == 2);
    REQUIRE(t.certificate.witness_words.size() == 4);
  }
  SECTION("product triple validates") {
    auto t = fx::product_triple();
    REQUIRE(t.certificate.primitive);
    REQUIRE(t.certificate.injectivity_length == 1);
  }
  SECTION("diagonal family is rejected as non-primitive") {
    auto g = fx::trivial_group();
    REQUIRE_THROWS_MATCHES(
        validate_sp_triple(g, fx::trivial_rep(g, 2), fx::trivial_rep(g, 2),
                           fx::nonprimitive_isometry()),
        error,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("NotPrimitive")));
  }
  SECTION("non-isometry is rejected") {
    auto g = fx::trivial_group();
    cmat v = fx::nonprimitive_isometry();
    v(0, 0) = 2.0;
    REQUIRE_THROWS_MATCHES(
        validate_sp_triple(g, fx::trivial_rep(g, 2), fx::trivial_rep(g, 2), v), error,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("NotIsometry")));
  }
  SECTION("covariance violation names a group element") {
    auto t = fx::aklt_triple();
    Rng rng(9);
    cmat v = t.V + 1e-3 * rng.gaussian(6, 2);
    Eigen::JacobiSVD<cmat> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
    v = svd.matrixU() * svd.matrixV().adjoint();  // keep it an isometry
    REQUIRE_THROWS_MATCHES(
        validate_sp_triple(t.group, t.U, t.u, v), error,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("Intertwiner")));
  }
  SECTION("oversized bond dimension is rejected up front") {
    auto g = fx::trivial_group();
    cmat v = cmat::Zero(2 * 9, 9);
    REQUIRE_THROWS_MATCHES(
        validate_sp_triple(g, fx::trivial_rep(g, 2), fx::trivial_rep(g, 9), v), error,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("Unsupported")));
  }
}
