#include <catch2/catch_amalgamated.hpp>

#include "symham/linalg.hpp"

using namespace symham;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("hermitian_eigensystem closed forms") {
  SECTION("identity") {
    auto es = hermitian_eigensystem(cmat::Identity(2, 2));
    REQUIRE(es.eigenvalues(0) == Catch::Approx(1.0));
    REQUIRE(es.eigenvalues(1) == Catch::Approx(1.0));
    REQUIRE((es.eigenvectors.adjoint() * es.eigenvectors - cmat::Identity(2, 2)).norm() < 1e-12);
  }
  SECTION("diagonal, ascending order") {
    cmat a(2, 2);
    a << 3.0, 0.0, 0.0, -1.0;
    auto es = hermitian_eigensystem(a);
    REQUIRE(es.eigenvalues(0) == Catch::Approx(-1.0));
    REQUIRE(es.eigenvalues(1) == Catch::Approx(3.0));
  }
  SECTION("pauli x: 2x2 closed form") {
    cmat sx(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    auto es = hermitian_eigensystem(sx);
    REQUIRE(es.eigenvalues(0) == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(es.eigenvalues(1) == Catch::Approx(1.0).margin(1e-12));
    const double r = 1.0 / std::sqrt(2.0);
    // phase fixing makes the first nonzero component positive real
    REQUIRE(std::abs(es.eigenvectors(0, 0) - cx(r, 0)) < 1e-12);
    REQUIRE(std::abs(es.eigenvectors(1, 0) - cx(-r, 0)) < 1e-12);
    REQUIRE(std::abs(es.eigenvectors(0, 1) - cx(r, 0)) < 1e-12);
    REQUIRE(std::abs(es.eigenvectors(1, 1) - cx(r, 0)) < 1e-12);
  }
  SECTION("non-hermitian input rejected") {
    cmat a(2, 2);
    a << 0.0, 1.0, 0.0, 0.0;
    REQUIRE_THROWS_AS(hermitian_eigensystem(a), error);
  }
}

TEST_CASE("hermitian_eigensystem reconstruction invariant") {
  Rng rng(42);
  for (Eigen::Index dim : {2, 5, 16, 64}) {
    cmat a = rng.hermitian(dim);
    auto es = hermitian_eigensystem(a);
    cmat back = es.eigenvectors *
                es.eigenvalues.asDiagonal().toDenseMatrix().cast<cx>() *
                es.eigenvectors.adjoint();
    REQUIRE((a - back).norm() <= 10 * default_tol().eig * a.norm());
    REQUIRE((es.eigenvectors.adjoint() * es.eigenvectors - cmat::Identity(dim, dim)).norm() <
            default_tol().unitary * dim);
  }
}

TEST_CASE("orthonormal_span ranks") {
  SECTION("collinear pair") {
    cvec a(2), b(2);
    a << 1.0, 0.0;
    b << 2.0, 0.0;
    auto sb = orthonormal_span({a, b});
    REQUIRE(sb.rank == 1);
  }
  SECTION("standard basis") {
    cvec a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    auto sb = orthonormal_span({a, b});
    REQUIRE(sb.rank == 2);
  }
  SECTION("four random vectors in dimension three have generic rank three") {
    Rng rng(7);
    std::vector<cvec> vs;
    for (int i = 0; i < 4; ++i) vs.push_back(rng.gaussian_vec(3));
    // oracle: a nonzero 3x3 Gram minor certifies rank >= 3
    cmat cols(3, 4);
    for (int i = 0; i < 4; ++i) cols.col(i) = vs[static_cast<std::size_t>(i)];
    cmat gram = (cols.leftCols(3)).adjoint() * cols.leftCols(3);
    REQUIRE(std::abs(gram.determinant()) > 1e-9);
    auto sb = orthonormal_span(vs);
    REQUIRE(sb.rank == 3);
  }
  SECTION("empty list gives rank zero") {
    auto sb = orthonormal_span(std::vector<cvec>{});
    REQUIRE(sb.rank == 0);
  }
  SECTION("idempotence") {
    Rng rng(3);
    std::vector<cvec> vs;
    for (int i = 0; i < 5; ++i) vs.push_back(rng.gaussian_vec(4));
    auto sb = orthonormal_span(vs);
    std::vector<cvec> again;
    for (Eigen::Index j = 0; j < sb.basis.cols(); ++j) again.push_back(sb.basis.col(j));
    REQUIRE(orthonormal_span(again).rank == sb.rank);
  }
}

TEST_CASE("polar_unitary") {
  SECTION("positive multiple of identity") {
    cmat u = polar_unitary(2.0 * cmat::Identity(3, 3));
    REQUIRE((u - cmat::Identity(3, 3)).norm() < 1e-12);
  }
  SECTION("unitary input is returned") {
    Rng rng(11);
    cmat w = rng.unitary(4);
    REQUIRE((polar_unitary(w) - w).norm() < 1e-10);
  }
  SECTION("diagonal closed form") {
    cmat a = cmat::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = cx(1.0, 1.0);
    cmat u = polar_unitary(a);
    REQUIRE(std::abs(u(0, 0) - cx(1, 0)) < 1e-12);
    REQUIRE(std::abs(u(1, 1) - cx(1.0, 1.0) / std::sqrt(2.0)) < 1e-12);
  }
  SECTION("singular input rejected") {
    cmat a = cmat::Zero(2, 2);
    a(0, 0) = 1.0;
    REQUIRE_THROWS_AS(polar_unitary(a), error);
  }
}

TEST_CASE("principal_log_unitary") {
  SECTION("identity maps to zero") {
    REQUIRE(principal_log_unitary(cmat::Identity(3, 3)).norm() < 1e-12);
  }
  SECTION("scalar phases") {
    cmat s = cmat::Zero(2, 2);
    s(0, 0) = cx(0, 1);
    s(1, 1) = cx(0, -1);
    cmat h = principal_log_unitary(s);
    REQUIRE(std::abs(h(0, 0) - cx(kPi / 2, 0)) < 1e-12);
    REQUIRE(std::abs(h(1, 1) - cx(-kPi / 2, 0)) < 1e-12);
    REQUIRE(std::abs(h(0, 1)) < 1e-12);
  }
  SECTION("round trip from a Hermitian generator with spectrum inside (-pi,pi)") {
    Rng rng(5);
    for (Eigen::Index dim : {2, 3, 6}) {
      cmat h0 = rng.hermitian(dim);
      h0 *= 2.6 / std::max(1.0, h0.operatorNorm());  // keep phases clear of the cut
      cmat s = exp_i_hermitian(h0);
      cmat h = principal_log_unitary(s);
      REQUIRE((h - h.adjoint()).norm() < 1e-12);
      REQUIRE((h - h0).norm() < 1e-9);
    }
  }
  SECTION("exp-log round trip on random unitaries") {
    Rng rng(6);
    for (Eigen::Index dim : {2, 5, 16}) {
      cmat s = rng.unitary(dim);
      cmat h = principal_log_unitary(s);
      REQUIRE((exp_i_hermitian(h) - s).norm() <= 1e-10);
    }
  }
  SECTION("non-unitary rejected") {
    REQUIRE_THROWS_AS(principal_log_unitary(2.0 * cmat::Identity(2, 2)), error);
  }
}

TEST_CASE("lowest_eigenvalues") {
  SECTION("diagonal") {
    cmat h = cmat::Zero(4, 4);
    for (int i = 0; i < 4; ++i) h(i, i) = i;
    auto apply = [&h](const cvec& x) { return cvec(h * x); };
    rvec ev = lowest_eigenvalues(apply, 4, 2);
    REQUIRE(ev(0) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(ev(1) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("identity multiplicity") {
    auto apply = [](const cvec& x) { return x; };
    rvec ev = lowest_eigenvalues(apply, 8, 3);
    for (int i = 0; i < 3; ++i) REQUIRE(ev(i) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("random 100x100 matches dense full diagonalization") {
    Rng rng(17);
    cmat h = rng.hermitian(100);
    auto apply = [&h](const cvec& x) { return cvec(h * x); };
    rvec ev = lowest_eigenvalues(apply, 100, 5);
    Eigen::SelfAdjointEigenSolver<cmat> es(h, Eigen::EigenvaluesOnly);
    for (int i = 0; i < 5; ++i) REQUIRE(std::abs(ev(i) - es.eigenvalues()(i)) < 1e-9);
  }
}

TEST_CASE("iterative path matches the dense reference") {
  Rng rng(23);
  for (Eigen::Index dim : {24, 100, 256, 512}) {
    cmat h = rng.hermitian(dim);
    // add structure: a few well-separated low modes plus a degenerate pair
    cmat w = rng.unitary(dim);
    rvec d(dim);
    d(0) = -3.0;
    d(1) = -3.0;  // exact degeneracy
    d(2) = -1.5;
    for (Eigen::Index i = 3; i < dim; ++i) d(i) = 0.5 + 0.01 * static_cast<double>(i);
    h = w * d.asDiagonal().toDenseMatrix().cast<cx>() * w.adjoint();
    h = (h + h.adjoint()) / 2.0;
    auto apply = [&h](const cvec& x) { return cvec(h * x); };
    Eigen::SelfAdjointEigenSolver<cmat> es(h, Eigen::EigenvaluesOnly);

    LowestEigOptions opt;
    opt.dense_cutoff = 0;  // force the iterative path
    opt.seed = 99;
    rvec ev = lowest_eigenvalues(apply, dim, 6, opt);
    for (int i = 0; i < 6; ++i) REQUIRE(std::abs(ev(i) - es.eigenvalues()(i)) < 1e-9);
  }
}

TEST_CASE("leading_eigenpair") {
  SECTION("diagonal dominant") {
    cmat l(2, 2);
    l << 2.0, 0.0, 0.0, 1.0;
    auto p = leading_eigenpair(l);
    REQUIRE(std::abs(p.value - cx(2, 0)) < 1e-10);
    REQUIRE(std::abs(std::abs(p.right(0)) - 1.0) < 1e-8);
    REQUIRE(std::abs(p.right(1)) < 1e-6);
  }
  SECTION("peripheral tie fails to converge") {
    cmat l(2, 2);
    l << 0.0, 1.0, 1.0, 0.0;
    REQUIRE_THROWS_AS(leading_eigenpair(l, 1e-12, 2000), error);
  }
  SECTION("similarity-transformed spectrum") {
    Rng rng(31);
    cmat w = rng.unitary(5);
    rvec d(5);
    d << 3.0, 1.2, -0.8, 0.4, 0.1;
    cmat l = w * d.asDiagonal().toDenseMatrix().cast<cx>() * w.adjoint();
    auto p = leading_eigenpair(l);
    REQUIRE(std::abs(p.value - cx(3, 0)) < 1e-9);
    REQUIRE((l * p.right - p.value * p.right).norm() < 1e-9);
    REQUIRE((l.transpose() * p.left - p.value * p.left).norm() < 1e-9);
  }
}

TEST_CASE("vectorization conventions") {
  Rng rng(41);
  cmat a = rng.gaussian(3, 3);
  REQUIRE((unvec_rm(vec_rm(a), 3, 3) - a).norm() < 1e-15);
  // row-major vec: vec(A X B) = (A kron B^T) vec(X)
  cmat b = rng.gaussian(3, 3), x = rng.gaussian(3, 3);
  cvec lhs = vec_rm(a * x * b);
  cvec rhs = kron(a, b.transpose()) * vec_rm(x);
  REQUIRE((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("parallel_for is deterministic and exception-safe") {
  std::vector<int> out(64, 0);
  parallel_for(64, 4, [&](int i) { out[static_cast<std::size_t>(i)] = i * i; });
  for (int i = 0; i < 64; ++i) REQUIRE(out[static_cast<std::size_t>(i)] == i * i);
  REQUIRE_THROWS_AS(
      parallel_for(8, 2, [](int i) { if (i == 5) throw error(errc::unsupported, "boom"); }),
      error);
}
