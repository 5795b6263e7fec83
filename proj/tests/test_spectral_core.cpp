#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hallfiber/errors.hpp"
#include "hallfiber/spectral_core.hpp"

using namespace hallfiber;

namespace {

Eigen::MatrixXd dense(const SymTridiag& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = t.diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      m(i, i + 1) = t.off[static_cast<std::size_t>(i)];
      m(i + 1, i) = t.off[static_cast<std::size_t>(i)];
    }
  }
  return m;
}

SymTridiag random_tridiag(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  SymTridiag t;
  for (std::size_t i = 0; i < n; ++i) t.diag.push_back(u(rng));
  for (std::size_t i = 0; i + 1 < n; ++i) t.off.push_back(u(rng));
  return t;
}

SymTridiag laplacian(std::size_t m) {
  return {std::vector<double>(m, 2.0), std::vector<double>(m - 1, -1.0)};
}

double residual(const SymTridiag& t, const std::vector<double>& v, double nu) {
  std::vector<double> r(v.size());
  t.multiply(v, r);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += (r[i] - nu * v[i]) * (r[i] - nu * v[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("make_grid arithmetic") {
    const Grid g = make_grid(10.0, 10);
    CHECK(g.spacing == doctest::Approx(1.0));
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(10) == doctest::Approx(10.0));
    CHECK(make_grid(20.0, 4000).spacing == doctest::Approx(0.005));
    const Grid odd = make_grid(7.3, 1234);
    CHECK(std::abs(odd.spacing * 1234 - 7.3) <= 2 * std::numeric_limits<double>::epsilon() * 7.3);
  }

  TEST_CASE("make_grid rejects bad input") {
    CHECK_THROWS_AS(make_grid(0.0, 100), InvalidGridError);
    CHECK_THROWS_AS(make_grid(-1.0, 100), InvalidGridError);
    CHECK_THROWS_AS(make_grid(1.0, 7), InvalidGridError);
  }

  TEST_CASE("make_grid_with_spacing keeps h exact") {
    const Grid g = make_grid_with_spacing(10.01, 0.0025);
    CHECK(g.spacing == 0.0025);
    CHECK(g.length >= 10.01);
    CHECK_THROWS_AS(make_grid_with_spacing(1.0, 0.0), InvalidGridError);
  }

  TEST_CASE("auto_domain bounds") {
    CHECK(auto_domain(1.0, 0.0, 1).length >= 10.0);
    CHECK(auto_domain(1.0, -8.0, 3).length >= 22.0);
    const DomainSize d = auto_domain(4.0, 0.0, 1);
    CHECK(d.length / static_cast<double>(d.intervals) <= 0.01 + 1e-15);
    const DomainSize big = auto_domain(400.0, 0.0, 1, 1.0);
    CHECK(big.length / static_cast<double>(big.intervals) <= 0.1 / 20.0 + 1e-15);
    CHECK(auto_domain(-1.0, 0.0, 1).length == auto_domain(1.0, 0.0, 1).length);
  }
}

TEST_SUITE("eigensolver") {
  TEST_CASE("analytic 3x3") {
    const SymTridiag t{{2, 2, 2}, {-1, -1}};
    const auto v = lowest_eigenvalues(t, 3, 1e-14);
    CHECK(v[0] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(v[2] == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-12));

    const auto x = eigenvector(t, 2.0);
    CHECK(x[0] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(std::abs(x[1]) < 1e-9);
    CHECK(x[2] == doctest::Approx(-1 / std::sqrt(2.0)).epsilon(1e-9));
  }

  TEST_CASE("identity") {
    const SymTridiag id{std::vector<double>(5, 1.0), std::vector<double>(4, 0.0)};
    const auto v = lowest_eigenvalues(id, 2);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(1.0));
    CHECK(residual(id, eigenvector(id, 1.0), 1.0) < 1e-12);
  }

  TEST_CASE("discrete Laplacian ground state") {
    for (std::size_t m : {10u, 50u, 200u}) {
      const SymTridiag t = laplacian(m);
      const double exact = 2 - 2 * std::cos(std::numbers::pi / static_cast<double>(m + 1));
      CHECK(kth_eigenvalue(t, 1) == doctest::Approx(exact).epsilon(1e-10));
    }
    const std::size_t m = 50;
    const SymTridiag t = laplacian(m);
    const auto x = eigenvector(t, kth_eigenvalue(t, 1));
    double dot = 0, norm = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const double s = std::sin(std::numbers::pi * static_cast<double>(j + 1) / (m + 1));
      dot += s * x[j];
      norm += s * s;
    }
    CHECK(dot / std::sqrt(norm) >= 1 - 1e-8);
  }

  TEST_CASE("Sturm count against dense diagonalization") {
    std::mt19937_64 rng(7);
    for (std::size_t n : {1u, 2u, 17u, 64u, 200u}) {
      const SymTridiag t = random_tridiag(n, rng);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(t));
      const Eigen::VectorXd ev = es.eigenvalues();
      std::uniform_real_distribution<double> u(-8.0, 8.0);
      for (int trial = 0; trial < 40; ++trial) {
        const double x = u(rng);
        std::size_t below = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) below += ev(i) < x ? 1 : 0;
        CHECK(sturm_count(t, x) == below);
      }
      const Interval g = gershgorin(t);
      CHECK(g.lo <= ev.minCoeff());
      CHECK(g.hi >= ev.maxCoeff());
    }
  }

  TEST_CASE("eigenvalues and eigenvectors against dense diagonalization") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {8u, 40u, 150u}) {
      const SymTridiag t = random_tridiag(n, rng);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(t));
      const auto low = lowest_eigenvalues(t, n);
      for (std::size_t k = 0; k < n; ++k) {
        const double ref = es.eigenvalues()(static_cast<Eigen::Index>(k));
        CHECK(std::abs(low[k] - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
      }
      for (std::size_t k : {std::size_t{1}, n / 2, n}) {
        const TridiagEigenpair p = kth_eigenpair(t, k);
        const double ref = es.eigenvalues()(static_cast<Eigen::Index>(k - 1));
        CHECK(std::abs(p.value - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
        CHECK(residual(t, p.vector, p.value) <= 1e-8 * t.norm_inf());
        const Eigen::VectorXd vref = es.eigenvectors().col(static_cast<Eigen::Index>(k - 1));
        double dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += vref(static_cast<Eigen::Index>(i)) * p.vector[i];
        CHECK(std::abs(dot) >= 1 - 1e-8);
      }
      const auto range = eigenvalue_range(t, 3, 6);
      REQUIRE(range.size() == 4);
      for (std::size_t i = 0; i < 4; ++i) CHECK(range[i] == doctest::Approx(low[i + 2]));
    }
  }

  TEST_CASE("warm start gives the certified value") {
    const SymTridiag t = laplacian(100);
    const TridiagEigenpair cold = kth_eigenpair(t, 3);
    SymTridiag shifted = t;
    for (auto& d : shifted.diag) d += 1e-4;
    const TridiagEigenpair warm = kth_eigenpair(shifted, 3, &cold);
    CHECK(warm.value == doctest::Approx(cold.value + 1e-4).epsilon(1e-10));
    // A warm start from another index must not change which eigenvalue is returned.
    const TridiagEigenpair wrong = kth_eigenpair(t, 5);
    CHECK(kth_eigenpair(shifted, 3, &wrong).value == doctest::Approx(warm.value).epsilon(1e-10));
  }

  TEST_CASE("tolerance monotone refinement and determinism") {
    std::mt19937_64 rng(3);
    const SymTridiag t = random_tridiag(60, rng);
    const auto loose = lowest_eigenvalues(t, 10, 1e-6);
    const auto tight = lowest_eigenvalues(t, 10, 1e-12);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(std::abs(loose[i] - tight[i]) <= eigen_tolerance(loose[i], 1e-6));
      if (i > 0) CHECK(loose[i] >= loose[i - 1]);
    }
    CHECK(lowest_eigenvalues(t, 10) == lowest_eigenvalues(t, 10));
  }

  TEST_CASE("size errors") {
    const SymTridiag t{{2, 2, 2}, {-1, -1}};
    CHECK_THROWS_AS(lowest_eigenvalues(t, 4), SizeError);
    CHECK_THROWS_AS(kth_eigenvalue(t, 0), SizeError);
    CHECK_THROWS_AS(kth_eigenvalue(t, 4), SizeError);
  }
}
