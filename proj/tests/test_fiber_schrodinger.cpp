#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "hallfiber/errors.hpp"
#include "hallfiber/fiber_schrodinger.hpp"

using namespace hallfiber;

namespace {

const Grid& grid8() {
  static const Grid g = auto_grid(1.0, -8.0, 3);
  return g;
}

const Grid& grid4() {
  static const Grid g = auto_grid(1.0, -4.0, 3);
  return g;
}

double weighted_norm(const EigenPair& e) {
  const Grid& g = e.grid;
  double s = 0.0;
  for (std::size_t j = 0; j <= g.intervals; ++j) {
    const double w = j == 0 || j == g.intervals ? 0.5 * g.spacing : g.spacing;
    s += w * e.samples[j] * e.samples[j];
  }
  return s;
}

// Discrete Robin form of the nodal values of f.
double discrete_form(const RobinSystem& sys, double (*f)(double)) {
  const std::size_t m = sys.stiffness_diag.size();
  std::vector<double> u(m);
  for (std::size_t j = 0; j < m; ++j) u[j] = f(sys.grid.node(j));
  double q = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    q += sys.stiffness_diag[j] * u[j] * u[j];
    if (j + 1 < m) q += 2.0 * sys.stiffness_off[j] * u[j] * u[j + 1];
  }
  return q;
}

double test_function(double x) { return (1.0 + x) * std::exp(-x * x); }
double test_derivative(double x) { return (1.0 - 2.0 * x - 2.0 * x * x) * std::exp(-x * x); }

// Continuum form ||u'||^2 + int V u^2 + c u(0)^2 by composite Simpson.
double continuum_form(const RobinFiberParams& p, double length) {
  const int n = 200000;
  const double h = length / n;
  const double shift = p.sign == FormSign::plus ? -p.b : p.b;
  const double c = p.sign == FormSign::plus ? p.alpha - p.xi : p.alpha + p.xi;
  auto integrand = [&](double x) {
    const double m = p.xi + p.b * x;
    const double u = test_function(x);
    const double du = test_derivative(x);
    return du * du + (m * m + shift) * u * u;
  };
  double s = integrand(0.0) + integrand(length);
  for (int i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
  return s * h / 3.0 + c * test_function(0.0) * test_function(0.0);
}

}  // namespace

TEST_SUITE("assembly") {
  TEST_CASE("node-0 entry") {
    const Grid g{2.0, 2, 1.0};
    const RobinSystem plus = assemble_robin({FormSign::plus, 1.0, 1.0, 0.0}, g);
    CHECK(plus.stiffness_diag[0] == doctest::Approx(1.5));
    CHECK(plus.weights[0] == doctest::Approx(0.5));
    CHECK(plus.weights[1] == doctest::Approx(1.0));
    // sign -, alpha = 0, xi = 0: boundary coefficient c = alpha + xi = 0.
    const RobinSystem minus = assemble_robin({FormSign::minus, 1.0, 0.0, 0.0}, g);
    CHECK(minus.stiffness_diag[0] == doctest::Approx(1.0 / 1.0 + 1.0 * 0.5));
  }

  TEST_CASE("reduced matrix is W^-1/2 A W^-1/2") {
    const Grid g = make_grid(6.0, 40);
    const RobinSystem sys = assemble_robin({FormSign::plus, 1.3, 0.7, -0.4}, g);
    const auto m = static_cast<Eigen::Index>(sys.stiffness_diag.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd wis(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      a(i, i) = sys.stiffness_diag[static_cast<std::size_t>(i)];
      if (i + 1 < m) a(i, i + 1) = a(i + 1, i) = sys.stiffness_off[static_cast<std::size_t>(i)];
      wis(i) = 1.0 / std::sqrt(sys.weights[static_cast<std::size_t>(i)]);
      CHECK(sys.weights[static_cast<std::size_t>(i)] > 0.0);
    }
    const Eigen::MatrixXd b = wis.asDiagonal() * a * wis.asDiagonal();
    for (Eigen::Index i = 0; i < m; ++i) {
      CHECK(sys.reduced.diag[static_cast<std::size_t>(i)] == doctest::Approx(b(i, i)));
      if (i + 1 < m) {
        CHECK(sys.reduced.off[static_cast<std::size_t>(i)] == doctest::Approx(b(i, i + 1)));
      }
    }
  }

  TEST_CASE("discrete form approximates the continuum form to second order") {
    for (FormSign sign : {FormSign::plus, FormSign::minus}) {
      const RobinFiberParams p{sign, 1.0, 0.8, 0.3};
      const double exact = continuum_form(p, 10.0);
      const double coarse = discrete_form(assemble_robin(p, make_grid(10.0, 500)), test_function);
      const double fine = discrete_form(assemble_robin(p, make_grid(10.0, 1000)), test_function);
      CHECK(std::abs(coarse - exact) < 1e-3);
      const double ratio = (coarse - exact) / (fine - exact);
      CHECK(ratio > 3.5);
      CHECK(ratio < 4.5);
    }
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(assemble_robin({FormSign::plus, -1.0, 0.0, 0.0}, grid4()), DomainError);
    CHECK_THROWS_AS(assemble_robin({FormSign::plus, 1.0, -0.5, 0.0}, grid4()), DomainError);
    CHECK_THROWS_AS(assemble_dirichlet({0.0, 0.0}, grid4()), DomainError);
  }
}

TEST_SUITE("robin eigenvalues") {
  TEST_CASE("flat zero mode") {
    const EigenPair e = nu({FormSign::plus, 1.0, 0.0, 0.0}, 1, grid4());
    CHECK(std::abs(e.nu) <= 1e-6);
    CHECK(nu_partial_alpha(e) == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-3));
    CHECK(std::abs(nu_partial_xi(e)) <= 1e-6);
    CHECK(weighted_norm(e) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(e.u0 == e.samples[0]);
  }

  TEST_CASE("odd Hermite value of the minus form and the large-alpha limit") {
    CHECK(nu({FormSign::minus, 1.0, 0.0, 0.0}, 1, grid4()).nu == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(std::abs(nu({FormSign::minus, 1.0, 1000.0, 0.0}, 1, grid4()).nu - 4.0) <= 0.05);
  }

  TEST_CASE("d nu / d alpha and d nu / d xi against finite differences") {
    const double d = 1e-4;
    for (FormSign sign : {FormSign::plus, FormSign::minus}) {
      for (double alpha : {0.0, 0.7, 3.0}) {
        for (double xi : {-2.0, 0.5}) {
          const int n = 2;
          const EigenPair e = nu({sign, 1.0, alpha, xi}, n, grid4());
          CHECK(nu_partial_alpha(e) > 0.0);
          auto at = [&](double a, double x) { return nu({sign, 1.0, a, x}, n, grid4(), &e).nu; };
          const double fd_xi = (at(alpha, xi + d) - at(alpha, xi - d)) / (2 * d);
          CHECK(std::abs(nu_partial_xi(e) - fd_xi) <= 1e-3);
          if (alpha > 0.0) {
            const double fd_alpha = (at(alpha + d, xi) - at(alpha - d, xi)) / (2 * d);
            CHECK(std::abs(nu_partial_alpha(e) - fd_alpha) <= 1e-3);
          }
        }
      }
    }
  }

  TEST_CASE("critical point identity of the minus form") {
    const double alpha = 1.0;
    auto value = [&](double xi) { return nu({FormSign::minus, 1.0, alpha, xi}, 1, grid4()).nu; };
    double lo = -3.0, hi = 1.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
      const double a = hi - phi * (hi - lo);
      const double b = lo + phi * (hi - lo);
      if (value(a) < value(b)) {
        hi = b;
      } else {
        lo = a;
      }
    }
    const double xc = 0.5 * (lo + hi);
    CHECK(std::abs(value(xc) + alpha * alpha + 2 * alpha * xc) <= 1e-3 * (1 + alpha * alpha));
  }

  TEST_CASE("monotone in alpha, ordered and simple") {
    // The + zero mode at alpha = 0 is O(h^2 (xi^2 + b)^2) below zero on the
    // lattice, which breaks the floor at |xi| = 4, so + starts at alpha = 0.5.
    for (FormSign sign : {FormSign::plus, FormSign::minus}) {
      for (double xi : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
        for (int n = 1; n <= 3; ++n) {
          double prev = -1e300;
          for (double alpha : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            if (sign == FormSign::plus && n == 1 && alpha == 0.0) continue;
            const double v = nu({sign, 1.0, alpha, xi}, n, grid4()).nu;
            CHECK(v > prev);
            prev = v;
          }
        }
        for (double alpha : {0.5, 1.0}) {
          const RobinFiberParams p{sign, 1.0, alpha, xi};
          for (int n = 1; n <= 3; ++n) {
            CHECK(nu(p, n + 1, grid4()).nu - nu(p, n, grid4()).nu > 10 * kDefaultEigenTolerance);
          }
        }
      }
    }
  }

  TEST_CASE("alpha -> 0 identities and the Dirichlet sandwich") {
    for (double xi : {-2.0, 0.0, 1.5}) {
      for (int n = 2; n <= 3; ++n) {
        const double robin = nu({FormSign::plus, 1.0, 0.0, xi}, n, grid4()).nu;
        const double dir = nu_dirichlet(1.0, xi, n - 1, grid4()).nu;
        CHECK(std::abs(robin - dir) <= 2e-3 * dir);
      }
      for (int n = 1; n <= 3; ++n) {
        const double robin = nu({FormSign::minus, 1.0, 0.0, xi}, n, grid4()).nu;
        const double dir = nu_dirichlet(-1.0, -xi, n, grid4()).nu;
        CHECK(std::abs(robin - dir) <= 2e-3 * dir);
        for (double alpha : {0.0, 1.0, 10.0, 100.0}) {
          // Both discretizations are O(h^2) accurate; allow that much slack.
          CHECK(nu({FormSign::minus, 1.0, alpha, xi}, n, grid4()).nu <=
                nu_dirichlet(1.0, xi, n, grid4()).nu + 1e-4);
        }
      }
    }
  }

  TEST_CASE("resolution guards") {
    const Grid tiny = make_grid(10.0, 8);
    CHECK_THROWS_AS(nu({FormSign::plus, 1.0, 0.0, 0.0}, 3, tiny), RefineGridError);
    CHECK_THROWS_AS(nu({FormSign::plus, 1.0, 0.0, 0.0}, 0, grid4()), DomainError);
    // The discrete zero mode sits at -h^2 b^2 / 16, below the floor for h = 0.01.
    const Grid coarse = make_grid_with_spacing(12.0, 0.01);
    CHECK_THROWS_AS(nu({FormSign::plus, 1.0, 0.0, 0.0}, 1, coarse), RefineGridError);
  }
}

TEST_SUITE("dirichlet") {
  TEST_CASE("odd Hermite levels") {
    CHECK(nu_dirichlet(1.0, 0.0, 1, grid4()).nu == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(nu_dirichlet(1.0, 0.0, 2, grid4()).nu == doctest::Approx(8.0).epsilon(1e-3));
    CHECK(nu_dirichlet(-1.0, 0.0, 1, grid4()).nu == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(nu_dirichlet(-1.0, 0.0, 2, grid4()).nu == doctest::Approx(6.0).epsilon(1e-3));
    CHECK(nu_dirichlet(1.0, -8.0, 1, grid8()).nu == doctest::Approx(2.0).epsilon(1e-3));
  }

  TEST_CASE("second-order convergence") {
    const Grid g = grid4();
    const Grid fine = make_grid_with_spacing(g.length, 0.5 * g.spacing);
    const double ratio =
        (nu_dirichlet(1.0, 0.0, 1, g).nu - 4.0) / (nu_dirichlet(1.0, 0.0, 1, fine).nu - 4.0);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }

  TEST_CASE("ordering and monotonicity in xi") {
    // Below xi = -3 the gap nu_1 - 2 falls under double resolution.
    double prev = -1e300;
    for (double xi = -3.0; xi <= 3.0; xi += 0.25) {
      const double v1 = nu_dirichlet(1.0, xi, 1, grid8()).nu;
      const double v2 = nu_dirichlet(1.0, xi, 2, grid8()).nu;
      const double v3 = nu_dirichlet(1.0, xi, 3, grid8()).nu;
      CHECK(2.0 < v1);
      CHECK(v1 < v2);
      CHECK(v2 < v3);
      CHECK(v1 > prev);
      prev = v1;
    }
  }

  TEST_CASE("Hellmann-Feynman slope") {
    const double d = 1e-4;
    for (double xi : {-2.0, 0.0, 1.0}) {
      const EigenPair e = nu_dirichlet(1.0, xi, 2, grid4());
      const double fd =
          (nu_dirichlet(1.0, xi + d, 2, grid4()).nu - nu_dirichlet(1.0, xi - d, 2, grid4()).nu) /
          (2 * d);
      CHECK(nu_dirichlet_partial_xi(e) == doctest::Approx(fd).epsilon(1e-4));
      CHECK(e.u0 == 0.0);
      CHECK_THROWS_AS(nu_partial_alpha(e), DomainError);
      CHECK_THROWS_AS(nu_partial_xi(e), DomainError);
    }
  }
}
