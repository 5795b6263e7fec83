#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hallfiber/dispersion.hpp"
#include "hallfiber/errors.hpp"
#include "hallfiber/fiber_dirac.hpp"

using namespace hallfiber;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Grid grid_of(const FiberParams& fp) { return grid_for(canonicalize(fp).params, 3); }

double smallest_abs(const FiberParams& fp) {
  return std::abs(dirac_spectrum_window(fp, grid_of(fp), 1).front());
}

double nearest(double v, const std::vector<double>& w) {
  double best = kInf;
  for (double e : w) best = std::min(best, std::abs(e - v));
  return best;
}

}  // namespace

TEST_SUITE("assembly") {
  TEST_CASE("spectrum window agrees with dense diagonalization") {
    for (const FiberParams fp : {FiberParams{1.0, 0.7, 0.4}, FiberParams{1.0, 0.0, 0.0},
                                 FiberParams{1.0, kInf, -1.0}, FiberParams{-1.0, 2.0, 0.3}}) {
      const Grid g = make_grid(12.0, 300);
      const DiracSystem sys = assemble_dirac(fp, g);
      const auto n = static_cast<Eigen::Index>(sys.matrix.size());
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = sys.matrix.diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = sys.matrix.off[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      std::vector<double> ref(es.eigenvalues().data(), es.eigenvalues().data() + n);
      std::sort(ref.begin(), ref.end(),
                [](double a, double b) { return std::abs(a) < std::abs(b); });
      // Magnitudes are compared since ties in |lambda| leave the signs ambiguous.
      auto w = dirac_spectrum_window(fp, g, 5);
      std::sort(w.begin(), w.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
      for (std::size_t i = 0; i < 5; ++i) {
        CHECK(std::abs(w[i]) == doctest::Approx(std::abs(ref[i])).epsilon(1e-9));
        CHECK(nearest(w[i], ref) <= 1e-9 * (1 + std::abs(w[i])));
      }
      for (double mass : sys.masses) CHECK(mass > 0.0);
    }
  }

  TEST_CASE("boundary node elimination") {
    const Grid g = make_grid(10.0, 100);
    CHECK(assemble_dirac({1.0, kInf, 0.0}, g).node0_eliminated);
    CHECK_FALSE(assemble_dirac({1.0, 0.0, 0.0}, g).node0_eliminated);
    CHECK(assemble_dirac({-1.0, 0.0, 0.0}, g).node0_eliminated);
    CHECK(assemble_dirac({1.0, kInf, 0.0}, g).matrix.size() == 200);
    CHECK(assemble_dirac({1.0, 1.0, 0.0}, g).matrix.size() == 201);
    CHECK_THROWS_AS(assemble_dirac({0.0, 1.0, 0.0}, g), DomainError);
  }
}

TEST_SUITE("spectrum") {
  TEST_CASE("zero mode and gap") {
    CHECK(smallest_abs({1.0, 0.0, 0.0}) <= 1e-6);
    CHECK(smallest_abs({1.0, 1.0, 0.0}) >= 0.3);
  }

  TEST_CASE("zero-mode dichotomy on the lattice") {
    for (double gamma : {0.0, 0.5, 1.0, 2.0, kInf}) {
      for (double xi : {-2.0, 0.0, 2.0}) {
        const double s = smallest_abs({1.0, gamma, xi});
        if (gamma == 0.0) {
          CHECK(s <= 1e-6);
        } else {
          CHECK(s > 1e-6);
          if (xi != -2.0) CHECK(s >= 0.3);
        }
      }
    }
  }

  TEST_CASE("gamma = inf positive part") {
    const FiberParams fp{1.0, kInf, 0.0};
    const auto w = dirac_spectrum_window(fp, grid_of(fp), 4);
    CHECK(w[2] == doctest::Approx(std::sqrt(2.0)).epsilon(2e-3));
    CHECK(w[3] == doctest::Approx(std::sqrt(6.0)).epsilon(2e-3));
  }

  TEST_CASE("zigzag spectra are symmetric") {
    for (double xi : {-3.0, 0.5, 2.0}) {
      const FiberParams fp{1.0, 0.0, xi};
      const auto w = dirac_spectrum_window(fp, grid_of(fp), 7);
      for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(std::abs(w[i] + w[w.size() - 1 - i]) <= 1e-6);
      }
    }
  }

  TEST_CASE("matches the fixed-point branches") {
    for (double xi : {-1.0, 0.0, 1.5}) {
      const FiberParams fp{1.0, 1.0, xi};
      const Grid g = grid_of(fp);
      const DiracBranches d = dirac_branches(fp, g, 3);
      for (int n = 1; n <= 3; ++n) {
        const double tp = theta({BranchSign::plus, n}, fp, g);
        const double tm = theta({BranchSign::minus, n}, fp, g);
        CHECK(std::abs(tp - d.plus[n - 1]) <= 1e-3 * (1 + tp));
        CHECK(std::abs(tm - d.minus[n - 1]) <= 1e-3 * (1 + tm));
      }
    }
  }

  TEST_CASE("charge conjugation is exact on the lattice") {
    for (const FiberParams fp : {FiberParams{-1.0, 2.0, 0.3}, FiberParams{-1.0, 0.5, -1.0},
                                 FiberParams{-1.0, 0.0, 0.0}, FiberParams{1.0, -2.0, 0.7}}) {
      const CanonicalProblem cp = canonicalize(fp);
      const Grid g = grid_for(cp.params, 3);
      // Pairs tied in |lambda| make a 5-window ambiguous, so each side is
      // matched against a 7-window of the other.
      auto mapped = [&](int k) {
        auto w = dirac_spectrum_window(cp.params, g, k);
        for (auto& v : w) v = -v;
        return w;
      };
      const auto direct = dirac_spectrum_window(fp, g, 5);
      const auto direct_wide = dirac_spectrum_window(fp, g, 7);
      for (double v : direct) CHECK(nearest(v, mapped(7)) <= 1e-6);
      for (double v : mapped(5)) CHECK(nearest(v, direct_wide) <= 1e-6);
    }
  }
}

TEST_SUITE("spinors") {
  TEST_CASE("reconstruction from the Robin eigenpair") {
    for (double gamma : {0.5, 1.0, 2.0}) {
      const FiberParams fp{1.0, gamma, 0.0};
      const Grid g = grid_for(fp, 1);
      const ThetaSolution sol = solve_theta({BranchSign::plus, 1}, fp, g);
      REQUIRE(sol.pair.has_value());
      const Spinor s = reconstruct_spinor(*sol.pair, sol.theta, fp, g);
      CHECK(spinor_norm_squared(s) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(s.psi2_at_boundary() / s.psi1[0] == doctest::Approx(gamma).epsilon(1e-3));
      CHECK(dirac_residual(s) <= 5e-3 * (1 + sol.theta));
      CHECK(feynman_hellmann_velocity(s) == doctest::Approx(sol.theta_slope).epsilon(2e-3));

      const Spinor flipped = apply_sigma3(s);
      CHECK(flipped.lambda == -s.lambda);
      CHECK(flipped.params.gamma == -gamma);
      CHECK(dirac_residual(flipped) <= 5e-3 * (1 + sol.theta));
      CHECK_THROWS_AS(reconstruct_spinor(*sol.pair, -1.0, fp, g), DomainError);
    }
  }

  TEST_CASE("eigen-spinors satisfy the boundary condition") {
    for (double gamma : {0.0, 0.5, 1.0, 3.0, kInf}) {
      const FiberParams fp{1.0, gamma, 0.3};
      const Spinor s = dirac_spinor(fp, grid_for(fp, 2), 1.0);
      CHECK(spinor_norm_squared(s) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(boundary_residual(s) <= 1e-6 * std::sqrt(spinor_norm_squared(s)));
      CHECK(dirac_residual(s) <= 1e-8);
    }
  }

  TEST_CASE("Feynman-Hellmann velocity") {
    const FiberParams flat{1.0, 0.0, 0.7};
    CHECK(std::abs(feynman_hellmann_velocity(dirac_spinor(flat, grid_for(flat, 1), 0.0))) <= 1e-6);

    const FiberParams fp{1.0, 1.0, 0.0};
    const Grid g = grid_for(fp, 1);
    const BranchPoint p = evaluate_branch({BranchSign::plus, 1}, fp);
    CHECK(feynman_hellmann_velocity(dirac_spinor(fp, g, p.lambda)) ==
          doctest::Approx(p.slope).epsilon(2e-3));

    const CriticalPoint cp = critical_point(1.0, 1.0, 1);
    const FiberParams at_min{1.0, 1.0, cp.xi};
    CHECK(std::abs(feynman_hellmann_velocity(dirac_spinor(at_min, grid_for(at_min, 1), -cp.theta))) <=
          2e-3);
  }

  TEST_CASE("negative field layout is rejected for spinors") {
    const FiberParams fp{-1.0, 1.0, 0.0};
    CHECK_THROWS_AS(dirac_spinor(fp, grid_for({1.0, 1.0, 0.0}, 1), 1.0), DomainError);
  }
}
