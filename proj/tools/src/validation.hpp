#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hallfiber/dispersion.hpp"

namespace hallfiber::cli {

/// Outcome of one acceptance criterion.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  int checks = 0;
  int failures = 0;
  /// Worst tolerance usage or the first failure.
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  int workers = 1;
  SolveOptions solve;
  /// Criteria to run (1..10); empty runs all of them.
  std::vector<int> only;
};

constexpr int kCriterionCount = 10;

/// Short name of criterion id.
std::string criterion_name(int id);

/// Direct Dirac spectrum of a requested problem against the canonical
/// spectrum mapped back through its SymmetryTransform, both on the canonical
/// grid, plus the fixed-point energies against the direct spectrum.
struct SymmetryPoint {
  FiberParams params;
  CanonicalProblem canonical;
  std::vector<double> direct;
  std::vector<double> mapped;
  /// max |direct - mapped|.
  double deviation = 0.0;
  /// max over branches +-1..3 of |lambda - nearest direct eigenvalue| / (1 + |lambda|).
  double fixed_point_deviation = 0.0;
};

/// k eigenvalues nearest 0 are compared.
SymmetryPoint symmetry_point(const FiberParams& fp, int k, const SolveOptions& solve = {});

/// Runs one criterion; solver exceptions turn into a failed result.
CriterionResult run_criterion(int id, const ValidationOptions& opts);

/// Runs the selected criteria in order, reporting each result as it finishes.
std::vector<CriterionResult> run_validation(
    const ValidationOptions& opts,
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3 zigzag closed forms  [12 checks, 0.4 s] detail".
std::string format_result(const CriterionResult& r);

}  // namespace hallfiber::cli
