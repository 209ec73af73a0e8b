#pragma once

#include <string>
#include <vector>

#include "augsel/dataset.hpp"
#include "augsel/logistic.hpp"

// Desk-scale verification routines that check the fast paths against
// independent computations: full leave-one-out retraining, central finite
// differences, long-run gradient descent, exhaustive subset enumeration for
// the k-DPP, and frequency tests for the samplers. The CLI exposes them via
// the `oracle` subcommand; the acceptance tests reuse them with their own
// fixture sizes and tolerances.

namespace augsel::oracle {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Synthetic fixture: `anchors` cluster centers (labels alternating) with
// `replicas` jittered copies each; replication keeps single-point removals
// in the regime where the linearized LOO estimate is meaningful.
Dataset clustered_fixture(int anchors, int replicas, int dim, double separation, double jitter,
                          std::uint64_t seed);

// Signed LOO influence against brute-force retraining deltas: Spearman rho
// must be <= -min_abs_rho (the signed check catches sign flips), and for the
// top_k points by influence magnitude the relative error of -I vs the delta
// must stay within max_top_rel_err.
Check check_loo_fixture(const std::string& name, const Dataset& data, const TrainConfig& config,
                        double min_abs_rho, double max_top_rel_err, int top_k);

Check check_gradient_fd(int trials, std::uint64_t seed, double rel_tol);
Check check_hessian_fd(int trials, std::uint64_t seed, double rel_tol);

// Newton result vs plain gradient descent with a conservative step, run for
// `steps` iterations; infinity-norm agreement within tol.
Check check_solver_gd(const std::string& name, const Dataset& data, const TrainConfig& config,
                      long steps, double tol);

Check check_esym_enumeration(int n, int k, std::uint64_t seed);
Check check_kdpp_frequencies(int n, int k, int trials, double tol, std::uint64_t seed);
Check check_uniform_chisquare(int n, int k, int trials, std::uint64_t seed);
Check check_proportional_exact(const std::vector<double>& scores, int k, int trials, double tol,
                               std::uint64_t seed);

std::vector<std::string> suite_names();  // loo, calculus, solver, dpp, sampler
std::vector<Check> run_suite(const std::string& suite);  // "all" runs everything

}  // namespace augsel::oracle
