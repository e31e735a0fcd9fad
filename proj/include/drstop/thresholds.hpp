#pragma once

// Robust threshold schedules T(0..n). Offer k (1-indexed) is accepted iff its
// value is at least T(k); T(0) is the seller's robust payoff.

#include "drstop/ambiguity.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace drstop {

struct ThresholdSchedule {
    int n = 0;
    std::vector<double> values;  // size n + 1, values[n] == 0

    [[nodiscard]] double operator[](std::size_t i) const { return values.at(i); }
    [[nodiscard]] double payoff() const { return values.front(); }
};

/// xi -> max over the ambiguity set of E[min(xi, X)].
using BoundOracle = std::function<double(double)>;

/// The tight bound for the set's kind (moment_upper_bound).
BoundOracle default_bound_oracle(const ValidatedSpec& spec);

/// T(n) = 0, T(i) = T(i+1) + mu - bound(T(i+1)).
ThresholdSchedule robust_thresholds_generic(const ValidatedSpec& spec, int n, const BoundOracle& oracle);

/// Per-step variant: oracles[i] produces T(i) from T(i+1), i = 0..n-1.
ThresholdSchedule robust_thresholds_generic(const ValidatedSpec& spec, int n, std::span<const BoundOracle> oracles);

/// t(m) = gamma0, t(i) = alpha + beta * t(i+1); returns t(0..m).
std::vector<double> solve_linear_recursion(double alpha, double beta, double gamma0, int m);

/// mu + (T_next - mu) p + sqrt(p(1-p)) sigma.
double two_point_step_objective(double T_next, double mu, double sigma, double p);

/// E[max(T_next, X)] for the two-point member with lower mass p. Equals the
/// step objective whenever T_next lies between the two support points.
double two_point_continuation(double T_next, double mu, double sigma, double p);

struct TurningPointReport {
    std::optional<int> n0;
    std::optional<int> switch_index;   // n - n0
    std::vector<double> left_values;   // f* candidate at each i, built from the returned schedule
    std::vector<double> right_values;  // g* candidate at each i
};

struct TwoPointLargeL {
    ThresholdSchedule schedule;
    TurningPointReport turning_point;
};

/// Two-point set with L <= 2 mu: the left endpoint p = 1/(1 + c^2) is worst at every step.
ThresholdSchedule thresholds_two_point_small_L(double mu, double sigma2, double L, int n);

/// Two-point set with L >= 2 mu: per-step minimum of the left- and right-endpoint steps.
TwoPointLargeL thresholds_two_point_large_L(double mu, double sigma2, double L, int n);

/// Mean-variance-support set: T(i) = (mu^2 + sigma2)/L + (1 - mu/L) T(i+1).
ThresholdSchedule thresholds_mvs_general(double mu, double sigma2, double L, int n);

/// Mean-MAD set, with or without support bound: T(i) = mu + (d / 2mu) T(i+1).
ThresholdSchedule thresholds_mad(double mu, double d, int n, std::optional<double> L = std::nullopt);

/// Closed-form schedule for any kind (the two-point kind picks small or large L).
ThresholdSchedule closed_form_thresholds(const ValidatedSpec& spec, int n);

/// Limit of T(0) as n grows.
double asymptotic_payoff(const ValidatedSpec& spec);

/// Checks T(n) = 0, T(n-1) = mu, monotonicity and mu <= T(i) <= ceiling for i < n.
/// Returns a description of the first violation.
std::optional<std::string> schedule_violation(const ThresholdSchedule& s, double mu, double ceiling,
                                              double tol = 1e-12);

struct WorstCaseMassRow {
    int i = 0;
    double xi = 0.0;  // T(i+1)
    double p0 = 0.0;
    double pxi = 0.0;
    double pL = 0.0;
};

/// Masses of the mean-variance-support worst case on {0, T(i+1), L} for i = 0..n-2.
std::vector<WorstCaseMassRow> worst_case_mass_path(double mu, double sigma2, double L, int n);

}  // namespace drstop
