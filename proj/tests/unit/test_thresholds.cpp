#include "drstop/momentbound.hpp"
#include "drstop/oracle.hpp"
#include "drstop/thresholds.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace drstop;

namespace {

double max_abs_diff(const ThresholdSchedule& a, const ThresholdSchedule& b) {
    REQUIRE(a.values.size() == b.values.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace

TEST_SUITE("thresholds") {

TEST_CASE("solve_linear_recursion") {
    CHECK(solve_linear_recursion(2.0, 0.0, 2.0, 3) == std::vector<double>{2.0, 2.0, 2.0, 2.0});
    CHECK(solve_linear_recursion(0.0, 1.0, 7.0, 5) == std::vector<double>(6, 7.0));
    CHECK(solve_linear_recursion(1.0, 0.5, 1.0, 2) == std::vector<double>{1.75, 1.5, 1.0});
    CHECK(solve_linear_recursion(1.0, 0.5, 1.0, 0) == std::vector<double>{1.0});
}

TEST_CASE("degenerate sets give the mean at every step") {
    for (const auto& s : {AmbiguitySpec::mean_only(1.7), AmbiguitySpec::mean_variance(1.7, 4.0)}) {
        const auto v = validate(s);
        const auto sched = robust_thresholds_generic(v, 9, default_bound_oracle(v));
        for (int i = 0; i < 9; ++i) CHECK(sched.values[i] == 1.7);
        CHECK(sched.values[9] == 0.0);
    }
}

TEST_CASE("one hand-executed generic step") {
    const auto v = validate(AmbiguitySpec::mean_var_support(1.0, 0.5, 3.0));
    const auto s = robust_thresholds_generic(v, 3, default_bound_oracle(v));
    CHECK(s.values[3] == 0.0);
    CHECK(s.values[2] == 1.0);
    CHECK(s.values[1] == doctest::Approx(7.0 / 6.0).epsilon(1e-15));
    const auto closed = thresholds_mvs_general(1.0, 0.5, 3.0, 3);
    CHECK(closed.values[1] == doctest::Approx(7.0 / 6.0).epsilon(1e-15));
    CHECK(max_abs_diff(s, closed) < 1e-12);
}

TEST_CASE("per-step oracle list") {
    const auto v = validate(AmbiguitySpec::mean_var_support(1.0, 0.5, 3.0));
    std::vector<BoundOracle> list(4, default_bound_oracle(v));
    CHECK(max_abs_diff(robust_thresholds_generic(v, 4, list), thresholds_mvs_general(1.0, 0.5, 3.0, 4)) < 1e-15);
    CHECK_THROWS_AS(robust_thresholds_generic(v, 5, list), Error);
}

TEST_CASE("two-point step objective") {
    CHECK(two_point_step_objective(1.0, 1.0, 1.0, 0.5) == doctest::Approx(1.5));
    const double p = 0.3;
    CHECK(two_point_step_objective(2.0, 2.0, 0.7, p) == doctest::Approx(2.0 + std::sqrt(p * (1 - p)) * 0.7));
    CHECK(two_point_step_objective(1.0, 1.0, 1.0, 1.0 - 1e-12) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("two-point small L") {
    const auto s = thresholds_two_point_small_L(1.0, 1.0, 2.0, 6);
    CHECK(s.values[5] == 1.0);
    CHECK(s.values[4] == doctest::Approx(1.5));
    const auto g = grid_min_two_point(1.0, 1.0, 1.0, feasible_p_interval(1.0, 1.0, 2.0), 101);
    CHECK(g.best_arg == doctest::Approx(0.5));
    CHECK(g.best_value == doctest::Approx(1.5));
    CHECK(thresholds_two_point_small_L(1.0, 1.0, 2.0, 400).values[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(thresholds_two_point_small_L(1.0, 1.0, 2.5, 6), Error);
}

TEST_CASE("two-point small L closed form agrees for 1 <= i <= n-1") {
    const double mu = 1.3, s2 = 0.2, L = 2.4;
    const int n = 12;
    const auto s = thresholds_two_point_small_L(mu, s2, L, n);
    for (int i = 1; i <= n - 1; ++i) {
        const double power = mu + s2 / mu * (1.0 - std::pow(s2 / (mu * mu + s2), n - 1 - i));
        CHECK(s.values[i] == doctest::Approx(power).epsilon(1e-12));
    }
}

TEST_CASE("two-point large L turning point") {
    const auto r = thresholds_two_point_large_L(1.0, 1.3, 5.0, 20);
    REQUIRE(r.turning_point.switch_index.has_value());
    CHECK(*r.turning_point.switch_index == 15);
    CHECK(*r.turning_point.n0 == 5);
    for (int i = 0; i < 20; ++i) {
        const double lo = std::min(r.turning_point.left_values[i], r.turning_point.right_values[i]);
        CHECK(std::abs(r.schedule.values[i] - lo) <= 1e-12 * std::max(1.0, lo));
        if (i > 15) {
            CHECK(r.turning_point.right_values[i] <= r.turning_point.left_values[i] + 1e-12);
        } else {
            CHECK(r.turning_point.left_values[i] <= r.turning_point.right_values[i]);
        }
    }
    CHECK(thresholds_two_point_large_L(1.0, 1.3, 5.0, 400).schedule.values[0] ==
          doctest::Approx(2.3).epsilon(1e-12));
    CHECK_THROWS_AS(thresholds_two_point_large_L(1.0, 0.5, 1.5, 5), Error);
}

TEST_CASE("two-point large L segments match the closed forms") {
    const double mu = 1.0, s2 = 1.3, L = 5.0;
    const int n = 20;
    const auto r = thresholds_two_point_large_L(mu, s2, L, n);
    const int sw = *r.turning_point.switch_index;
    const double gap2 = (L - mu) * (L - mu);
    const double rb = gap2 / (gap2 + s2);
    // tail segment: right-endpoint recursion started from T(n-1) = mu
    for (int i = sw + 1; i <= n - 1; ++i) {
        const double steps = n - 1 - i;
        const double fixed = L * s2 / (gap2 + s2) / (1.0 - rb);
        const double power = fixed + (mu - fixed) * std::pow(rb, steps);
        CHECK(r.schedule.values[i] == doctest::Approx(power).epsilon(1e-12));
    }
    // head segment: left-endpoint recursion from T(sw + 1)
    const double lb = s2 / (mu * mu + s2);
    for (int i = 0; i <= sw; ++i) {
        const double k = sw + 1 - i;
        const double power = mu * (1.0 - std::pow(lb, k)) / (1.0 - lb) + std::pow(lb, k) * r.schedule.values[sw + 1];
        CHECK(r.schedule.values[i] == doctest::Approx(power).epsilon(1e-12));
    }
}

TEST_CASE("two-point at L = 2.5 mu: tie, then right endpoint, then left endpoint") {
    const auto r = thresholds_two_point_large_L(1.0, 0.82, 2.5, 10);
    const auto& tp = r.turning_point;
    CHECK(tp.left_values[9] == doctest::Approx(tp.right_values[9]));
    CHECK(tp.right_values[8] < tp.left_values[8]);
    CHECK(tp.left_values[7] < tp.right_values[7]);
    CHECK(*tp.switch_index == 7);
}

TEST_CASE("boundary variance collapses both recursions") {
    const auto r = thresholds_two_point_large_L(1.0, 2.0, 3.0, 8);
    for (int i = 0; i <= 8; ++i) {
        CHECK(r.turning_point.left_values[i] == doctest::Approx(r.turning_point.right_values[i]).epsilon(1e-12));
    }
    CHECK_FALSE(r.turning_point.switch_index.has_value());
}

TEST_CASE("general mean-variance-support schedule") {
    const auto s = thresholds_mvs_general(1.0, 0.5, 3.0, 3);
    CHECK(s.values[2] == 1.0);
    CHECK(s.values[1] == doctest::Approx(7.0 / 6.0));
    const auto big = thresholds_mvs_general(1.0, 0.5, 3.0, 400);
    CHECK(big.values[0] == doctest::Approx(1.5).epsilon(1e-12));
    const int n = 30;
    const auto t = thresholds_mvs_general(0.8, 0.9, 4.0, n);
    for (int i = 0; i < n; ++i) {
        const double power = 0.8 + 0.9 / 0.8 * (1.0 - std::pow(1.0 - 0.8 / 4.0, n - 1 - i));
        CHECK(t.values[i] == doctest::Approx(power).epsilon(1e-12));
    }
}

TEST_CASE("MAD schedule") {
    const auto s = thresholds_mad(1.0, 0.5, 3);
    CHECK(s.values[2] == 1.0);
    CHECK(s.values[1] == doctest::Approx(1.25));
    CHECK(thresholds_mad(1.0, 0.5, 400).values[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(thresholds_mad(1.0, 0.5, 17).values == thresholds_mad(1.0, 0.5, 17, 4.0).values);
    const int n = 25;
    const auto t = thresholds_mad(2.0, 1.5, n);
    const double top = 8.0 / 2.5;
    for (int i = 1; i <= n - 1; ++i) {
        const double power = top - (top - 2.0) * std::pow(1.5 / 4.0, n - 1 - i);
        CHECK(t.values[i] == doctest::Approx(power).epsilon(1e-12));
    }
    CHECK_THROWS_AS(thresholds_mad(1.0, 2.0, 4), Error);
}

TEST_CASE("asymptotic payoffs") {
    CHECK(asymptotic_payoff(validate(AmbiguitySpec::mean_only(1.0))) == 1.0);
    CHECK(asymptotic_payoff(validate(AmbiguitySpec::mean_variance(1.0, 3.0))) == 1.0);
    CHECK(asymptotic_payoff(validate(AmbiguitySpec::mean_var_support(1.0, 1.3, 5.0))) == doctest::Approx(2.3));
    CHECK(asymptotic_payoff(validate(AmbiguitySpec::two_point(1.0, 1.3, 5.0))) == doctest::Approx(2.3));
    CHECK(asymptotic_payoff(validate(AmbiguitySpec::mean_mad(1.0, 0.5))) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("worst-case mass path") {
    const auto rows = worst_case_mass_path(1.0, 1.3, 5.0, 20);
    REQUIRE(rows.size() == 19);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(std::abs(rows[k].p0 + rows[k].pxi + rows[k].pL - 1.0) <= 1e-12);
        if (k > 0) CHECK(rows[k - 1].pL <= rows[k].pL + 1e-15);
    }
}

TEST_CASE("schedule_violation reports problems") {
    auto s = thresholds_mvs_general(1.0, 0.5, 3.0, 5);
    CHECK_FALSE(schedule_violation(s, 1.0, 1.5).has_value());
    s.values[2] = 0.9;
    CHECK(schedule_violation(s, 1.0, 1.5).has_value());
}

TEST_CASE("property: closed forms equal the generic recursion") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 150; ++k) {
        const double mu = 0.2 + 3.0 * U(rng);
        const double L = mu * (1.05 + 5.0 * U(rng));
        const double s2 = mu * (L - mu) * U(rng);
        const double d = 2.0 * mu * (L - mu) / L * U(rng);
        const int n = 1 + static_cast<int>(U(rng) * 50);

        const auto mvs = validate(AmbiguitySpec::mean_var_support(mu, s2, L));
        CHECK(max_abs_diff(thresholds_mvs_general(mu, s2, L, n),
                           robust_thresholds_generic(mvs, n, default_bound_oracle(mvs))) <= 1e-9);

        const auto mad = validate(AmbiguitySpec::mean_mad_support(mu, d, L));
        CHECK(max_abs_diff(thresholds_mad(mu, d, n, L), robust_thresholds_generic(mad, n, default_bound_oracle(mad))) <=
              1e-9);

        const auto tp = validate(AmbiguitySpec::two_point(mu, s2, L));
        CHECK(max_abs_diff(closed_form_thresholds(tp, n), robust_thresholds_generic(tp, n, default_bound_oracle(tp))) <=
              1e-9);
    }
}

TEST_CASE("property: schedules are sandwiched and T(0) grows with n") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 60; ++k) {
        const double mu = 0.2 + 3.0 * U(rng);
        const double L = mu * (1.05 + 5.0 * U(rng));
        const double s2 = mu * (L - mu) * U(rng);
        for (const auto& spec : {AmbiguitySpec::mean_var_support(mu, s2, L), AmbiguitySpec::two_point(mu, s2, L)}) {
            const auto v = validate(spec);
            double prev = 0.0;
            for (int n = 1; n <= 60; ++n) {
                const auto s = closed_form_thresholds(v, n);
                const auto bad = schedule_violation(s, mu, asymptotic_payoff(v));
                CHECK_MESSAGE(!bad, *bad);
                CHECK(s.values[0] >= prev - 1e-12);
                prev = s.values[0];
            }
        }
    }
}

TEST_CASE("property: u(p) = K0 p + sqrt(p(1-p)) K1 is minimized at the interval ends") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double K0 = 5.0 * U(rng);
        const double K1 = 5.0 * U(rng);
        const double y = 1e-6 + (0.5 - 1e-6) * U(rng);
        const auto u = [&](double p) { return K0 * p + std::sqrt(p * (1.0 - p)) * K1; };
        for (int j = 0; j < 200; ++j) {
            const double z = y + (1.0 - 2.0 * y) * U(rng);
            CHECK(u(y) <= u(z) + 1e-12);
        }
    }
}

}  // TEST_SUITE
