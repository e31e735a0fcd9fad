#include "drstop/thresholds.hpp"

#include "drstop/momentbound.hpp"

#include <cmath>
#include <sstream>

namespace drstop {

namespace {

constexpr double kTieTolerance = 1e-12;

void check_n(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidParameter, "n must be >= 1, got " + std::to_string(n));
}

ThresholdSchedule from_recursion(std::vector<double> head) {
    // head holds T(0..n-1); append T(n) = 0.
    ThresholdSchedule s;
    s.n = static_cast<int>(head.size());
    s.values = std::move(head);
    s.values.push_back(0.0);
    return s;
}

}  // namespace

BoundOracle default_bound_oracle(const ValidatedSpec& spec) {
    return [spec](double xi) { return moment_upper_bound(spec, xi); };
}

ThresholdSchedule robust_thresholds_generic(const ValidatedSpec& spec, int n, const BoundOracle& oracle) {
    check_n(n);
    ThresholdSchedule s{n, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0)};
    for (int i = n - 1; i >= 0; --i) {
        const double next = s.values[i + 1];
        s.values[i] = next + spec.mu() - oracle(next);
    }
    return s;
}

ThresholdSchedule robust_thresholds_generic(const ValidatedSpec& spec, int n, std::span<const BoundOracle> oracles) {
    check_n(n);
    if (oracles.size() != static_cast<std::size_t>(n)) {
        throw Error(ErrorCode::InvalidParameter, "expected " + std::to_string(n) + " per-step oracles, got " +
                                                     std::to_string(oracles.size()));
    }
    ThresholdSchedule s{n, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0)};
    for (int i = n - 1; i >= 0; --i) {
        const double next = s.values[i + 1];
        s.values[i] = next + spec.mu() - oracles[i](next);
    }
    return s;
}

std::vector<double> solve_linear_recursion(double alpha, double beta, double gamma0, int m) {
    if (m < 0) throw Error(ErrorCode::InvalidParameter, "m must be >= 0");
    std::vector<double> t(static_cast<std::size_t>(m) + 1);
    t[m] = gamma0;
    for (int i = m - 1; i >= 0; --i) t[i] = alpha + beta * t[i + 1];
    return t;
}

double two_point_step_objective(double T_next, double mu, double sigma, double p) {
    return mu + (T_next - mu) * p + std::sqrt(p * (1.0 - p)) * sigma;
}

double two_point_continuation(double T_next, double mu, double sigma, double p) {
    if (sigma == 0.0 || p >= 1.0) return std::max(T_next, mu);
    const double a = mu - std::sqrt((1.0 - p) / p) * sigma;
    const double b = mu + std::sqrt(p / (1.0 - p)) * sigma;
    return p * std::max(T_next, a) + (1.0 - p) * std::max(T_next, b);
}

ThresholdSchedule thresholds_two_point_small_L(double mu, double sigma2, double L, int n) {
    validate(AmbiguitySpec::two_point(mu, sigma2, L));
    check_n(n);
    if (L > 2.0 * mu) {
        throw Error(ErrorCode::PreconditionViolated, "small-L schedule needs L <= 2 mu");
    }
    const double beta = sigma2 / (mu * mu + sigma2);
    return from_recursion(solve_linear_recursion(mu, beta, mu, n - 1));
}

TwoPointLargeL thresholds_two_point_large_L(double mu, double sigma2, double L, int n) {
    validate(AmbiguitySpec::two_point(mu, sigma2, L));
    check_n(n);
    if (L < 2.0 * mu) {
        throw Error(ErrorCode::PreconditionViolated, "large-L schedule needs L >= 2 mu");
    }
    const double second = mu * mu + sigma2;
    const double left_beta = sigma2 / second;
    const double gap2 = (L - mu) * (L - mu);
    const double right_beta = gap2 / (gap2 + sigma2);
    const double right_alpha = L * sigma2 / (gap2 + sigma2);
    // Lower support point of the right-endpoint member; below it the
    // continuation value is just the mean.
    const double right_low = mu - sigma2 / (L - mu);

    TwoPointLargeL out;
    auto& s = out.schedule;
    auto& tp = out.turning_point;
    s.n = n;
    s.values.assign(static_cast<std::size_t>(n) + 1, 0.0);
    tp.left_values.assign(static_cast<std::size_t>(n) + 1, 0.0);
    tp.right_values.assign(static_cast<std::size_t>(n) + 1, 0.0);

    for (int i = n - 1; i >= 0; --i) {
        const double next = s.values[i + 1];
        const double left = sigma2 == 0.0 ? mu : mu + left_beta * next;
        const double right = sigma2 == 0.0 ? mu : (next >= right_low ? right_alpha + right_beta * next : mu);
        tp.left_values[i] = left;
        tp.right_values[i] = right;
        const bool left_wins = left < right - kTieTolerance * std::max(1.0, std::abs(right));
        s.values[i] = left_wins ? left : right;
        if (left_wins && !tp.switch_index) tp.switch_index = i;
    }
    if (tp.switch_index) tp.n0 = n - *tp.switch_index;
    return out;
}

ThresholdSchedule thresholds_mvs_general(double mu, double sigma2, double L, int n) {
    validate(AmbiguitySpec::mean_var_support(mu, sigma2, L));
    check_n(n);
    return from_recursion(solve_linear_recursion((mu * mu + sigma2) / L, 1.0 - mu / L, mu, n - 1));
}

ThresholdSchedule thresholds_mad(double mu, double d, int n, std::optional<double> L) {
    if (L) {
        validate(AmbiguitySpec::mean_mad_support(mu, d, *L));
    } else {
        validate(AmbiguitySpec::mean_mad(mu, d));
    }
    check_n(n);
    if (d >= 2.0 * mu) throw Error(ErrorCode::PreconditionViolated, "MAD schedule needs d < 2 mu");
    return from_recursion(solve_linear_recursion(mu, d / (2.0 * mu), mu, n - 1));
}

ThresholdSchedule closed_form_thresholds(const ValidatedSpec& spec, int n) {
    const double mu = spec.mu();
    switch (spec.kind()) {
        case AmbiguityKind::MeanOnly:
        case AmbiguityKind::MeanVariance:
            check_n(n);
            return from_recursion(std::vector<double>(static_cast<std::size_t>(n), mu));
        case AmbiguityKind::TwoPointMeanVarSupport:
            if (spec.upper() <= 2.0 * mu) return thresholds_two_point_small_L(mu, spec.sigma2(), spec.upper(), n);
            return thresholds_two_point_large_L(mu, spec.sigma2(), spec.upper(), n).schedule;
        case AmbiguityKind::MeanVarSupport:
            return thresholds_mvs_general(mu, spec.sigma2(), spec.upper(), n);
        case AmbiguityKind::MeanMad:
            return thresholds_mad(mu, spec.mad(), n);
        case AmbiguityKind::MeanMadSupport:
            return thresholds_mad(mu, spec.mad(), n, spec.upper());
    }
    throw Error(ErrorCode::InvalidParameter, "unknown ambiguity kind");
}

double asymptotic_payoff(const ValidatedSpec& spec) {
    const double mu = spec.mu();
    if (uses_variance(spec.kind()) && uses_support(spec.kind())) return mu + spec.sigma2() / mu;
    if (uses_mad(spec.kind())) return 2.0 * mu * mu / (2.0 * mu - spec.mad());
    return mu;
}

std::optional<std::string> schedule_violation(const ThresholdSchedule& s, double mu, double ceiling, double tol) {
    std::ostringstream msg;
    msg.precision(17);
    if (s.n < 1 || s.values.size() != static_cast<std::size_t>(s.n) + 1) {
        msg << "schedule size " << s.values.size() << " does not match n = " << s.n;
        return msg.str();
    }
    if (s.values[s.n] != 0.0) {
        msg << "T(n) = " << s.values[s.n] << " != 0";
        return msg.str();
    }
    if (std::abs(s.values[s.n - 1] - mu) > tol * std::max(1.0, mu)) {
        msg << "T(n-1) = " << s.values[s.n - 1] << " != mu = " << mu;
        return msg.str();
    }
    for (int i = 0; i < s.n; ++i) {
        const double t = s.values[i];
        if (t < s.values[i + 1] - tol) {
            msg << "T(" << i << ") = " << t << " < T(" << i + 1 << ") = " << s.values[i + 1];
            return msg.str();
        }
        if (t < mu - tol || t > ceiling + tol) {
            msg << "T(" << i << ") = " << t << " outside [" << mu << ", " << ceiling << "]";
            return msg.str();
        }
    }
    return std::nullopt;
}

std::vector<WorstCaseMassRow> worst_case_mass_path(double mu, double sigma2, double L, int n) {
    const ThresholdSchedule s = thresholds_mvs_general(mu, sigma2, L, n);
    std::vector<WorstCaseMassRow> rows;
    for (int i = 0; i + 2 <= n; ++i) {
        const double xi = s.values[i + 1];
        const auto p = cox_three_point_masses(mu, sigma2, L, xi);
        rows.push_back({i, xi, p[0], p[1], p[2]});
    }
    return rows;
}

}  // namespace drstop
