#include "drstop/momentbound.hpp"

#include "drstop/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace drstop {

namespace {

constexpr double kTripleTolerance = 1e-12;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void check_xi(double xi, double L) {
    if (!std::isfinite(xi) || xi < 0.0 || xi > L) {
        throw Error(ErrorCode::XiOutOfRange, "xi = " + fmt(xi) + " outside [0, " + fmt(L) + "]");
    }
}

/// Masses on `points` matching total mass, mean and E[phi(X)] = q2.
template <typename Phi>
std::array<double, 3> solve_support(const std::array<double, 3>& points, double mu, double q2, Phi phi) {
    linalg::Mat3 a{};
    for (int j = 0; j < 3; ++j) {
        a[0][j] = 1.0;
        a[1][j] = points[j];
        a[2][j] = phi(points[j]);
    }
    auto sol = linalg::solve3(a, {1.0, mu, q2});
    if (!sol) {
        throw Error(ErrorCode::InfeasibleSupportTriple, "singular moment system on {" + fmt(points[0]) + ", " +
                                                            fmt(points[1]) + ", " + fmt(points[2]) + "}");
    }
    return *sol;
}

bool masses_feasible(const std::array<double, 3>& p) {
    return std::all_of(p.begin(), p.end(),
                       [](double q) { return q >= -kTripleTolerance && q <= 1.0 + kTripleTolerance; });
}

DiscreteDistribution distribution_on(const std::array<double, 3>& points, const std::array<double, 3>& probs,
                                     double scale) {
    if (!masses_feasible(probs)) {
        throw Error(ErrorCode::InfeasibleSupportTriple, "support {" + fmt(points[0]) + ", " + fmt(points[1]) + ", " +
                                                            fmt(points[2]) + "} gives masses (" + fmt(probs[0]) +
                                                            ", " + fmt(probs[1]) + ", " + fmt(probs[2]) + ")");
    }
    std::vector<Atom> atoms;
    for (int j = 0; j < 3; ++j) atoms.push_back({points[j], std::clamp(probs[j], 0.0, 1.0)});
    double total = 0.0;
    for (const auto& a : atoms) total += a.prob;
    for (auto& a : atoms) a.prob /= total;
    return DiscreteDistribution::from_atoms(std::move(atoms), scale);
}

void validate_variance_params(double mu, double sigma2, double L) {
    validate(AmbiguitySpec::mean_var_support(mu, sigma2, L));
}

void validate_mad_params(double mu, double d, double L) {
    if (std::isinf(L)) {
        validate(AmbiguitySpec::mean_mad(mu, d));
    } else {
        validate(AmbiguitySpec::mean_mad_support(mu, d, L));
    }
}

MomentBoundCertificate degenerate_certificate(double mu, double xi, MajorantBasis basis) {
    MomentBoundCertificate c;
    c.xi = xi;
    c.regime = regime::kDegenerate;
    c.regime_name = "degenerate";
    c.primal = DiscreteDistribution::point_mass(mu);
    c.value = std::min(xi, mu);
    c.dual.basis = basis;
    c.dual.center = basis == MajorantBasis::MadBasis ? mu : 0.0;
    if (xi <= mu) {
        c.dual.lambda0 = xi;
    } else {
        c.dual.lambda1 = 1.0;
    }
    return c;
}

double cox_lower_breakpoint(double mu, double sigma2, double L) { return mu - sigma2 / (L - mu); }
double cox_upper_breakpoint(double mu, double sigma2) { return mu + sigma2 / mu; }

double mad_xi1_statement(double mu, double d, double L) { return mu - d * (L - mu) / (2.0 * (L - mu) - d); }
double mad_xi1_proof(double mu, double d, double L) { return mu - d * L / (2.0 * (L - mu)); }
double mad_xi2(double mu, double d) { return mu + d * mu / (2.0 * mu - d); }

MomentBoundCertificate mad_lower(double mu, double d, double L, double xi) {
    const auto phi = [mu](double x) { return std::abs(x - mu); };
    const std::array<double, 3> pts{xi, mu, L};
    MomentBoundCertificate c;
    c.xi = xi;
    c.regime = regime::kMadLower;
    c.regime_name = "lower";
    c.primal = distribution_on(pts, solve_support(pts, mu, d, phi), L);
    c.value = xi;
    c.dual = {MajorantBasis::MadBasis, mu, xi, 0.0, 0.0};
    return c;
}

std::array<double, 3> mad_lower_middle_masses(double mu, double d, double L, double xi) {
    const double gap = L - mu;
    const double p0 = 1.0 - mu / xi + d * (L - xi) / (2.0 * xi * gap);
    const double pxi = mu / xi - d * L / (2.0 * xi * gap);
    const double pL = d / (2.0 * gap);
    return {p0, pxi, pL};
}

MomentBoundCertificate mad_lower_middle(double mu, double d, double L, double xi) {
    const double gap = L - mu;
    MomentBoundCertificate c;
    c.xi = xi;
    c.regime = regime::kMadLowerMiddle;
    c.regime_name = "lower-middle";
    c.primal = distribution_on({0.0, xi, L}, mad_lower_middle_masses(mu, d, L, xi), L);
    c.value = mu - d * (L - xi) / (2.0 * gap);
    c.dual = {MajorantBasis::MadBasis, mu, mu * (L - xi) / (2.0 * gap), (L + xi - 2.0 * mu) / (2.0 * gap),
              -(L - xi) / (2.0 * gap)};
    return c;
}

}  // namespace

std::string_view to_string(MajorantBasis basis) {
    return basis == MajorantBasis::Polynomial2 ? "Polynomial2" : "MadBasis";
}

std::string_view to_string(BreakpointSource source) {
    switch (source) {
        case BreakpointSource::Statement: return "statement";
        case BreakpointSource::Proof: return "proof";
        case BreakpointSource::Both: return "both";
    }
    return "unknown";
}

double Majorant::evaluate(double x) const {
    const double phi = basis == MajorantBasis::Polynomial2 ? x * x : std::abs(x - center);
    return lambda0 + lambda1 * x + lambda2 * phi;
}

double cox_upper_bound(double mu, double sigma2, double L, double xi) {
    validate_variance_params(mu, sigma2, L);
    check_xi(xi, L);
    if (sigma2 == 0.0) return std::min(xi, mu);
    if (xi <= cox_lower_breakpoint(mu, sigma2, L)) return xi;
    if (xi <= cox_upper_breakpoint(mu, sigma2)) return (mu * (L + xi) - (mu * mu + sigma2)) / L;
    return mu;
}

std::array<double, 3> cox_three_point_masses(double mu, double sigma2, double L, double xi) {
    const double second = mu * mu + sigma2;
    return {(L * xi - (L + xi) * mu + second) / (L * xi), (L * mu - second) / ((L - xi) * xi),
            (second - xi * mu) / ((L - xi) * L)};
}

MomentBoundCertificate cox_worst_case(double mu, double sigma2, double L, double xi) {
    validate_variance_params(mu, sigma2, L);
    check_xi(xi, L);
    if (sigma2 == 0.0) return degenerate_certificate(mu, xi, MajorantBasis::Polynomial2);

    const double second = mu * mu + sigma2;
    const auto square = [](double x) { return x * x; };
    MomentBoundCertificate c;
    c.xi = xi;
    c.dual.basis = MajorantBasis::Polynomial2;

    if (xi <= cox_lower_breakpoint(mu, sigma2, L)) {
        const std::array<double, 3> pts{xi, mu, L};
        c.regime = regime::kCoxLower;
        c.regime_name = "lower";
        c.primal = distribution_on(pts, solve_support(pts, mu, second, square), L);
        c.value = xi;
        c.dual.lambda0 = xi;
    } else if (xi <= cox_upper_breakpoint(mu, sigma2)) {
        c.regime = regime::kCoxMiddle;
        c.regime_name = "middle";
        if (L - xi <= DiscreteDistribution::kMergeTolerance * std::max(1.0, L)) {
            // xi and L coincide: only the two-point member on {0, L} remains.
            c.primal = DiscreteDistribution::from_atoms({{0.0, 1.0 - mu / L}, {L, mu / L}}, L);
        } else {
            c.primal = distribution_on({0.0, xi, L}, cox_three_point_masses(mu, sigma2, L, xi), L);
        }
        c.value = (mu * (L + xi) - second) / L;
        c.dual.lambda1 = (L + xi) / L;
        c.dual.lambda2 = -1.0 / L;
    } else {
        const std::array<double, 3> pts{0.0, mu, xi};
        c.regime = regime::kCoxUpper;
        c.regime_name = "upper";
        c.primal = distribution_on(pts, solve_support(pts, mu, second, square), L);
        c.value = mu;
        c.dual.lambda1 = 1.0;
    }
    return c;
}

double mad_upper_bound(double mu, double d, double L, double xi) {
    return mad_worst_case(mu, d, L, xi).value;
}

MomentBoundCertificate mad_worst_case(double mu, double d, double L, double xi) {
    validate_mad_params(mu, d, L);
    check_xi(xi, L);
    if (d == 0.0) return degenerate_certificate(mu, xi, MajorantBasis::MadBasis);

    const double xi2 = mad_xi2(mu, d);
    const bool unbounded = std::isinf(L);

    if (unbounded && xi == 0.0) {
        MomentBoundCertificate c;
        c.xi = 0.0;
        c.regime = regime::kMadLower;
        c.regime_name = "lower";
        c.primal = witness_distribution(AmbiguitySpec::mean_mad(mu, d));
        c.value = 0.0;
        c.dual = {MajorantBasis::MadBasis, mu, 0.0, 0.0, 0.0};
        return c;
    }

    if (xi > mu || (unbounded && xi == mu)) {
        MomentBoundCertificate c;
        c.xi = xi;
        if (xi <= xi2) {
            const double q = d / (2.0 * mu);
            c.regime = regime::kMadUpperMiddle;
            c.regime_name = "upper-middle";
            c.primal = DiscreteDistribution::from_atoms({{0.0, q}, {xi2, 1.0 - q}}, xi2);
            c.value = xi - d * xi / (2.0 * mu);
            c.dual = {MajorantBasis::MadBasis, mu, xi / 2.0, xi / (2.0 * mu), -xi / (2.0 * mu)};
        } else {
            const std::array<double, 3> pts{0.0, mu, xi};
            c.regime = regime::kMadUpper;
            c.regime_name = "upper";
            c.primal = distribution_on(pts, solve_support(pts, mu, d, [mu](double x) { return std::abs(x - mu); }),
                                       unbounded ? xi : L);
            c.value = mu;
            c.dual = {MajorantBasis::MadBasis, mu, 0.0, 1.0, 0.0};
        }
        return c;
    }

    if (unbounded) {
        throw Error(ErrorCode::XiOutOfRange,
                    "MAD bound without a support upper bound is only defined for xi = 0 or xi >= mu, got " + fmt(xi));
    }

    // Below mu: the two published breakpoints disagree, so evaluate both
    // adjacent regimes and keep the larger value whose primal is feasible.
    MadBreakpointDiagnostic diag;
    diag.xi1_statement = mad_xi1_statement(mu, d, L);
    diag.xi1_proof = mad_xi1_proof(mu, d, L);
    diag.in_disputed_band = xi > std::min(diag.xi1_statement, diag.xi1_proof) &&
                            xi <= std::max(diag.xi1_statement, diag.xi1_proof);

    std::optional<MomentBoundCertificate> lower;
    std::optional<MomentBoundCertificate> middle;
    try {
        lower = mad_lower(mu, d, L, xi);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InfeasibleSupportTriple) throw;
    }
    if (xi > 0.0 && masses_feasible(mad_lower_middle_masses(mu, d, L, xi))) {
        middle = mad_lower_middle(mu, d, L, xi);
    }
    if (!lower && !middle) {
        throw Error(ErrorCode::InfeasibleSupportTriple, "no feasible MAD extremal distribution at xi = " + fmt(xi));
    }

    MomentBoundCertificate chosen;
    if (lower && middle) {
        chosen = middle->value > lower->value ? *middle : *lower;
    } else {
        chosen = lower ? *lower : *middle;
    }

    const bool statement_says_lower = xi <= diag.xi1_statement;
    const bool proof_says_lower = xi <= diag.xi1_proof;
    const bool chose_lower = chosen.regime == regime::kMadLower;
    const bool statement_ok = statement_says_lower == chose_lower || (lower && middle);
    const bool proof_ok = proof_says_lower == chose_lower || (lower && middle);
    if (statement_ok && proof_ok) {
        diag.consistent_with = BreakpointSource::Both;
    } else if (statement_ok) {
        diag.consistent_with = BreakpointSource::Statement;
    } else {
        diag.consistent_with = BreakpointSource::Proof;
    }
    chosen.breakpoint = diag;
    return chosen;
}

double check_majorant(const Majorant& m, double xi, double L, int grid_points) {
    if (grid_points < 2) throw Error(ErrorCode::InvalidParameter, "grid_points must be >= 2");
    if (!std::isfinite(L) || L < 0.0) throw Error(ErrorCode::InvalidParameter, "check_majorant needs finite L >= 0");
    double worst = -kInfinity;
    const double step = L / static_cast<double>(grid_points - 1);
    for (int k = 0; k < grid_points; ++k) {
        const double x = k == grid_points - 1 ? L : step * k;
        worst = std::max(worst, std::min(xi, x) - m.evaluate(x));
    }
    return worst;
}

double tail_lower_bound(double mu, double sigma2, double L, double eps) {
    const double top = mu + sigma2 / mu;
    const double denom = L * (L - top);
    if (!(denom > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "tail bound needs sigma2 < mu*(L - mu); L - mu - sigma2/mu = " +
                                                     fmt(L - top));
    }
    if (!(eps > 0.0 && eps <= top)) {
        throw Error(ErrorCode::InvalidParameter, "eps must lie in (0, mu + sigma2/mu], got " + fmt(eps));
    }
    return eps / denom;
}

double tail_probability_infimum(double mu, double sigma2, double L, double eps) {
    validate_variance_params(mu, sigma2, L);
    const double top = mu + sigma2 / mu;
    if (!(eps > 0.0 && eps < top)) {
        throw Error(ErrorCode::InvalidParameter, "eps must lie in (0, mu + sigma2/mu), got " + fmt(eps));
    }
    const double t = top - eps;
    const double pL = mu * eps / (L * (L - t));
    const double pt = mu * (L - t - eps) / (t * (L - t));
    if (1.0 - pt - pL < -1e-12) {
        throw Error(ErrorCode::PreconditionViolated,
                    "eps too large: the {0, t, L} construction is infeasible for t = " + fmt(t));
    }
    return pL;
}

TwoPointBound two_point_upper_bound(double mu, double sigma2, double L, double xi) {
    validate(AmbiguitySpec::two_point(mu, sigma2, L));
    check_xi(xi, L);
    if (sigma2 == 0.0) return {std::min(xi, mu), 1.0, DiscreteDistribution::point_mass(mu)};
    if (xi > 0.0 && xi < mu) {
        throw Error(ErrorCode::XiOutOfRange, "two-point bound needs xi == 0 or xi >= mu, got " + fmt(xi));
    }
    const double sigma = std::sqrt(sigma2);
    const PInterval iv = feasible_p_interval(mu, sigma, L);
    const auto member_at = [&](double p) {
        if (p == iv.lo) return witness_distribution(AmbiguitySpec::two_point(mu, sigma2, L));
        return two_point_from_p(mu, sigma, p);
    };
    TwoPointBound best{-kInfinity, 0.0, DiscreteDistribution::point_mass(mu)};
    // Right endpoint first so that ties keep it.
    for (double p : {iv.hi, iv.lo}) {
        DiscreteDistribution member = member_at(p);
        const double v = member.expect([xi](double x) { return std::min(xi, x); });
        if (v > best.value) best = {v, p, std::move(member)};
    }
    return best;
}

double moment_upper_bound(const ValidatedSpec& spec, double xi) {
    switch (spec.kind()) {
        case AmbiguityKind::MeanOnly:
        case AmbiguityKind::MeanVariance:
            if (!(xi >= 0.0)) throw Error(ErrorCode::XiOutOfRange, "xi must be >= 0");
            return std::min(xi, spec.mu());
        case AmbiguityKind::TwoPointMeanVarSupport:
            return two_point_upper_bound(spec.mu(), spec.sigma2(), spec.upper(), xi).value;
        case AmbiguityKind::MeanVarSupport:
            return cox_upper_bound(spec.mu(), spec.sigma2(), spec.upper(), xi);
        case AmbiguityKind::MeanMad:
        case AmbiguityKind::MeanMadSupport:
            return mad_upper_bound(spec.mu(), spec.mad(), spec.upper(), xi);
    }
    throw Error(ErrorCode::InvalidParameter, "unknown ambiguity kind");
}

MomentBoundCertificate worst_case_certificate(const ValidatedSpec& spec, double xi) {
    switch (spec.kind()) {
        case AmbiguityKind::MeanOnly:
            if (!(xi >= 0.0)) throw Error(ErrorCode::XiOutOfRange, "xi must be >= 0");
            return degenerate_certificate(spec.mu(), xi, MajorantBasis::Polynomial2);
        case AmbiguityKind::MeanVariance:
            if (spec.sigma2() == 0.0) return degenerate_certificate(spec.mu(), xi, MajorantBasis::Polynomial2);
            throw Error(ErrorCode::PreconditionViolated,
                        "the mean-variance bound min(xi, mu) is a supremum with no attaining member");
        case AmbiguityKind::TwoPointMeanVarSupport:
            throw Error(ErrorCode::PreconditionViolated, "two-point sets have no linear dual certificate");
        case AmbiguityKind::MeanVarSupport:
            return cox_worst_case(spec.mu(), spec.sigma2(), spec.upper(), xi);
        case AmbiguityKind::MeanMad:
        case AmbiguityKind::MeanMadSupport:
            return mad_worst_case(spec.mu(), spec.mad(), spec.upper(), xi);
    }
    throw Error(ErrorCode::InvalidParameter, "unknown ambiguity kind");
}

}  // namespace drstop
