#pragma once

// Tight upper bounds on E[min(xi, X)] over mean-variance-support and
// mean-MAD-support ambiguity sets. Each bound comes with a certificate: an
// extremal member of the set attaining the bound (primal) and a majorant
// lambda0 + lambda1*x + lambda2*phi(x) >= min(xi, x) whose moment-weighted
// value equals the bound (dual).

#include "drstop/ambiguity.hpp"

#include <array>
#include <optional>
#include <string>

namespace drstop {

enum class MajorantBasis {
    Polynomial2,  // 1, x, x^2
    MadBasis,     // 1, x, |x - center|
};

std::string_view to_string(MajorantBasis basis);

struct Majorant {
    MajorantBasis basis = MajorantBasis::Polynomial2;
    double center = 0.0;  // only used by MadBasis
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;

    [[nodiscard]] double evaluate(double x) const;
    /// lambda0 + lambda1*mu + lambda2*q2 where q2 = E[phi(X)] (mu^2 + sigma^2, or the MAD).
    [[nodiscard]] double dual_objective(double mu, double q2) const { return lambda0 + lambda1 * mu + lambda2 * q2; }
};

enum class BreakpointSource { Statement, Proof, Both };
std::string_view to_string(BreakpointSource source);

/// The lower MAD breakpoint has two published forms:
///   statement: mu - d(L - mu) / (2(L - mu) - d)
///   proof:     mu - d L / (2(L - mu))
/// Below mu both adjacent regimes are evaluated and the larger primal-feasible
/// value wins; this records which form agreed with the outcome.
struct MadBreakpointDiagnostic {
    double xi1_statement = 0.0;
    double xi1_proof = 0.0;
    bool in_disputed_band = false;
    BreakpointSource consistent_with = BreakpointSource::Both;
};

namespace regime {
inline constexpr int kDegenerate = 0;
// variance family
inline constexpr int kCoxLower = 1;
inline constexpr int kCoxMiddle = 2;
inline constexpr int kCoxUpper = 3;
// MAD family
inline constexpr int kMadLower = 1;
inline constexpr int kMadLowerMiddle = 2;
inline constexpr int kMadUpperMiddle = 3;
inline constexpr int kMadUpper = 4;
}  // namespace regime

struct MomentBoundCertificate {
    double value = 0.0;
    int regime = 0;
    std::string regime_name;
    DiscreteDistribution primal = DiscreteDistribution::point_mass(0.0);
    Majorant dual;
    double xi = 0.0;
    std::optional<MadBreakpointDiagnostic> breakpoint;
};

/// max E[min(xi, X)] over mean mu, variance sigma2, support [0, L].
double cox_upper_bound(double mu, double sigma2, double L, double xi);
MomentBoundCertificate cox_worst_case(double mu, double sigma2, double L, double xi);

/// The three masses on {0, xi, L} of the middle-regime extremal distribution,
/// unclamped. Defined for 0 < xi < L.
std::array<double, 3> cox_three_point_masses(double mu, double sigma2, double L, double xi);

/// max E[min(xi, X)] over mean mu, MAD d, support [0, L]. L may be kInfinity,
/// in which case only xi = 0 and xi >= mu are supported.
double mad_upper_bound(double mu, double d, double L, double xi);
MomentBoundCertificate mad_worst_case(double mu, double d, double L, double xi);

/// max over a uniform grid of [0, L] of min(xi, x) - m(x). Non-positive means feasible.
double check_majorant(const Majorant& m, double xi, double L, int grid_points);

/// Claimed minimum of P(X >= mu + sigma2/mu - eps) over the mean-variance-support
/// set: eps / (L (L - mu - sigma2/mu)). Requires sigma2 < mu(L - mu).
double tail_lower_bound(double mu, double sigma2, double L, double eps);

/// Infimum of P(X >= t) for t = mu + sigma2/mu - eps, approached by mass on
/// {0, t-, L}: mu*eps / (L (L - t)). Only valid while the mass left at 0 is
/// non-negative; larger eps throws PreconditionViolated.
double tail_probability_infimum(double mu, double sigma2, double L, double eps);

struct TwoPointBound {
    double value = 0.0;  // max E[min(xi, X)] over two-point members
    double p = 0.0;      // mass on the lower point of the maximizing member
    DiscreteDistribution member = DiscreteDistribution::point_mass(0.0);
};

/// Two-point analogue of the bounds above. The extremum sits at an endpoint of
/// the feasible p interval whenever xi == 0 or xi >= mu, which is the only
/// range accepted.
TwoPointBound two_point_upper_bound(double mu, double sigma2, double L, double xi);

/// Bound for any spec kind. MeanOnly and MeanVariance give min(xi, mu).
double moment_upper_bound(const ValidatedSpec& spec, double xi);

/// Certificate for MeanOnly, MeanVarSupport, MeanMad and MeanMadSupport.
/// MeanVariance has no attaining member; TwoPoint has no linear dual. Both
/// throw PreconditionViolated.
MomentBoundCertificate worst_case_certificate(const ValidatedSpec& spec, double xi);

}  // namespace drstop
