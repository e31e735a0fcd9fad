#pragma once

// Ambiguity sets over nonnegative offer distributions, described by which
// moments (mean, variance or mean absolute deviation) and which support
// upper bound are known, plus the finite-support distributions that every
// worst case in this library is expressed with.

#include "drstop/error.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace drstop {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class AmbiguityKind {
    MeanOnly,
    MeanVariance,
    TwoPointMeanVarSupport,
    MeanVarSupport,
    MeanMad,
    MeanMadSupport,
};

std::string_view to_string(AmbiguityKind kind);
/// Accepts the canonical names ("MeanVarSupport") and the CLI spellings ("mean-var-support", "two-point").
std::optional<AmbiguityKind> parse_ambiguity_kind(std::string_view name);

[[nodiscard]] constexpr bool uses_variance(AmbiguityKind k) {
    return k == AmbiguityKind::MeanVariance || k == AmbiguityKind::TwoPointMeanVarSupport ||
           k == AmbiguityKind::MeanVarSupport;
}
[[nodiscard]] constexpr bool uses_mad(AmbiguityKind k) {
    return k == AmbiguityKind::MeanMad || k == AmbiguityKind::MeanMadSupport;
}
[[nodiscard]] constexpr bool uses_support(AmbiguityKind k) {
    return k == AmbiguityKind::TwoPointMeanVarSupport || k == AmbiguityKind::MeanVarSupport ||
           k == AmbiguityKind::MeanMadSupport;
}

struct AmbiguitySpec {
    AmbiguityKind kind = AmbiguityKind::MeanOnly;
    double mu = 1.0;
    std::optional<double> sigma2;
    std::optional<double> mad;
    std::optional<double> support_upper;

    static AmbiguitySpec mean_only(double mu);
    static AmbiguitySpec mean_variance(double mu, double sigma2);
    static AmbiguitySpec two_point(double mu, double sigma2, double L);
    static AmbiguitySpec mean_var_support(double mu, double sigma2, double L);
    static AmbiguitySpec mean_mad(double mu, double mad);
    static AmbiguitySpec mean_mad_support(double mu, double mad, double L);

    /// Support upper bound, or +inf when the kind has none.
    [[nodiscard]] double upper() const { return support_upper.value_or(kInfinity); }
    [[nodiscard]] double variance() const { return sigma2.value_or(0.0); }
    [[nodiscard]] double dispersion_mad() const { return mad.value_or(0.0); }

    friend bool operator==(const AmbiguitySpec&, const AmbiguitySpec&) = default;
};

/// An AmbiguitySpec whose set is known to be non-empty. Only `validate` creates one.
class ValidatedSpec {
public:
    [[nodiscard]] const AmbiguitySpec& spec() const noexcept { return spec_; }
    [[nodiscard]] AmbiguityKind kind() const noexcept { return spec_.kind; }
    [[nodiscard]] double mu() const noexcept { return spec_.mu; }
    [[nodiscard]] double sigma2() const noexcept { return spec_.variance(); }
    [[nodiscard]] double mad() const noexcept { return spec_.dispersion_mad(); }
    [[nodiscard]] double upper() const noexcept { return spec_.upper(); }

private:
    explicit ValidatedSpec(AmbiguitySpec spec) : spec_(spec) {}
    friend ValidatedSpec validate(const AmbiguitySpec& spec);
    AmbiguitySpec spec_;
};

/// Checks parameter signs and the non-emptiness inequality for the kind,
/// exactly (no tolerance). Throws InvalidParameter or EmptyAmbiguitySet.
ValidatedSpec validate(const AmbiguitySpec& spec);

struct Atom {
    double point = 0.0;
    double prob = 0.0;
    friend bool operator==(const Atom&, const Atom&) = default;
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double mad = 0.0;
};

/// Finite-support distribution with strictly increasing points and
/// probabilities summing to one.
class DiscreteDistribution {
public:
    static constexpr double kSumTolerance = 1e-12;
    static constexpr double kClampTolerance = 1e-15;
    static constexpr double kMergeTolerance = 1e-12;

    /// Sorts, merges atoms closer than kMergeTolerance * max(1, scale),
    /// clamps probabilities in [-1e-15, 0) to zero (renormalizing) and drops
    /// zero-mass atoms. Throws InvalidDistribution when the invariants cannot be met.
    static DiscreteDistribution from_atoms(std::vector<Atom> atoms, double scale = 1.0);
    static DiscreteDistribution point_mass(double x);

    [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }
    [[nodiscard]] double min_point() const { return atoms_.front().point; }
    [[nodiscard]] double max_point() const { return atoms_.back().point; }

    /// Sum of p_i * f(x_i).
    template <typename F>
    [[nodiscard]] double expect(F&& f) const {
        double s = 0.0;
        for (const auto& a : atoms_) s += a.prob * f(a.point);
        return s;
    }

    /// Inverse-CDF draw for a uniform u in [0, 1).
    [[nodiscard]] double sample(double u) const;

    friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

private:
    explicit DiscreteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}
    std::vector<Atom> atoms_;
};

Moments moments(const DiscreteDistribution& dist);

/// Largest absolute deviation between the distribution's moments and those
/// `spec` prescribes, including support violations (distance outside [0, L]).
double membership_discrepancy(const DiscreteDistribution& dist, const AmbiguitySpec& spec);

/// Two-point distribution {(a, p), (b, 1-p)} with mean mu and standard deviation sigma.
DiscreteDistribution two_point_from_p(double mu, double sigma, double p);

struct PInterval {
    double lo = 0.0;
    double hi = 0.0;
    /// sigma == 0: the set is the point mass at mu and no two-point member exists.
    bool degenerate = false;
};

/// Range of p for which the two-point member stays inside [0, L].
PInterval feasible_p_interval(double mu, double sigma, double L);

/// A canonical member of the ambiguity set (the two-point "all or nothing"
/// distribution for dispersion kinds, the point mass otherwise).
DiscreteDistribution witness_distribution(const AmbiguitySpec& spec);

}  // namespace drstop
