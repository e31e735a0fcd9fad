#include "drstop/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace drstop {

namespace {

struct KindName {
    AmbiguityKind kind;
    std::string_view canonical;
    std::string_view cli;
};

constexpr KindName kKindNames[] = {
    {AmbiguityKind::MeanOnly, "MeanOnly", "mean"},
    {AmbiguityKind::MeanVariance, "MeanVariance", "mean-variance"},
    {AmbiguityKind::TwoPointMeanVarSupport, "TwoPointMeanVarSupport", "two-point"},
    {AmbiguityKind::MeanVarSupport, "MeanVarSupport", "mean-var-support"},
    {AmbiguityKind::MeanMad, "MeanMad", "mean-mad"},
    {AmbiguityKind::MeanMadSupport, "MeanMadSupport", "mean-mad-support"},
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::InvalidParameter, std::string(name) + " must be finite");
    }
}

}  // namespace

std::string_view to_string(AmbiguityKind kind) {
    for (const auto& k : kKindNames) {
        if (k.kind == kind) return k.canonical;
    }
    return "Unknown";
}

std::optional<AmbiguityKind> parse_ambiguity_kind(std::string_view name) {
    for (const auto& k : kKindNames) {
        if (name == k.canonical || name == k.cli) return k.kind;
    }
    if (name == "mean-var" || name == "mv") return AmbiguityKind::MeanVariance;
    if (name == "mvs" || name == "general") return AmbiguityKind::MeanVarSupport;
    if (name == "mad") return AmbiguityKind::MeanMad;
    if (name == "mad-support") return AmbiguityKind::MeanMadSupport;
    return std::nullopt;
}

AmbiguitySpec AmbiguitySpec::mean_only(double mu) {
    return {AmbiguityKind::MeanOnly, mu, std::nullopt, std::nullopt, std::nullopt};
}
AmbiguitySpec AmbiguitySpec::mean_variance(double mu, double sigma2) {
    return {AmbiguityKind::MeanVariance, mu, sigma2, std::nullopt, std::nullopt};
}
AmbiguitySpec AmbiguitySpec::two_point(double mu, double sigma2, double L) {
    return {AmbiguityKind::TwoPointMeanVarSupport, mu, sigma2, std::nullopt, L};
}
AmbiguitySpec AmbiguitySpec::mean_var_support(double mu, double sigma2, double L) {
    return {AmbiguityKind::MeanVarSupport, mu, sigma2, std::nullopt, L};
}
AmbiguitySpec AmbiguitySpec::mean_mad(double mu, double mad) {
    return {AmbiguityKind::MeanMad, mu, std::nullopt, mad, std::nullopt};
}
AmbiguitySpec AmbiguitySpec::mean_mad_support(double mu, double mad, double L) {
    return {AmbiguityKind::MeanMadSupport, mu, std::nullopt, mad, L};
}

ValidatedSpec validate(const AmbiguitySpec& spec) {
    require_finite(spec.mu, "mu");
    if (!(spec.mu > 0.0)) throw Error(ErrorCode::InvalidParameter, "mu must be > 0, got " + fmt(spec.mu));

    const AmbiguityKind kind = spec.kind;
    if (uses_variance(kind)) {
        if (!spec.sigma2) throw Error(ErrorCode::InvalidParameter, "sigma2 is required for " + std::string(to_string(kind)));
        require_finite(*spec.sigma2, "sigma2");
        if (*spec.sigma2 < 0.0) throw Error(ErrorCode::InvalidParameter, "sigma2 must be >= 0, got " + fmt(*spec.sigma2));
    }
    if (uses_mad(kind)) {
        if (!spec.mad) throw Error(ErrorCode::InvalidParameter, "mad is required for " + std::string(to_string(kind)));
        require_finite(*spec.mad, "mad");
        if (*spec.mad < 0.0) throw Error(ErrorCode::InvalidParameter, "mad must be >= 0, got " + fmt(*spec.mad));
    }
    if (uses_support(kind)) {
        if (!spec.support_upper) throw Error(ErrorCode::InvalidParameter, "L is required for " + std::string(to_string(kind)));
        require_finite(*spec.support_upper, "L");
        if (!(*spec.support_upper > 0.0)) {
            throw Error(ErrorCode::InvalidParameter, "L must be > 0, got " + fmt(*spec.support_upper));
        }
    }

    // Fields that do not belong to the kind are dropped so that equal sets compare equal.
    AmbiguitySpec clean{kind, spec.mu, std::nullopt, std::nullopt, std::nullopt};
    if (uses_variance(kind)) clean.sigma2 = spec.sigma2;
    if (uses_mad(kind)) clean.mad = spec.mad;
    if (uses_support(kind)) clean.support_upper = spec.support_upper;

    const double mu = clean.mu;
    switch (kind) {
        case AmbiguityKind::MeanOnly:
        case AmbiguityKind::MeanVariance:
            break;
        case AmbiguityKind::TwoPointMeanVarSupport:
        case AmbiguityKind::MeanVarSupport: {
            const double s2 = *clean.sigma2;
            const double L = *clean.support_upper;
            if (!(s2 <= mu * (L - mu))) {
                throw Error(ErrorCode::EmptyAmbiguitySet,
                            "variance condition sigma2 <= mu*(L - mu) violated: " + fmt(s2) + " > " + fmt(mu * (L - mu)));
            }
            break;
        }
        case AmbiguityKind::MeanMad: {
            const double d = *clean.mad;
            if (!(d < 2.0 * mu)) {
                throw Error(ErrorCode::EmptyAmbiguitySet,
                            "MAD condition mad < 2*mu violated: " + fmt(d) + " >= " + fmt(2.0 * mu));
            }
            break;
        }
        case AmbiguityKind::MeanMadSupport: {
            const double d = *clean.mad;
            const double L = *clean.support_upper;
            if (!(d * L <= 2.0 * mu * (L - mu))) {
                throw Error(ErrorCode::EmptyAmbiguitySet, "MAD condition mad <= 2*mu*(L - mu)/L violated: " + fmt(d) +
                                                              " > " + fmt(2.0 * mu * (L - mu) / L));
            }
            break;
        }
    }
    return ValidatedSpec(clean);
}

DiscreteDistribution DiscreteDistribution::from_atoms(std::vector<Atom> atoms, double scale) {
    if (atoms.empty()) throw Error(ErrorCode::InvalidDistribution, "no atoms");
    for (const auto& a : atoms) {
        if (!std::isfinite(a.point) || !std::isfinite(a.prob)) {
            throw Error(ErrorCode::InvalidDistribution, "non-finite atom");
        }
        if (a.prob < -kClampTolerance) {
            throw Error(ErrorCode::InvalidDistribution, "negative probability " + fmt(a.prob));
        }
        if (a.prob > 1.0 + kSumTolerance) {
            throw Error(ErrorCode::InvalidDistribution, "probability above one " + fmt(a.prob));
        }
    }

    bool clamped = false;
    for (auto& a : atoms) {
        if (a.prob < 0.0) {
            a.prob = 0.0;
            clamped = true;
        }
    }

    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.point < y.point; });

    const double merge_tol = kMergeTolerance * std::max(1.0, std::isfinite(scale) ? scale : 1.0);
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (!merged.empty() && a.point - merged.back().point <= merge_tol) {
            Atom& m = merged.back();
            const double total = m.prob + a.prob;
            if (total > 0.0) m.point = (m.prob * m.point + a.prob * a.point) / total;
            m.prob = total;
        } else {
            merged.push_back(a);
        }
    }
    std::erase_if(merged, [](const Atom& a) { return a.prob == 0.0; });
    if (merged.empty()) throw Error(ErrorCode::InvalidDistribution, "all atoms have zero mass");

    double total = 0.0;
    for (const auto& a : merged) total += a.prob;
    if (std::abs(total - 1.0) > kSumTolerance) {
        throw Error(ErrorCode::InvalidDistribution, "probabilities sum to " + fmt(total));
    }
    if (clamped) {
        for (auto& a : merged) a.prob /= total;
    }
    return DiscreteDistribution(std::move(merged));
}

DiscreteDistribution DiscreteDistribution::point_mass(double x) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidDistribution, "non-finite point");
    return DiscreteDistribution({Atom{x, 1.0}});
}

double DiscreteDistribution::sample(double u) const {
    double cumulative = 0.0;
    for (const auto& a : atoms_) {
        cumulative += a.prob;
        if (u < cumulative) return a.point;
    }
    return atoms_.back().point;
}

Moments moments(const DiscreteDistribution& dist) {
    Moments m;
    m.mean = dist.expect([](double x) { return x; });
    const double mean = m.mean;
    m.variance = dist.expect([mean](double x) { return (x - mean) * (x - mean); });
    m.mad = dist.expect([mean](double x) { return std::abs(x - mean); });
    return m;
}

double membership_discrepancy(const DiscreteDistribution& dist, const AmbiguitySpec& spec) {
    const Moments m = moments(dist);
    double worst = std::abs(m.mean - spec.mu);
    if (uses_variance(spec.kind)) worst = std::max(worst, std::abs(m.variance - spec.variance()));
    if (uses_mad(spec.kind)) worst = std::max(worst, std::abs(m.mad - spec.dispersion_mad()));
    worst = std::max(worst, -dist.min_point());
    if (uses_support(spec.kind)) worst = std::max(worst, dist.max_point() - spec.upper());
    if (spec.kind == AmbiguityKind::TwoPointMeanVarSupport && dist.size() > 2) {
        worst = std::max(worst, 1.0);
    }
    return worst;
}

DiscreteDistribution two_point_from_p(double mu, double sigma, double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidParameter, "p must lie in (0, 1), got " + fmt(p));
    if (!(sigma >= 0.0) || !std::isfinite(mu)) throw Error(ErrorCode::InvalidParameter, "sigma must be >= 0");
    const double a = mu - std::sqrt((1.0 - p) / p) * sigma;
    const double b = mu + std::sqrt(p / (1.0 - p)) * sigma;
    if (a < -1e-12) {
        throw Error(ErrorCode::NegativeSupport, "lower support point " + fmt(a) + " is negative");
    }
    return DiscreteDistribution::from_atoms({{std::max(a, 0.0), p}, {b, 1.0 - p}}, b);
}

PInterval feasible_p_interval(double mu, double sigma, double L) {
    if (!(mu > 0.0) || !(sigma >= 0.0)) throw Error(ErrorCode::InvalidParameter, "need mu > 0 and sigma >= 0");
    if (!(L > mu)) throw Error(ErrorCode::InvalidParameter, "feasible p interval needs L > mu");
    if (sigma == 0.0) return {1.0, 1.0, true};
    const double s2 = sigma * sigma;
    const double lo = s2 / (s2 + mu * mu);
    const double gap = L - mu;
    const double hi = gap * gap / (gap * gap + s2);
    return {lo, std::max(lo, hi), false};
}

DiscreteDistribution witness_distribution(const AmbiguitySpec& raw) {
    const ValidatedSpec spec = validate(raw);
    const double mu = spec.mu();
    if (uses_variance(spec.kind())) {
        const double s2 = spec.sigma2();
        if (s2 == 0.0) return DiscreteDistribution::point_mass(mu);
        const double b = mu + s2 / mu;
        const double total = mu * mu + s2;
        return DiscreteDistribution::from_atoms({{0.0, s2 / total}, {b, mu * mu / total}}, b);
    }
    if (uses_mad(spec.kind())) {
        const double d = spec.mad();
        if (d == 0.0) return DiscreteDistribution::point_mass(mu);
        const double b = 2.0 * mu * mu / (2.0 * mu - d);
        const double q = d / (2.0 * mu);
        return DiscreteDistribution::from_atoms({{0.0, q}, {b, 1.0 - q}}, b);
    }
    return DiscreteDistribution::point_mass(mu);
}

}  // namespace drstop
