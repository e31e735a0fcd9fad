#include "drstop/oracle.hpp"

#include "drstop/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace drstop {

namespace {

constexpr double kFeasibilityTolerance = 1e-10;

struct MomentProblem {
    double mu = 0.0;
    double q2 = 0.0;  // E[phi(X)]
    bool mad = false;
    bool pairs_only = false;

    [[nodiscard]] double phi(double x) const { return mad ? std::abs(x - mu) : x * x; }
};

std::vector<double> candidate_points(double L, int grid_points, std::initializer_list<double> exact) {
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(grid_points) + exact.size());
    for (int k = 0; k < grid_points; ++k) {
        pts.push_back(k == grid_points - 1 ? L : L * static_cast<double>(k) / static_cast<double>(grid_points - 1));
    }
    for (double x : exact) {
        if (x >= 0.0 && x <= L) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    const double tol = DiscreteDistribution::kMergeTolerance * std::max(1.0, L);
    std::vector<double> out;
    for (double x : pts) {
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    }
    return out;
}

bool feasible(double p) { return p >= -kFeasibilityTolerance && p <= 1.0 + kFeasibilityTolerance; }

/// Optimizes sum p_i f(x_i) over supports of size <= 3 drawn from pts.
/// sense = +1 maximizes, -1 minimizes. The first optimum in lexicographic order wins.
template <typename F>
GridSearchResult enumerate(const MomentProblem& prob, const std::vector<double>& pts, F objective, double sense) {
    const double residual_tol = kFeasibilityTolerance * std::max(1.0, std::abs(prob.q2));
    GridSearchResult best;
    best.best_value = -sense * kInfinity;
    bool found = false;

    auto consider = [&](std::vector<Atom> atoms) {
        double v = 0.0;
        for (const auto& a : atoms) v += a.prob * objective(a.point);
        if (!found || sense * v > sense * best.best_value) {
            found = true;
            best.best_value = v;
            best.atoms = std::move(atoms);
        }
    };

    const std::size_t m = pts.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double x = pts[i];
        if (std::abs(x - prob.mu) <= 1e-15 * std::max(1.0, prob.mu) &&
            std::abs(prob.phi(x) - prob.q2) <= residual_tol) {
            consider({{x, 1.0}});
        }
        for (std::size_t j = i + 1; j < m; ++j) {
            const double y = pts[j];
            // mass and mean fix the pair; phi is checked as a residual
            const double py = (prob.mu - x) / (y - x);
            const double px = 1.0 - py;
            if (!feasible(px) || !feasible(py)) continue;
            if (std::abs(px * prob.phi(x) + py * prob.phi(y) - prob.q2) > residual_tol) continue;
            consider({{x, px}, {y, py}});
        }
    }
    if (!prob.pairs_only) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                for (std::size_t k = j + 1; k < m; ++k) {
                    const std::array<double, 3> x{pts[i], pts[j], pts[k]};
                    linalg::Mat3 a{};
                    for (int c = 0; c < 3; ++c) {
                        a[0][c] = 1.0;
                        a[1][c] = x[c];
                        a[2][c] = prob.phi(x[c]);
                    }
                    const linalg::Vec3 rhs{1.0, prob.mu, prob.q2};
                    const auto sol = linalg::solve3(a, rhs);
                    if (!sol) continue;
                    const auto& p = *sol;
                    if (!feasible(p[0]) || !feasible(p[1]) || !feasible(p[2])) continue;
                    bool ok = true;
                    for (int r = 0; r < 3 && ok; ++r) {
                        const double lhs = a[r][0] * p[0] + a[r][1] * p[1] + a[r][2] * p[2];
                        ok = std::abs(lhs - rhs[r]) <= residual_tol * std::max(1.0, std::abs(rhs[r]));
                    }
                    if (!ok) continue;
                    consider({{x[0], p[0]}, {x[1], p[1]}, {x[2], p[2]}});
                }
            }
        }
    }
    if (!found) throw Error(ErrorCode::NoFeasibleCandidate, "no feasible support among the enumerated points");
    best.best_arg = best.atoms.front().point;
    best.bracket = {best.atoms.front().point, best.atoms.back().point};
    return best;
}

}  // namespace

GridSearchResult grid_min_two_point(double T_next, double mu, double sigma, PInterval interval, int grid_points) {
    if (grid_points < 3) throw Error(ErrorCode::InvalidParameter, "grid_points must be >= 3");
    if (interval.lo > interval.hi) throw Error(ErrorCode::InvalidParameter, "empty p interval");
    GridSearchResult r;
    if (interval.degenerate || sigma == 0.0) {
        r.best_arg = interval.hi;
        r.best_value = std::max(T_next, mu);
        r.bracket = {interval.lo, interval.hi};
        return r;
    }
    const double width = interval.hi - interval.lo;
    r.grid_step = width / static_cast<double>(grid_points - 1);
    const int count = width == 0.0 ? 1 : grid_points;
    int best_k = 0;
    r.best_value = kInfinity;
    for (int k = 0; k < count; ++k) {
        const double p = k == count - 1 ? interval.hi : interval.lo + r.grid_step * k;
        const double v = two_point_continuation(T_next, mu, sigma, p);
        if (v < r.best_value) {
            r.best_value = v;
            r.best_arg = p;
            best_k = k;
        }
    }
    const int lo_k = std::max(0, best_k - 1);
    const int hi_k = std::min(count - 1, best_k + 1);
    r.bracket = {hi_k == lo_k ? interval.lo : interval.lo + r.grid_step * lo_k,
                 hi_k == count - 1 ? interval.hi : interval.lo + r.grid_step * hi_k};
    return r;
}

BoundOracle two_point_grid_oracle(double mu, double sigma2, double L, int grid_points) {
    validate(AmbiguitySpec::two_point(mu, sigma2, L));
    const double sigma = std::sqrt(sigma2);
    const PInterval iv = feasible_p_interval(mu, sigma, L);
    return [=](double xi) { return xi + mu - grid_min_two_point(xi, mu, sigma, iv, grid_points).best_value; };
}

GridSearchResult enumerate_extremal(const ValidatedSpec& spec, double xi, int grid_points) {
    if (grid_points < 3) throw Error(ErrorCode::InvalidParameter, "grid_points must be >= 3");
    const double L = spec.upper();
    if (!std::isfinite(L)) throw Error(ErrorCode::PreconditionViolated, "enumeration needs a finite support bound");
    if (!(xi >= 0.0 && xi <= L)) throw Error(ErrorCode::XiOutOfRange, "xi outside [0, L]");

    const double mu = spec.mu();
    MomentProblem prob;
    prob.mu = mu;
    double top = mu;
    double low = mu;
    if (uses_mad(spec.kind())) {
        prob.mad = true;
        prob.q2 = spec.mad();
        top = 2.0 * mu * mu / (2.0 * mu - spec.mad());
    } else {
        prob.q2 = mu * mu + spec.sigma2();
        top = mu + spec.sigma2() / mu;
        if (L > mu) low = std::max(0.0, mu - spec.sigma2() / (L - mu));
        prob.pairs_only = spec.kind() == AmbiguityKind::TwoPointMeanVarSupport;
    }
    const auto pts = candidate_points(L, grid_points, {0.0, xi, mu, L, top, low});
    GridSearchResult r = enumerate(prob, pts, [xi](double x) { return std::min(xi, x); }, 1.0);
    r.grid_step = L / static_cast<double>(grid_points - 1);
    return r;
}

GridSearchResult enumerate_tail_minimum(double mu, double sigma2, double L, double t, int grid_points) {
    if (grid_points < 3) throw Error(ErrorCode::InvalidParameter, "grid_points must be >= 3");
    validate(AmbiguitySpec::mean_var_support(mu, sigma2, L));
    MomentProblem prob;
    prob.mu = mu;
    prob.q2 = mu * mu + sigma2;
    const double below = t - 1e-9 * L;
    const auto pts = candidate_points(L, grid_points, {0.0, mu, L, t, below, mu + sigma2 / mu});
    GridSearchResult r = enumerate(prob, pts, [t](double x) { return x >= t ? 1.0 : 0.0; }, -1.0);
    r.grid_step = L / static_cast<double>(grid_points - 1);
    return r;
}

double CertificateReport::max_discrepancy() const {
    return std::max({membership, primal_gap, dual_gap, dual_violation});
}

CertificateReport verify_certificate(const MomentBoundCertificate& cert, const AmbiguitySpec& spec, int grid_points) {
    CertificateReport rep;
    const double xi = cert.xi;
    rep.membership = membership_discrepancy(cert.primal, spec);
    rep.primal_gap = std::abs(cert.primal.expect([xi](double x) { return std::min(xi, x); }) - cert.value);
    const double q2 =
        cert.dual.basis == MajorantBasis::MadBasis ? spec.dispersion_mad() : spec.mu * spec.mu + spec.variance();
    rep.dual_gap = std::abs(cert.dual.dual_objective(spec.mu, q2) - cert.value);
    double span = spec.upper();
    if (!std::isfinite(span)) span = 4.0 * std::max({xi, cert.primal.max_point(), spec.mu});
    rep.dual_violation = std::max(0.0, check_majorant(cert.dual, xi, span, std::max(grid_points, 2)));
    return rep;
}

}  // namespace drstop
