#pragma once

// Brute-force checks for the closed forms: grid search over the two-point
// parameter p, support enumeration for the moment problems, and certificate
// verification.

#include "drstop/ambiguity.hpp"
#include "drstop/momentbound.hpp"
#include "drstop/thresholds.hpp"

#include <utility>
#include <vector>

namespace drstop {

struct GridSearchResult {
    /// The minimizing p for grid_min_two_point; the smallest support point of
    /// the optimizer for the enumeration searches.
    double best_arg = 0.0;
    double best_value = 0.0;
    double grid_step = 0.0;
    std::pair<double, double> bracket;
    std::vector<Atom> atoms;  // optimizer support, enumeration only
};

/// min over a uniform p grid (endpoints included) of E[max(T_next, X)] for the
/// two-point member with lower mass p. Ties go to the smaller p.
GridSearchResult grid_min_two_point(double T_next, double mu, double sigma, PInterval interval, int grid_points);

/// BoundOracle for the two-point set backed by grid_min_two_point.
BoundOracle two_point_grid_oracle(double mu, double sigma2, double L, int grid_points);

/// max E[min(xi, X)] by enumerating supports of at most three points drawn from
/// a uniform grid of [0, L] plus the known extremal points. Requires finite L.
GridSearchResult enumerate_extremal(const ValidatedSpec& spec, double xi, int grid_points = 60);

/// min P(X >= t) over the mean-variance-support set by the same enumeration.
/// Points just below t are injected so the infimum is approached.
GridSearchResult enumerate_tail_minimum(double mu, double sigma2, double L, double t, int grid_points = 60);

struct CertificateReport {
    double membership = 0.0;      // moment and support discrepancy of the primal
    double primal_gap = 0.0;      // |E_primal[min(xi, X)] - value|
    double dual_gap = 0.0;        // |dual objective - value|
    double dual_violation = 0.0;  // max(0, max_x min(xi, x) - majorant(x)) on the grid

    [[nodiscard]] double max_discrepancy() const;
    [[nodiscard]] bool passed(double tol = 1e-9) const { return max_discrepancy() <= tol; }
};

CertificateReport verify_certificate(const MomentBoundCertificate& cert, const AmbiguitySpec& spec,
                                     int grid_points = 10000);

}  // namespace drstop
