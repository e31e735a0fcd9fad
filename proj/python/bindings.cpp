#include "drstop/game.hpp"
#include "drstop/momentbound.hpp"
#include "drstop/oracle.hpp"
#include "drstop/thresholds.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>

namespace py = pybind11;
using namespace drstop;

namespace {

using AtomList = std::vector<std::pair<double, double>>;

AtomList atom_list(const DiscreteDistribution& d) {
    AtomList out;
    for (const auto& a : d.atoms()) out.emplace_back(a.point, a.prob);
    return out;
}

DiscreteDistribution to_distribution(const AtomList& atoms, double scale) {
    std::vector<Atom> v;
    for (const auto& [x, p] : atoms) v.push_back({x, p});
    return DiscreteDistribution::from_atoms(std::move(v), scale);
}

py::dict certificate_dict(const MomentBoundCertificate& c) {
    py::dict d;
    d["value"] = c.value;
    d["regime"] = c.regime_name;
    d["regime_id"] = c.regime;
    d["xi"] = c.xi;
    d["atoms"] = atom_list(c.primal);
    py::dict dual;
    dual["basis"] = std::string(to_string(c.dual.basis));
    dual["lambdas"] = std::vector<double>{c.dual.lambda0, c.dual.lambda1, c.dual.lambda2};
    if (c.dual.basis == MajorantBasis::MadBasis) dual["center"] = c.dual.center;
    d["dual"] = dual;
    if (c.breakpoint) {
        py::dict b;
        b["xi1_statement"] = c.breakpoint->xi1_statement;
        b["xi1_proof"] = c.breakpoint->xi1_proof;
        b["in_disputed_band"] = c.breakpoint->in_disputed_band;
        b["consistent_with"] = std::string(to_string(c.breakpoint->consistent_with));
        d["breakpoint"] = b;
    }
    return d;
}

StoppingRule make_rule(const py::object& rule, const ThresholdSchedule& schedule) {
    if (py::isinstance<py::str>(rule)) {
        const auto s = rule.cast<std::string>();
        if (s == "optimal") return StoppingRule::from_schedule(schedule);
        if (s == "first") return StoppingRule::first_offer();
        throw Error(ErrorCode::InvalidParameter, "rule must be 'optimal', 'first' or a static threshold");
    }
    return StoppingRule::static_threshold(rule.cast<double>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Robust stopping thresholds under moment ambiguity";

    py::register_exception<Error>(m, "DrstopError", PyExc_ValueError);

    py::class_<AmbiguitySpec>(m, "Spec")
        .def_static("mean_only", &AmbiguitySpec::mean_only, py::arg("mu"))
        .def_static("mean_variance", &AmbiguitySpec::mean_variance, py::arg("mu"), py::arg("sigma2"))
        .def_static("two_point", &AmbiguitySpec::two_point, py::arg("mu"), py::arg("sigma2"), py::arg("L"))
        .def_static("mean_var_support", &AmbiguitySpec::mean_var_support, py::arg("mu"), py::arg("sigma2"),
                    py::arg("L"))
        .def_static("mean_mad", &AmbiguitySpec::mean_mad, py::arg("mu"), py::arg("mad"))
        .def_static("mean_mad_support", &AmbiguitySpec::mean_mad_support, py::arg("mu"), py::arg("mad"),
                    py::arg("L"))
        .def_property_readonly("kind", [](const AmbiguitySpec& s) { return std::string(to_string(s.kind)); })
        .def_readonly("mu", &AmbiguitySpec::mu)
        .def_readonly("sigma2", &AmbiguitySpec::sigma2)
        .def_readonly("mad", &AmbiguitySpec::mad)
        .def_property_readonly("L", &AmbiguitySpec::upper)
        .def("__eq__", [](const AmbiguitySpec& a, const AmbiguitySpec& b) { return a == b; })
        .def("__repr__", [](const AmbiguitySpec& s) {
            std::string r = "Spec(" + std::string(to_string(s.kind)) + ", mu=" + py::repr(py::float_(s.mu)).cast<std::string>();
            if (s.sigma2) r += ", sigma2=" + py::repr(py::float_(*s.sigma2)).cast<std::string>();
            if (s.mad) r += ", mad=" + py::repr(py::float_(*s.mad)).cast<std::string>();
            if (s.support_upper) r += ", L=" + py::repr(py::float_(*s.support_upper)).cast<std::string>();
            return r + ")";
        });

    m.def(
        "validate", [](const AmbiguitySpec& s) { validate(s); },
        "Raises DrstopError when the set is empty or a parameter is invalid.", py::arg("spec"));

    m.def(
        "thresholds",
        [](const AmbiguitySpec& s, int n, const std::string& method) {
            const auto spec = validate(s);
            if (method == "closed-form") return closed_form_thresholds(spec, n).values;
            if (method == "generic") return robust_thresholds_generic(spec, n, default_bound_oracle(spec)).values;
            throw Error(ErrorCode::InvalidParameter, "method must be 'closed-form' or 'generic'");
        },
        "Robust thresholds T(0..n).", py::arg("spec"), py::arg("n"), py::arg("method") = "closed-form");

    m.def(
        "turning_point",
        [](double mu, double sigma2, double L, int n) {
            const auto r = thresholds_two_point_large_L(mu, sigma2, L, n);
            py::dict d;
            d["values"] = r.schedule.values;
            d["n0"] = r.turning_point.n0;
            d["switch_index"] = r.turning_point.switch_index;
            d["left_values"] = r.turning_point.left_values;
            d["right_values"] = r.turning_point.right_values;
            return d;
        },
        py::arg("mu"), py::arg("sigma2"), py::arg("L"), py::arg("n"));

    m.def(
        "moment_bound",
        [](const AmbiguitySpec& s, double xi) { return certificate_dict(worst_case_certificate(validate(s), xi)); },
        "Worst-case E[min(xi, X)] with its primal and dual certificate.", py::arg("spec"), py::arg("xi"));

    m.def("cox_upper_bound", &cox_upper_bound, py::arg("mu"), py::arg("sigma2"), py::arg("L"), py::arg("xi"));
    m.def("mad_upper_bound", &mad_upper_bound, py::arg("mu"), py::arg("mad"), py::arg("L"), py::arg("xi"));
    m.def("tail_lower_bound", &tail_lower_bound, py::arg("mu"), py::arg("sigma2"), py::arg("L"), py::arg("eps"));
    m.def("tail_probability_infimum", &tail_probability_infimum, py::arg("mu"), py::arg("sigma2"), py::arg("L"),
          py::arg("eps"));

    m.def(
        "witness", [](const AmbiguitySpec& s) { return atom_list(witness_distribution(s)); },
        "A member of the set as [(x, p), ...].", py::arg("spec"));

    m.def(
        "membership_discrepancy",
        [](const AtomList& atoms, const AmbiguitySpec& s) {
            return membership_discrepancy(to_distribution(atoms, std::isfinite(s.upper()) ? s.upper() : 1.0), s);
        },
        py::arg("atoms"), py::arg("spec"));

    m.def(
        "verify_certificate",
        [](const AmbiguitySpec& s, double xi, int grid, double tol) {
            const auto r = verify_certificate(worst_case_certificate(validate(s), xi), s, grid);
            py::dict d;
            d["membership"] = r.membership;
            d["primal_gap"] = r.primal_gap;
            d["dual_gap"] = r.dual_gap;
            d["dual_violation"] = r.dual_violation;
            d["passed"] = r.passed(tol);
            return d;
        },
        py::arg("spec"), py::arg("xi"), py::arg("grid") = 10000, py::arg("tol") = 1e-9);

    m.def(
        "simulate",
        [](const AmbiguitySpec& s, int n, std::int64_t episodes, std::uint64_t seed, const py::object& rule,
           const py::object& nature, int threads) {
            const auto spec = validate(s);
            const auto schedule = closed_form_thresholds(spec, n);
            const auto r = make_rule(rule, schedule);
            const double scale = std::isfinite(s.upper()) ? s.upper() : 1.0;
            const auto nat = nature.is_none() ? NatureStrategy::per_step_worst_case(spec, schedule)
                                              : NatureStrategy::fixed_iid(to_distribution(nature.cast<AtomList>(), scale));
            SimulationReport rep;
            {
                py::gil_scoped_release release;
                rep = monte_carlo(r, nat, n, episodes, seed, threads);
            }
            py::dict d;
            d["episodes"] = rep.episodes;
            d["mean_payoff"] = rep.mean_payoff;
            d["std_error"] = rep.std_error;
            d["seed"] = rep.seed;
            d["selection_histogram"] = rep.selection_histogram;
            d["no_acceptance_frequency"] = rep.no_acceptance_frequency;
            d["mean_realized_max"] = rep.mean_realized_max;
            d["robust_payoff"] = schedule.payoff();
            return d;
        },
        "Monte Carlo play. rule: 'optimal', 'first' or a static threshold. nature: None for the per-step "
        "worst case, or atoms [(x, p), ...] drawn i.i.d.",
        py::arg("spec"), py::arg("n"), py::arg("episodes") = 10000, py::arg("seed") = 20240601,
        py::arg("rule") = "optimal", py::arg("nature") = py::none(), py::arg("threads") = 1);
}
