#include "drstop/json_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace drstop::io {

using nlohmann::json;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    // snprintf follows LC_NUMERIC; force the '.' separator.
    for (char* c = buf; *c; ++c) {
        if (*c == ',') *c = '.';
    }
    return buf;
}

double round12(double x) {
    if (!std::isfinite(x)) return x;
    const std::string s = format_number(x);
    double out = x;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

namespace {

json number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return round12(x);
}

double read_number(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "Infinity") return kInfinity;
        throw Error(ErrorCode::InvalidParameter, std::string("field '") + key + "' is not a number");
    }
    if (!v.is_number()) throw Error(ErrorCode::InvalidParameter, std::string("field '") + key + "' is not a number");
    return v.get<double>();
}

}  // namespace

json to_json(const AmbiguitySpec& spec) {
    json j;
    j["kind"] = std::string(to_string(spec.kind));
    j["mu"] = number(spec.mu);
    if (spec.sigma2) j["sigma2"] = number(*spec.sigma2);
    if (spec.mad) j["mad"] = number(*spec.mad);
    if (spec.support_upper) j["L"] = number(*spec.support_upper);
    return j;
}

AmbiguitySpec spec_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidParameter, "spec must be a JSON object");
    if (!j.contains("kind") || !j.contains("mu")) throw Error(ErrorCode::InvalidParameter, "spec needs kind and mu");
    const auto name = j.at("kind").get<std::string>();
    const auto kind = parse_ambiguity_kind(name);
    if (!kind) throw Error(ErrorCode::InvalidParameter, "unknown ambiguity kind '" + name + "'");
    AmbiguitySpec spec;
    spec.kind = *kind;
    spec.mu = read_number(j, "mu");
    if (j.contains("sigma2")) spec.sigma2 = read_number(j, "sigma2");
    if (j.contains("mad")) spec.mad = read_number(j, "mad");
    if (j.contains("L")) spec.support_upper = read_number(j, "L");
    return spec;
}

json to_json(const DiscreteDistribution& dist) {
    json atoms = json::array();
    for (const auto& a : dist.atoms()) atoms.push_back({number(a.point), number(a.prob)});
    return {{"atoms", atoms}};
}

DiscreteDistribution distribution_from_json(const json& j) {
    const json& arr = j.is_object() ? j.at("atoms") : j;
    if (!arr.is_array()) throw Error(ErrorCode::InvalidDistribution, "atoms must be an array of [point, prob]");
    std::vector<Atom> atoms;
    for (const auto& a : arr) {
        if (!a.is_array() || a.size() != 2) throw Error(ErrorCode::InvalidDistribution, "atom must be [point, prob]");
        atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return DiscreteDistribution::from_atoms(std::move(atoms));
}

json to_json(const Majorant& m) {
    json j{{"basis", std::string(to_string(m.basis))},
           {"lambdas", {number(m.lambda0), number(m.lambda1), number(m.lambda2)}}};
    if (m.basis == MajorantBasis::MadBasis) j["center"] = number(m.center);
    return j;
}

json to_json(const MomentBoundCertificate& cert) {
    json j{{"value", number(cert.value)},
           {"regime", cert.regime_name},
           {"regime_id", cert.regime},
           {"xi", number(cert.xi)},
           {"atoms", to_json(cert.primal)["atoms"]},
           {"dual", to_json(cert.dual)}};
    if (cert.breakpoint) {
        const auto& b = *cert.breakpoint;
        j["breakpoint"] = {{"xi1_statement", number(b.xi1_statement)},
                           {"xi1_proof", number(b.xi1_proof)},
                           {"in_disputed_band", b.in_disputed_band},
                           {"consistent_with", std::string(to_string(b.consistent_with))}};
    }
    return j;
}

json to_json(const ThresholdSchedule& s) {
    json values = json::array();
    for (double v : s.values) values.push_back(number(v));
    return {{"n", s.n}, {"values", values}};
}

json to_json(const TurningPointReport& r) {
    json left = json::array();
    json right = json::array();
    for (double v : r.left_values) left.push_back(number(v));
    for (double v : r.right_values) right.push_back(number(v));
    return {{"n0", r.n0 ? json(*r.n0) : json(nullptr)},
            {"switch_index", r.switch_index ? json(*r.switch_index) : json(nullptr)},
            {"f_star_values", left},
            {"g_star_values", right}};
}

json to_json(const SimulationReport& r) {
    return {{"episodes", r.episodes},
            {"mean_payoff", number(r.mean_payoff)},
            {"std_error", number(r.std_error)},
            {"seed", r.seed},
            {"selection_histogram", r.selection_histogram},
            {"no_acceptance_frequency", number(r.no_acceptance_frequency)},
            {"mean_realized_max", number(r.mean_realized_max)}};
}

json to_json(const CertificateReport& r) {
    return {{"membership", number(r.membership)},
            {"primal_gap", number(r.primal_gap)},
            {"dual_gap", number(r.dual_gap)},
            {"dual_violation", number(r.dual_violation)}};
}

}  // namespace drstop::io
