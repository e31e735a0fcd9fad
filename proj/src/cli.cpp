#include "drstop/cli.hpp"

#include "drstop/game.hpp"
#include "drstop/json_io.hpp"
#include "drstop/momentbound.hpp"
#include "drstop/oracle.hpp"
#include "drstop/thresholds.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace drstop::cli {

namespace {

using nlohmann::json;
using io::format_number;

constexpr std::uint64_t kDefaultSeed = 20240601;

struct Common {
    std::string spec_source;
    std::string kind;
    std::optional<double> mu;
    std::optional<double> sigma2;
    std::optional<double> mad;
    std::optional<double> L;
    int n = 10;
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;
    std::string out;
    std::string output_file;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_out) {
    c.out = default_out;
    sub->add_option("--spec", c.spec_source, "ambiguity spec as a JSON file path or inline JSON object");
    sub->add_option("--kind", c.kind,
                    "mean | mean-variance | two-point | mean-var-support | mean-mad | mean-mad-support");
    sub->add_option("--mu", c.mu, "mean");
    sub->add_option("--sigma2", c.sigma2, "variance");
    sub->add_option("--mad", c.mad, "mean absolute deviation");
    sub->add_option("--L", c.L, "support upper bound");
    sub->add_option("--n", c.n, "number of offers")->capture_default_str();
    sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
    sub->add_option("--threads", c.threads, "worker threads")->capture_default_str();
    sub->add_option("--out", c.out, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--output-file", c.output_file, "write output here instead of stdout");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidParameter, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_source(const std::string& source) {
    const auto first = source.find_first_not_of(" \t\r\n");
    const bool inline_json = first != std::string::npos && (source[first] == '{' || source[first] == '[');
    try {
        return json::parse(inline_json ? source : read_text(source));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidParameter, std::string("malformed JSON: ") + e.what());
    }
}

AmbiguitySpec resolve_spec(const Common& c) {
    if (!c.spec_source.empty()) return io::spec_from_json(parse_json_source(c.spec_source));
    if (!c.mu) throw Error(ErrorCode::InvalidParameter, "--mu is required (or pass --spec)");
    AmbiguitySpec s;
    s.mu = *c.mu;
    if (!c.kind.empty()) {
        const auto k = parse_ambiguity_kind(c.kind);
        if (!k) throw Error(ErrorCode::InvalidParameter, "unknown --kind '" + c.kind + "'");
        s.kind = *k;
    } else if (c.sigma2 && c.mad) {
        throw Error(ErrorCode::InvalidParameter, "pass --kind when both --sigma2 and --mad are given");
    } else if (c.sigma2) {
        s.kind = c.L ? AmbiguityKind::MeanVarSupport : AmbiguityKind::MeanVariance;
    } else if (c.mad) {
        s.kind = c.L ? AmbiguityKind::MeanMadSupport : AmbiguityKind::MeanMad;
    } else {
        s.kind = AmbiguityKind::MeanOnly;
    }
    if (uses_variance(s.kind)) {
        if (!c.sigma2) throw Error(ErrorCode::InvalidParameter, "--sigma2 is required for this kind");
        s.sigma2 = *c.sigma2;
    }
    if (uses_mad(s.kind)) {
        if (!c.mad) throw Error(ErrorCode::InvalidParameter, "--mad is required for this kind");
        s.mad = *c.mad;
    }
    if (uses_support(s.kind)) {
        if (!c.L) throw Error(ErrorCode::InvalidParameter, "--L is required for this kind");
        s.support_upper = *c.L;
    }
    return s;
}

/// Output sink: the named file or the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw Error(ErrorCode::InvalidParameter, "cannot write '" + path + "'");
        }
        os_ = path.empty() ? &fallback : &file_;
    }
    std::ostream& os() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

void write_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
}

// ---- thresholds ---------------------------------------------------------

struct ThresholdsArgs {
    Common common;
    std::string method = "closed-form";
};

int cmd_thresholds(const ThresholdsArgs& a, std::ostream& out) {
    const ValidatedSpec spec = validate(resolve_spec(a.common));
    const int n = a.common.n;
    const bool want_closed = a.method != "generic";
    const bool want_generic = a.method != "closed-form";

    std::optional<ThresholdSchedule> closed;
    std::optional<TurningPointReport> turning;
    if (want_closed) {
        if (spec.kind() == AmbiguityKind::TwoPointMeanVarSupport && spec.upper() > 2.0 * spec.mu()) {
            auto r = thresholds_two_point_large_L(spec.mu(), spec.sigma2(), spec.upper(), n);
            closed = std::move(r.schedule);
            turning = std::move(r.turning_point);
        } else {
            closed = closed_form_thresholds(spec, n);
        }
    }
    std::optional<ThresholdSchedule> generic;
    if (want_generic) generic = robust_thresholds_generic(spec, n, default_bound_oracle(spec));

    const ThresholdSchedule& primary = closed ? *closed : *generic;
    double max_diff = 0.0;
    if (closed && generic) {
        for (int i = 0; i <= n; ++i) max_diff = std::max(max_diff, std::abs(closed->values[i] - generic->values[i]));
    }

    Sink sink(a.common.output_file, out);
    auto& os = sink.os();
    if (a.common.out == "json") {
        json j{{"spec", io::to_json(spec.spec())}, {"n", n}, {"method", a.method}};
        j["values"] = io::to_json(primary)["values"];
        if (closed && generic) {
            j["generic_values"] = io::to_json(*generic)["values"];
            j["max_abs_diff"] = io::round12(max_diff);
        }
        if (turning) j["turning_point"] = io::to_json(*turning);
        j["asymptotic_payoff"] = io::round12(asymptotic_payoff(spec));
        write_json(os, j);
    } else {
        std::vector<std::string> header{"i", "T_i"};
        if (closed && generic) header.insert(header.end(), {"T_generic", "abs_diff"});
        if (turning) header.insert(header.end(), {"f_star_value", "g_star_value", "is_switch"});
        write_row(os, header);
        for (int i = 0; i <= n; ++i) {
            std::vector<std::string> row{std::to_string(i), format_number(primary.values[i])};
            if (closed && generic) {
                row.push_back(format_number(generic->values[i]));
                row.push_back(format_number(std::abs(closed->values[i] - generic->values[i])));
            }
            if (turning) {
                row.push_back(format_number(turning->left_values[i]));
                row.push_back(format_number(turning->right_values[i]));
                row.push_back(turning->switch_index && *turning->switch_index == i ? "1" : "0");
            }
            write_row(os, row);
        }
    }
    return max_diff > 1e-9 ? kExitVerifyFailed : kExitOk;
}

// ---- momentbound --------------------------------------------------------

struct MomentArgs {
    Common common;
    double xi = 0.0;
};

int cmd_momentbound(const MomentArgs& a, std::ostream& out) {
    const ValidatedSpec spec = validate(resolve_spec(a.common));
    json j{{"spec", io::to_json(spec.spec())}};
    std::string regime = "closed-form";
    std::optional<DiscreteDistribution> atoms;
    double value = 0.0;

    if (spec.kind() == AmbiguityKind::TwoPointMeanVarSupport) {
        const TwoPointBound b = two_point_upper_bound(spec.mu(), spec.sigma2(), spec.upper(), a.xi);
        value = b.value;
        regime = "two-point";
        atoms = b.member;
        j.update({{"value", io::round12(b.value)}, {"regime", regime}, {"xi", io::round12(a.xi)},
                  {"p", io::round12(b.p)}, {"atoms", io::to_json(b.member)["atoms"]}});
    } else if (spec.kind() == AmbiguityKind::MeanVariance && spec.sigma2() > 0.0) {
        value = moment_upper_bound(spec, a.xi);
        regime = "supremum";
        j.update({{"value", io::round12(value)}, {"regime", regime}, {"xi", io::round12(a.xi)}});
    } else {
        const MomentBoundCertificate cert = worst_case_certificate(spec, a.xi);
        value = cert.value;
        regime = cert.regime_name;
        atoms = cert.primal;
        j.update(io::to_json(cert));
    }

    Sink sink(a.common.output_file, out);
    auto& os = sink.os();
    if (a.common.out == "json") {
        write_json(os, j);
    } else {
        write_row(os, {"xi", "value", "regime", "atoms"});
        std::string cell;
        if (atoms) {
            for (const auto& at : atoms->atoms()) {
                cell += (cell.empty() ? "" : " ") + format_number(at.point) + ":" + format_number(at.prob);
            }
        }
        write_row(os, {format_number(a.xi), format_number(value), regime, cell});
    }
    return kExitOk;
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
    Common common;
    std::string rule = "optimal";
    std::string nature = "worst";
    std::int64_t episodes = 10000;
};

DiscreteDistribution nature_distribution(const std::string& source, const ValidatedSpec& spec) {
    if (source == "witness") return witness_distribution(spec.spec());
    DiscreteDistribution d = io::distribution_from_json(parse_json_source(source));
    const double gap = membership_discrepancy(d, spec.spec());
    if (gap > 1e-9) {
        throw Error(ErrorCode::InvalidDistribution,
                    "nature distribution is not a member of the ambiguity set (discrepancy " + format_number(gap) + ")");
    }
    return d;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const ValidatedSpec spec = validate(resolve_spec(a.common));
    const int n = a.common.n;
    const ThresholdSchedule schedule = closed_form_thresholds(spec, n);

    std::optional<StoppingRule> rule;
    if (a.rule == "optimal") {
        rule = StoppingRule::from_schedule(schedule);
    } else if (a.rule == "first") {
        rule = StoppingRule::first_offer();
    } else if (a.rule.rfind("static:", 0) == 0) {
        double T = 0.0;
        try {
            T = std::stod(a.rule.substr(7));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidParameter, "bad static threshold in --rule " + a.rule);
        }
        rule = static_threshold_rule(T);
    } else {
        throw Error(ErrorCode::InvalidParameter, "unknown --rule '" + a.rule + "'");
    }

    std::optional<NatureStrategy> nature;
    if (a.nature == "worst") {
        nature = NatureStrategy::per_step_worst_case(spec, schedule);
    } else if (a.nature.rfind("fixed:", 0) == 0) {
        nature = NatureStrategy::fixed_iid(nature_distribution(a.nature.substr(6), spec));
    } else if (a.nature.rfind("correlated:", 0) == 0) {
        nature = NatureStrategy::fully_correlated(nature_distribution(a.nature.substr(11), spec));
    } else {
        throw Error(ErrorCode::InvalidParameter, "unknown --nature '" + a.nature + "'");
    }

    const SimulationReport rep = monte_carlo(*rule, *nature, n, a.episodes, a.common.seed, a.common.threads);

    Sink sink(a.common.output_file, out);
    auto& os = sink.os();
    if (a.common.out == "json") {
        json j{{"spec", io::to_json(spec.spec())}, {"n", n}, {"rule", a.rule}, {"nature", a.nature},
               {"robust_payoff", io::round12(schedule.payoff())}};
        j.update(io::to_json(rep));
        write_json(os, j);
    } else {
        write_row(os, {"episodes", "mean_payoff", "std_error", "seed", "no_acceptance_frequency",
                       "mean_realized_max", "robust_payoff"});
        write_row(os, {std::to_string(rep.episodes), format_number(rep.mean_payoff), format_number(rep.std_error),
                       std::to_string(rep.seed), format_number(rep.no_acceptance_frequency),
                       format_number(rep.mean_realized_max), format_number(schedule.payoff())});
    }
    return kExitOk;
}

// ---- verify -------------------------------------------------------------

struct VerifyArgs {
    Common common;
    int sweep = 25;
    int grid = 60;
    double tol = 1e-9;
};

std::vector<double> xi_sweep(const ValidatedSpec& spec, int count) {
    const double mu = spec.mu();
    const bool restricted = spec.kind() == AmbiguityKind::TwoPointMeanVarSupport || !std::isfinite(spec.upper());
    double lo = restricted ? mu : 0.0;
    double hi = spec.upper();
    if (!std::isfinite(hi)) hi = 2.0 * asymptotic_payoff(spec);
    std::vector<double> xs;
    if (restricted) xs.push_back(0.0);
    const int m = std::max(count - static_cast<int>(xs.size()), 1);
    for (int k = 0; k < m; ++k) {
        xs.push_back(m == 1 ? lo : (k == m - 1 ? hi : lo + (hi - lo) * k / (m - 1)));
    }
    return xs;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
    const ValidatedSpec spec = validate(resolve_spec(a.common));
    if (spec.kind() == AmbiguityKind::MeanOnly || spec.kind() == AmbiguityKind::MeanVariance) {
        throw Error(ErrorCode::PreconditionViolated, "verify needs a support bound or a MAD set");
    }
    if (a.sweep < 1) throw Error(ErrorCode::InvalidParameter, "--xi-sweep must be >= 1");
    const bool finite = std::isfinite(spec.upper());
    const bool has_cert = spec.kind() != AmbiguityKind::TwoPointMeanVarSupport;

    json rows = json::array();
    bool all_ok = true;
    for (double xi : xi_sweep(spec, a.sweep)) {
        const double bound = moment_upper_bound(spec, xi);
        json row{{"xi", io::round12(xi)}, {"bound", io::round12(bound)}};
        double worst = 0.0;
        if (finite) {
            const GridSearchResult r = enumerate_extremal(spec, xi, a.grid);
            const double diff = std::abs(r.best_value - bound);
            row["oracle"] = io::round12(r.best_value);
            row["oracle_diff"] = io::round12(diff);
            worst = std::max(worst, diff);
        }
        if (has_cert) {
            const MomentBoundCertificate cert = worst_case_certificate(spec, xi);
            const CertificateReport rep = verify_certificate(cert, spec.spec());
            row["regime"] = cert.regime_name;
            row["certificate"] = io::to_json(rep);
            worst = std::max(worst, rep.max_discrepancy());
        }
        const bool ok = worst <= a.tol;
        row["status"] = ok ? "ok" : "FAIL";
        all_ok = all_ok && ok;
        rows.push_back(row);
    }

    Sink sink(a.common.output_file, out);
    auto& os = sink.os();
    if (a.common.out == "json") {
        write_json(os, {{"spec", io::to_json(spec.spec())}, {"tolerance", a.tol}, {"checks", rows},
                        {"passed", all_ok}});
    } else {
        write_row(os, {"xi", "bound", "oracle", "oracle_diff", "regime", "membership", "primal_gap", "dual_gap",
                       "dual_violation", "status"});
        auto cell = [](const json& j, const char* key) {
            return j.contains(key) ? format_number(j.at(key).get<double>()) : std::string("-");
        };
        for (const auto& r : rows) {
            const json cert = r.contains("certificate") ? r["certificate"] : json::object();
            write_row(os, {cell(r, "xi"), cell(r, "bound"), cell(r, "oracle"), cell(r, "oracle_diff"),
                           r.contains("regime") ? r["regime"].get<std::string>() : std::string("-"),
                           cell(cert, "membership"), cell(cert, "primal_gap"), cell(cert, "dual_gap"),
                           cell(cert, "dual_violation"), r["status"].get<std::string>()});
        }
    }
    return all_ok ? kExitOk : kExitVerifyFailed;
}

// ---- figure -------------------------------------------------------------

struct FigureArgs {
    Common common;
    int figure = 1;
};

int cmd_figure(const FigureArgs& a, bool n_given, std::ostream& out) {
    const double mu = a.common.mu.value_or(1.0);
    const double sigma2 = a.common.sigma2.value_or(1.3);
    const double L = a.common.L.value_or(5.0);
    const int n = n_given ? a.common.n : 20;

    Sink sink(a.common.output_file, out);
    auto& os = sink.os();
    if (a.figure == 1) {
        const TwoPointLargeL r = thresholds_two_point_large_L(mu, sigma2, L, n);
        const auto& tp = r.turning_point;
        if (a.common.out == "json") {
            json j{{"spec", io::to_json(AmbiguitySpec::two_point(mu, sigma2, L))}, {"n", n}};
            j["values"] = io::to_json(r.schedule)["values"];
            j["turning_point"] = io::to_json(tp);
            write_json(os, j);
        } else {
            write_row(os, {"i", "f_star_value", "g_star_value", "T_i", "is_switch"});
            for (int i = 0; i <= n; ++i) {
                write_row(os, {std::to_string(i), format_number(tp.left_values[i]),
                               format_number(tp.right_values[i]), format_number(r.schedule.values[i]),
                               tp.switch_index && *tp.switch_index == i ? "1" : "0"});
            }
        }
        return kExitOk;
    }
    const auto rows = worst_case_mass_path(mu, sigma2, L, n);
    if (a.common.out == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back({{"i", r.i}, {"xi", io::round12(r.xi)}, {"p0", io::round12(r.p0)},
                           {"p_xi", io::round12(r.pxi)}, {"p_L", io::round12(r.pL)}});
        }
        write_json(os, {{"spec", io::to_json(AmbiguitySpec::mean_var_support(mu, sigma2, L))}, {"n", n},
                        {"rows", arr}});
    } else {
        write_row(os, {"i", "xi", "p0", "p_xi", "p_L"});
        for (const auto& r : rows) {
            write_row(os, {std::to_string(r.i), format_number(r.xi), format_number(r.p0), format_number(r.pxi),
                           format_number(r.pL)});
        }
    }
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distributionally robust stopping thresholds, moment bounds and game simulation"};
    app.require_subcommand(1);

    ThresholdsArgs th;
    auto* th_cmd = app.add_subcommand("thresholds", "robust threshold schedule T(0..n)");
    add_common(th_cmd, th.common, "csv");
    th_cmd->add_option("--method", th.method)
        ->check(CLI::IsMember({"generic", "closed-form", "both"}))
        ->capture_default_str();

    MomentArgs mb;
    auto* mb_cmd = app.add_subcommand("momentbound", "tight bound on E[min(xi, X)] with certificate");
    add_common(mb_cmd, mb.common, "json");
    mb_cmd->add_option("--xi", mb.xi, "argument xi")->required();

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of a rule's payoff against nature");
    add_common(sim_cmd, sim.common, "json");
    sim_cmd->add_option("--rule", sim.rule, "optimal | static:<T> | first")->capture_default_str();
    sim_cmd->add_option("--nature", sim.nature, "worst | fixed:<dist.json|witness> | correlated:<dist.json|witness>")
        ->capture_default_str();
    sim_cmd->add_option("--episodes", sim.episodes)->check(CLI::PositiveNumber)->capture_default_str();

    VerifyArgs ver;
    auto* ver_cmd = app.add_subcommand("verify", "check closed-form bounds against the enumeration oracle");
    add_common(ver_cmd, ver.common, "csv");
    ver_cmd->add_option("--xi-sweep", ver.sweep, "number of xi values")->capture_default_str();
    ver_cmd->add_option("--grid", ver.grid, "oracle grid points")->capture_default_str();
    ver_cmd->add_option("--tol", ver.tol, "tolerance")->capture_default_str();

    FigureArgs fig;
    auto* fig_cmd = app.add_subcommand("figure", "emit figure data series");
    add_common(fig_cmd, fig.common, "csv");
    fig_cmd->add_option("--figure", fig.figure, "1 (turning point) or 5 (worst-case masses)")
        ->check(CLI::IsMember({1, 5}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*th_cmd) return cmd_thresholds(th, out);
        if (*mb_cmd) return cmd_momentbound(mb, out);
        if (*sim_cmd) return cmd_simulate(sim, out);
        if (*ver_cmd) return cmd_verify(ver, out);
        if (*fig_cmd) return cmd_figure(fig, fig_cmd->count("--n") > 0, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}

}  // namespace drstop::cli
