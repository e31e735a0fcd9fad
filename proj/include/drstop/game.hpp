#pragma once

// Monte Carlo simulation of the seller-vs-nature game.

#include "drstop/ambiguity.hpp"
#include "drstop/thresholds.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace drstop {

/// SplitMix64. Each episode gets its own stream derived from (seed, episode).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    static SplitMix64 for_episode(std::uint64_t seed, std::uint64_t episode);

    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

class StoppingRule {
public:
    enum class Kind { Schedule, Static, First, Randomized };
    /// Acceptance probability for the last value of the observed prefix v_1..v_i.
    using AcceptanceFn = std::function<double(std::span<const double>)>;

    static StoppingRule from_schedule(ThresholdSchedule schedule);
    static StoppingRule static_threshold(double T);
    static StoppingRule first_offer();
    static StoppingRule randomized(AcceptanceFn r);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double acceptance_probability(std::span<const double> prefix) const;

private:
    StoppingRule() = default;
    Kind kind_ = Kind::First;
    std::vector<double> thresholds_;
    double threshold_ = 0.0;
    AcceptanceFn fn_;
};

inline StoppingRule static_threshold_rule(double T) { return StoppingRule::static_threshold(T); }

struct EpisodeResult {
    int index = 0;  // 1-based offer accepted, 0 when every offer was rejected
    double payoff = 0.0;
};

/// Applies the rule to the offers in order. Uniforms are only consumed for
/// acceptance probabilities strictly between 0 and 1.
EpisodeResult run_episode(const StoppingRule& rule, std::span<const double> values, SplitMix64& rng);

class NatureStrategy {
public:
    enum class Kind { FixedIID, PerStepWorstCase, FullyCorrelated };

    static NatureStrategy fixed_iid(DiscreteDistribution dist);
    static NatureStrategy fully_correlated(DiscreteDistribution dist);
    /// Offer k is drawn from the extremal member at xi = T(k).
    static NatureStrategy per_step_worst_case(const ValidatedSpec& spec, const ThresholdSchedule& schedule);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const DiscreteDistribution& offer_distribution(int k) const;
    /// Fills values[0..n-1] for one episode.
    void draw(std::span<double> values, SplitMix64& rng) const;

private:
    explicit NatureStrategy(Kind kind) : kind_(kind) {}
    Kind kind_;
    std::vector<DiscreteDistribution> dists_;
};

struct SimulationReport {
    std::int64_t episodes = 0;
    double mean_payoff = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> selection_histogram;  // [0] = no acceptance, [k] = offer k
    double no_acceptance_frequency = 0.0;
    double mean_realized_max = 0.0;
};

/// Deterministic for fixed (seed, episodes) regardless of `threads`.
SimulationReport monte_carlo(const StoppingRule& rule, const NatureStrategy& nature, int n, std::int64_t episodes,
                             std::uint64_t seed, int threads = 1);

}  // namespace drstop
