#include "drstop/game.hpp"

#include "drstop/momentbound.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace drstop {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

SplitMix64 SplitMix64::for_episode(std::uint64_t seed, std::uint64_t episode) {
    return SplitMix64(mix64(seed) ^ mix64(episode + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t SplitMix64::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
}

StoppingRule StoppingRule::from_schedule(ThresholdSchedule schedule) {
    StoppingRule r;
    r.kind_ = Kind::Schedule;
    r.thresholds_ = std::move(schedule.values);
    return r;
}

StoppingRule StoppingRule::static_threshold(double T) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidParameter, "static threshold must be >= 0");
    StoppingRule r;
    r.kind_ = Kind::Static;
    r.threshold_ = T;
    return r;
}

StoppingRule StoppingRule::first_offer() {
    StoppingRule r;
    r.kind_ = Kind::First;
    return r;
}

StoppingRule StoppingRule::randomized(AcceptanceFn fn) {
    if (!fn) throw Error(ErrorCode::InvalidParameter, "randomized rule needs an acceptance function");
    StoppingRule r;
    r.kind_ = Kind::Randomized;
    r.fn_ = std::move(fn);
    return r;
}

double StoppingRule::acceptance_probability(std::span<const double> prefix) const {
    const double v = prefix.back();
    switch (kind_) {
        case Kind::First:
            return 1.0;
        case Kind::Static:
            return v >= threshold_ ? 1.0 : 0.0;
        case Kind::Schedule: {
            const std::size_t k = prefix.size();
            if (k >= thresholds_.size()) {
                throw Error(ErrorCode::InvalidParameter, "schedule covers " + std::to_string(thresholds_.size() - 1) +
                                                             " offers, episode has more");
            }
            return v >= thresholds_[k] ? 1.0 : 0.0;
        }
        case Kind::Randomized:
            return std::clamp(fn_(prefix), 0.0, 1.0);
    }
    return 0.0;
}

EpisodeResult run_episode(const StoppingRule& rule, std::span<const double> values, SplitMix64& rng) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double r = rule.acceptance_probability(values.first(i + 1));
        const bool accept = r >= 1.0 || (r > 0.0 && rng.uniform() < r);
        if (accept) return {static_cast<int>(i) + 1, values[i]};
    }
    return {0, 0.0};
}

NatureStrategy NatureStrategy::fixed_iid(DiscreteDistribution dist) {
    NatureStrategy s(Kind::FixedIID);
    s.dists_.push_back(std::move(dist));
    return s;
}

NatureStrategy NatureStrategy::fully_correlated(DiscreteDistribution dist) {
    NatureStrategy s(Kind::FullyCorrelated);
    s.dists_.push_back(std::move(dist));
    return s;
}

NatureStrategy NatureStrategy::per_step_worst_case(const ValidatedSpec& spec, const ThresholdSchedule& schedule) {
    NatureStrategy s(Kind::PerStepWorstCase);
    for (int k = 1; k <= schedule.n; ++k) {
        const double xi = schedule.values.at(k);
        switch (spec.kind()) {
            case AmbiguityKind::MeanOnly:
                s.dists_.push_back(DiscreteDistribution::point_mass(spec.mu()));
                break;
            case AmbiguityKind::TwoPointMeanVarSupport:
                s.dists_.push_back(two_point_upper_bound(spec.mu(), spec.sigma2(), spec.upper(), xi).member);
                break;
            default:
                s.dists_.push_back(worst_case_certificate(spec, xi).primal);
                break;
        }
    }
    return s;
}

const DiscreteDistribution& NatureStrategy::offer_distribution(int k) const {
    if (kind_ != Kind::PerStepWorstCase) return dists_.front();
    if (k < 1 || static_cast<std::size_t>(k) > dists_.size()) {
        throw Error(ErrorCode::InvalidParameter, "offer " + std::to_string(k) + " outside the nature's horizon of " +
                                                     std::to_string(dists_.size()));
    }
    return dists_[k - 1];
}

void NatureStrategy::draw(std::span<double> values, SplitMix64& rng) const {
    if (kind_ == Kind::FullyCorrelated) {
        std::fill(values.begin(), values.end(), dists_.front().sample(rng.uniform()));
        return;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = offer_distribution(static_cast<int>(i) + 1).sample(rng.uniform());
    }
}

SimulationReport monte_carlo(const StoppingRule& rule, const NatureStrategy& nature, int n, std::int64_t episodes,
                             std::uint64_t seed, int threads) {
    if (n < 1) throw Error(ErrorCode::InvalidParameter, "n must be >= 1");
    if (episodes < 1) throw Error(ErrorCode::InvalidParameter, "episodes must be >= 1");
    if (threads < 1) throw Error(ErrorCode::InvalidParameter, "threads must be >= 1");
    if (nature.kind() == NatureStrategy::Kind::PerStepWorstCase) (void)nature.offer_distribution(n);

    const auto count = static_cast<std::size_t>(episodes);
    std::vector<double> payoff(count);
    std::vector<double> realized_max(count);
    std::vector<int> index(count);

    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<double> values(static_cast<std::size_t>(n));
        for (std::size_t e = begin; e < end; ++e) {
            SplitMix64 rng = SplitMix64::for_episode(seed, e);
            nature.draw(values, rng);
            const EpisodeResult r = run_episode(rule, values, rng);
            payoff[e] = r.payoff;
            index[e] = r.index;
            realized_max[e] = *std::max_element(values.begin(), values.end());
        }
    };

    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    if (workers <= 1) {
        work(0, count);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    SimulationReport rep;
    rep.episodes = episodes;
    rep.seed = seed;
    rep.selection_histogram.assign(static_cast<std::size_t>(n) + 1, 0);
    double sum = 0.0;
    double sum_max = 0.0;
    for (std::size_t e = 0; e < count; ++e) {
        sum += payoff[e];
        sum_max += realized_max[e];
        ++rep.selection_histogram[index[e]];
    }
    const double m = static_cast<double>(episodes);
    rep.mean_payoff = sum / m;
    rep.mean_realized_max = sum_max / m;
    rep.no_acceptance_frequency = static_cast<double>(rep.selection_histogram[0]) / m;
    if (episodes > 1) {
        double ss = 0.0;
        for (double x : payoff) ss += (x - rep.mean_payoff) * (x - rep.mean_payoff);
        rep.std_error = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
    }
    return rep;
}

}  // namespace drstop
