#include "drstop/ambiguity.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace drstop;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidParameter;
}

void check_atoms(const DiscreteDistribution& d, std::initializer_list<Atom> expected, double tol = 1e-12) {
    REQUIRE(d.size() == expected.size());
    std::size_t i = 0;
    for (const auto& e : expected) {
        CHECK(d.atoms()[i].point == doctest::Approx(e.point).epsilon(tol));
        CHECK(d.atoms()[i].prob == doctest::Approx(e.prob).epsilon(tol));
        ++i;
    }
}

}  // namespace

TEST_SUITE("ambiguity") {

TEST_CASE("validate accepts and rejects by the non-emptiness inequality") {
    CHECK_NOTHROW(validate(AmbiguitySpec::mean_var_support(1.0, 0.25, 2.0)));
    CHECK(code_of([] { validate(AmbiguitySpec::mean_var_support(1.0, 1.5, 2.0)); }) ==
          ErrorCode::EmptyAmbiguitySet);
    // equality d = 2 mu (L - mu) / L
    CHECK_NOTHROW(validate(AmbiguitySpec::mean_mad_support(1.0, 1.0, 2.0)));
    CHECK(code_of([] { validate(AmbiguitySpec::mean_mad_support(1.0, 1.0 + 1e-15, 2.0)); }) ==
          ErrorCode::EmptyAmbiguitySet);
    CHECK(code_of([] { validate(AmbiguitySpec::mean_mad(1.0, 2.0)); }) == ErrorCode::EmptyAmbiguitySet);
}

TEST_CASE("validate rejects bad signs with InvalidParameter") {
    CHECK(code_of([] { validate(AmbiguitySpec::mean_only(0.0)); }) == ErrorCode::InvalidParameter);
    CHECK(code_of([] { validate(AmbiguitySpec::mean_variance(1.0, -0.1)); }) == ErrorCode::InvalidParameter);
    CHECK(code_of([] { validate(AmbiguitySpec::mean_mad(1.0, -0.1)); }) == ErrorCode::InvalidParameter);
    CHECK(code_of([] { validate(AmbiguitySpec::mean_var_support(1.0, 0.1, -2.0)); }) ==
          ErrorCode::InvalidParameter);
    CHECK(code_of([] { validate(AmbiguitySpec::mean_only(NAN)); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("validate message names the violated inequality") {
    try {
        validate(AmbiguitySpec::mean_var_support(1.0, 1.5, 2.0));
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("sigma2 <= mu*(L - mu)") != std::string::npos);
    }
}

TEST_CASE("validate drops fields foreign to the kind") {
    AmbiguitySpec s = AmbiguitySpec::mean_variance(1.0, 0.5);
    s.mad = 3.0;
    s.support_upper = 9.0;
    const ValidatedSpec v = validate(s);
    CHECK(v.spec() == AmbiguitySpec::mean_variance(1.0, 0.5));
}

TEST_CASE("kind names parse in both spellings") {
    CHECK(parse_ambiguity_kind("two-point") == AmbiguityKind::TwoPointMeanVarSupport);
    CHECK(parse_ambiguity_kind("MeanMadSupport") == AmbiguityKind::MeanMadSupport);
    CHECK(parse_ambiguity_kind("mean-var-support") == AmbiguityKind::MeanVarSupport);
    CHECK_FALSE(parse_ambiguity_kind("nope").has_value());
    for (auto k : {AmbiguityKind::MeanOnly, AmbiguityKind::MeanVariance, AmbiguityKind::TwoPointMeanVarSupport,
                   AmbiguityKind::MeanVarSupport, AmbiguityKind::MeanMad, AmbiguityKind::MeanMadSupport}) {
        CHECK(parse_ambiguity_kind(to_string(k)) == k);
    }
}

TEST_CASE("two_point_from_p") {
    check_atoms(two_point_from_p(1.0, 1.0, 0.5), {{0.0, 0.5}, {2.0, 0.5}});
    CHECK(code_of([] { two_point_from_p(1.0, 1.0, 0.4); }) == ErrorCode::NegativeSupport);

    const auto d = two_point_from_p(2.0, 1.0, 0.2);
    check_atoms(d, {{0.0, 0.2}, {2.5, 0.8}});
    const Moments m = moments(d);
    CHECK(m.mean == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("feasible_p_interval") {
    auto iv = feasible_p_interval(1.0, 1.0, 2.0);
    CHECK(iv.lo == doctest::Approx(0.5));
    CHECK(iv.hi == doctest::Approx(0.5));

    iv = feasible_p_interval(1.0, std::sqrt(1.3), 5.0);
    CHECK(iv.lo == doctest::Approx(1.3 / 2.3).epsilon(1e-12));
    CHECK(iv.hi == doctest::Approx(16.0 / 17.3).epsilon(1e-12));
    CHECK(two_point_from_p(1.0, std::sqrt(1.3), iv.lo).min_point() == doctest::Approx(0.0));
    CHECK(two_point_from_p(1.0, std::sqrt(1.3), iv.hi).max_point() == doctest::Approx(5.0).epsilon(1e-12));

    iv = feasible_p_interval(1.0, std::sqrt(0.82), 2.5);
    CHECK(iv.lo == doctest::Approx(0.82 / 1.82).epsilon(1e-12));
    CHECK(iv.hi == doctest::Approx(2.25 / 3.07).epsilon(1e-12));

    iv = feasible_p_interval(1.0, 0.0, 3.0);
    CHECK(iv.degenerate);
    CHECK(code_of([] { feasible_p_interval(2.0, 1.0, 2.0); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("witness_distribution") {
    check_atoms(witness_distribution(AmbiguitySpec::mean_variance(1.0, 1.0)), {{0.0, 0.5}, {2.0, 0.5}});
    check_atoms(witness_distribution(AmbiguitySpec::mean_mad(1.0, 0.5)), {{0.0, 0.25}, {4.0 / 3.0, 0.75}});
    const auto w = witness_distribution(AmbiguitySpec::mean_var_support(1.0, 1.3, 5.0));
    check_atoms(w, {{0.0, 1.3 / 2.3}, {2.3, 1.0 / 2.3}});
    CHECK(membership_discrepancy(w, AmbiguitySpec::mean_var_support(1.0, 1.3, 5.0)) < 1e-12);
    check_atoms(witness_distribution(AmbiguitySpec::mean_only(3.0)), {{3.0, 1.0}});
    check_atoms(witness_distribution(AmbiguitySpec::mean_variance(3.0, 0.0)), {{3.0, 1.0}});
}

TEST_CASE("moments") {
    const auto d = DiscreteDistribution::from_atoms({{0.0, 0.5}, {2.0, 0.5}});
    const Moments m = moments(d);
    CHECK(m.mean == 1.0);
    CHECK(m.variance == 1.0);
    CHECK(m.mad == 1.0);
    const Moments p = moments(DiscreteDistribution::point_mass(2.5));
    CHECK(p.mean == 2.5);
    CHECK(p.variance == 0.0);
    CHECK(p.mad == 0.0);
}

TEST_CASE("from_atoms sorts, merges, clamps") {
    const auto d = DiscreteDistribution::from_atoms({{2.0, 0.25}, {0.0, 0.5}, {2.0 + 1e-14, 0.25}, {1.0, -1e-16}});
    check_atoms(d, {{0.0, 0.5}, {2.0, 0.5}});
    CHECK(code_of([] { DiscreteDistribution::from_atoms({{0.0, 0.5}, {1.0, 0.4}}); }) ==
          ErrorCode::InvalidDistribution);
    CHECK(code_of([] { DiscreteDistribution::from_atoms({{0.0, 1.1}, {1.0, -0.1}}); }) ==
          ErrorCode::InvalidDistribution);
    CHECK(code_of([] { DiscreteDistribution::from_atoms({}); }) == ErrorCode::InvalidDistribution);
}

TEST_CASE("sample inverts the CDF") {
    const auto d = DiscreteDistribution::from_atoms({{0.0, 0.25}, {1.0, 0.5}, {3.0, 0.25}});
    CHECK(d.sample(0.0) == 0.0);
    CHECK(d.sample(0.2499) == 0.0);
    CHECK(d.sample(0.25) == 1.0);
    CHECK(d.sample(0.7499) == 1.0);
    CHECK(d.sample(0.75) == 3.0);
    CHECK(d.sample(0.999999) == 3.0);
}

TEST_CASE("property: two_point_from_p reproduces mean and variance") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int tried = 0;
    for (int k = 0; k < 2000; ++k) {
        const double mu = 0.1 + 5.0 * U(rng);
        const double sigma = 3.0 * U(rng);
        const double p = 0.001 + 0.998 * U(rng);
        if (mu - std::sqrt((1 - p) / p) * sigma < 0.0) continue;
        ++tried;
        const Moments m = moments(two_point_from_p(mu, sigma, p));
        CHECK(m.mean == doctest::Approx(mu).epsilon(1e-12));
        CHECK(std::abs(m.variance - sigma * sigma) <= 1e-12 * std::max(1.0, sigma * sigma) * 10);
    }
    CHECK(tried > 200);
}

TEST_CASE("property: interval endpoints hit 0 and L") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double mu = 0.1 + 3.0 * U(rng);
        const double L = mu * (1.01 + 5.0 * U(rng));
        const double s2 = mu * (L - mu) * (0.01 + 0.98 * U(rng));
        const auto iv = feasible_p_interval(mu, std::sqrt(s2), L);
        REQUIRE(iv.lo <= iv.hi);
        CHECK(std::abs(two_point_from_p(mu, std::sqrt(s2), iv.lo).min_point()) <= 1e-12 * std::max(1.0, L));
        CHECK(std::abs(two_point_from_p(mu, std::sqrt(s2), iv.hi).max_point() - L) <= 1e-12 * std::max(1.0, L));
    }
}

TEST_CASE("property: validate accepts exactly when the witness is a member") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 600; ++k) {
        const double mu = 0.1 + 3.0 * U(rng);
        const double L = mu * (0.5 + 4.0 * U(rng));
        const double disp = mu * 3.0 * U(rng);
        AmbiguitySpec s;
        switch (k % 6) {
            case 0: s = AmbiguitySpec::mean_only(mu); break;
            case 1: s = AmbiguitySpec::mean_variance(mu, disp); break;
            case 2: s = AmbiguitySpec::two_point(mu, disp, L); break;
            case 3: s = AmbiguitySpec::mean_var_support(mu, disp, L); break;
            case 4: s = AmbiguitySpec::mean_mad(mu, disp); break;
            default: s = AmbiguitySpec::mean_mad_support(mu, disp, L); break;
        }
        bool valid = true;
        try {
            validate(s);
        } catch (const Error&) {
            valid = false;
        }
        bool witness_ok = true;
        try {
            const auto w = witness_distribution(s);
            CHECK(membership_discrepancy(w, s) <= 1e-12 * std::max(1.0, mu * mu + disp));
        } catch (const Error&) {
            witness_ok = false;
        }
        CHECK(valid == witness_ok);
    }
}

}  // TEST_SUITE
