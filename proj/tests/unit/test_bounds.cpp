#include "doctest.h"

#include <cmath>
#include <numbers>

#include "depbounds/bounds.hpp"
#include "depbounds/error.hpp"
#include "oracles.hpp"

using namespace depbounds;

namespace {

void check_terms(const RiskBoundReport& r) {
    CHECK(r.bound_value ==
          doctest::Approx(r.empirical_risk_term + r.complexity_term + r.concentration_term).epsilon(1e-14));
    CHECK(r.bound_value >= r.empirical_risk_term);
    CHECK(r.complexity_term >= 0.0);
    CHECK(r.concentration_term >= 0.0);
    CHECK(!r.theorem_tag.empty());
}

}  // namespace

TEST_CASE("concentration tails") {
    const std::vector<double> c(5, 0.3);
    CHECK(concentration_tail(TailKind::bounded_difference, c, 0.0, 5) == 1.0);

    const std::vector<double> ranges(10, 1.0);
    const double h = concentration_tail(TailKind::hoeffding, ranges, 0.3, 10);
    CHECK(h == doctest::Approx(std::exp(-1.8)).epsilon(1e-14));
    CHECK(h == doctest::Approx(0.16530).epsilon(1e-4));
    // mean - 1/2 > 0.3 means at least 9 heads out of 10.
    const double exact = static_cast<double>(oracle::fair_coin_count_at_least(10, 9)) / 1024.0;
    CHECK(exact == doctest::Approx(11.0 / 1024.0));
    CHECK(exact <= h);

    for (std::uint64_t n : {5u, 50u, 500u})
        for (double b : {1.0, 4.0})
            for (double eps : {0.01, 0.1, 0.5}) {
                const std::vector<double> cs(n, b / static_cast<double>(n));
                CHECK(concentration_tail(TailKind::bounded_difference, cs, eps, n) ==
                      doctest::Approx(std::exp(-2.0 * static_cast<double>(n) * eps * eps / (b * b))).epsilon(1e-12));
            }

    CHECK_THROWS_AS(concentration_tail(TailKind::hoeffding, ranges, 0.3, 9), ParameterError);
    const std::vector<double> bad{1.0, 0.0};
    CHECK_THROWS_AS(concentration_tail(TailKind::bounded_difference, bad, 0.3, 2), ParameterError);
}

TEST_CASE("binomial tail and quarter lemma") {
    CHECK(binomial_upper_tail(10, 0.5, 5) == doctest::Approx(638.0 / 1024.0).epsilon(1e-12));
    CHECK(binomial_upper_tail(3, 0.9, 3) == doctest::Approx(0.729).epsilon(1e-12));
    for (unsigned m : {1u, 7u, 30u, 50u})
        for (double p : {0.05, 0.3, 0.77})
            for (unsigned k = 0; k <= m; ++k)
                CHECK(binomial_upper_tail(m, p, k) ==
                      doctest::Approx(static_cast<double>(oracle::binomial_tail(m, p, k))).epsilon(1e-10));
    CHECK(binomial_quarter_lemma_holds(10, 0.5));
    CHECK(binomial_quarter_lemma_holds(3, 0.9));
    CHECK_THROWS_WITH_AS(binomial_quarter_lemma_holds(5, 0.1), doctest::Contains("p > 1/m"), ParameterError);
}

TEST_CASE("basic vc bound") {
    const auto r = vc_bound(0.0, 100000, Capacity::vc(4), 0.05);
    CHECK(r.bound_value == doctest::Approx(0.0638548).epsilon(1e-6));
    CHECK(r.theorem_tag == "vc_basic_dependent");
    CHECK(r.n == 100000);
    check_terms(r);
    const auto shifted = vc_bound(0.1, 100000, Capacity::vc(4), 0.05);
    CHECK(shifted.bound_value == doctest::Approx(r.bound_value + 0.1).epsilon(1e-14));
    const auto unit = vc_bound(0.2, 1000, Capacity::growth_at_2n(1.0), 0.05);
    CHECK(unit.bound_value == doctest::Approx(0.2 + 2.0 * std::sqrt(2.0 * std::log(40.0) / 1000.0)).epsilon(1e-14));
    CHECK(unit.complexity_term == 0.0);
    // Growth given directly equals the Sauer form when the value matches.
    const double sauer = std::pow(2.0 * std::numbers::e * 500.0 / 3.0, 3.0);
    CHECK(vc_bound(0.0, 500, Capacity::growth_at_2n(sauer), 0.1).bound_value ==
          doctest::Approx(vc_bound(0.0, 500, Capacity::vc(3), 0.1).bound_value).epsilon(1e-12));
    CHECK(vc_bound(0.0, 500, Capacity::log_growth_at_2n(std::log(sauer)), 0.1).bound_value ==
          doctest::Approx(vc_bound(0.0, 500, Capacity::vc(3), 0.1).bound_value).epsilon(1e-12));

    CHECK_THROWS_AS(vc_bound(0.0, 100, Capacity::vc(4), 0.0), ParameterError);
    CHECK_THROWS_AS(vc_bound(0.0, 100, Capacity::vc(4), 1.0), ParameterError);
    CHECK_THROWS_AS(vc_bound(0.0, 3, Capacity::vc(4), 0.1), ParameterError);
    CHECK_THROWS_AS(vc_bound(-0.1, 100, Capacity::vc(4), 0.1), ParameterError);
    CHECK_THROWS_AS(Capacity::growth_at_2n(0.5), ParameterError);
}

TEST_CASE("relative deviation bound") {
    const auto r = vc_relative_bound(0.0, 100000, Capacity::vc(4), 0.05);
    CHECK(r.bound_value == doctest::Approx(2.066446e-3).epsilon(1e-6));
    const double c = (4.0 * std::log(2.0 * std::numbers::e * 1e5 / 4.0) + std::log(80.0)) / 1e5;
    CHECK(r.bound_value == doctest::Approx(4.0 * c).epsilon(1e-14));
    CHECK(r.theorem_tag == "vc_relative_dependent");
    check_terms(r);
    CHECK_THROWS_WITH_AS(vc_relative_bound(0.0, 1000, Capacity::vc(2), 0.05, false), doctest::Contains("stationary"),
                         ParameterError);
    for (double delta : {0.5, 0.05, 1e-6})
        for (std::uint64_t n : {100u, 10000u}) {
            const auto one = vc_relative_bound(1.0, n, Capacity::vc(2), delta);
            const double cc = (2.0 * std::log(2.0 * std::numbers::e * static_cast<double>(n) / 2.0) +
                               std::log(4.0 / delta)) / static_cast<double>(n);
            CHECK(one.bound_value == doctest::Approx(1.0 + 2.0 * std::sqrt(cc) + 4.0 * cc).epsilon(1e-13));
            CHECK(one.bound_value >= 1.0 + 2.0 * std::sqrt(cc));
            check_terms(one);
        }
}

TEST_CASE("fast-rate crossover") {
    for (int d : {1, 3, 5, 10})
        for (double delta : {0.1, 0.01, 1e-6}) {
            std::uint64_t first_below = 0;
            bool stays_below = true;
            for (std::uint64_t n = static_cast<std::uint64_t>(d); n <= 10000000; n = n * 5 / 4 + 1) {
                const double rel = vc_relative_bound(0.0, n, Capacity::vc(d), delta).bound_value;
                const double basic = vc_bound(0.0, n, Capacity::vc(d), delta).bound_value;
                if (rel < basic) {
                    if (first_below == 0) first_below = n;
                } else if (first_below != 0) {
                    stays_below = false;
                }
            }
            CHECK(first_below != 0);
            CHECK(stays_below);
        }
}

TEST_CASE("regression reduction") {
    CHECK(induced_regression_vc_dim(2) == 8);
    CHECK(induced_regression_vc_dim(1) == 4);
    const auto plain = vc_bound(0.05, 5000, Capacity::vc(8), 0.05);
    const auto unit = regression_vc_bound(0.05, 5000, 8, 0.05, 1.0);
    CHECK(unit.bound_value == doctest::Approx(plain.bound_value).epsilon(1e-14));
    const auto r = regression_vc_bound(0.0, 100000, 8, 0.05, 4.0);
    CHECK(r.bound_value == doctest::Approx(0.344468).epsilon(1e-6));
    CHECK(r.theorem_tag == "vc_regression_reduction");
    check_terms(r);
    CHECK_THROWS_AS(regression_vc_bound(0.0, 1000, 8, 0.05, 0.0), ParameterError);
}

TEST_CASE("rademacher risk bounds") {
    const std::vector<double> two{0.02, 0.02};
    const auto r = rademacher_risk_bound(RademacherVariant::two_sided, 0.1, two, 1.0, 1000, 0.05);
    CHECK(r.bound_value == doctest::Approx(0.178703).epsilon(1e-6));
    CHECK(r.theorem_tag == "rademacher_two_sided");
    check_terms(r);
    const auto certain = rademacher_risk_bound(RademacherVariant::two_sided, 0.1, two, 1.0, 1000, 1.0);
    CHECK(certain.concentration_term == 0.0);
    CHECK(certain.bound_value == doctest::Approx(0.14));

    const std::vector<double> avg{0.02};
    const auto m = rademacher_risk_bound(RademacherVariant::marginal, 0.1, avg, 1.0, 1000, 0.05);
    CHECK(m.bound_value == doctest::Approx(r.bound_value).epsilon(1e-14));
    CHECK(m.theorem_tag == "rademacher_marginal");
    const auto w = rademacher_risk_bound(RademacherVariant::worst_case, 0.0, avg, 2.0, 50, 0.1);
    CHECK(w.bound_value == doctest::Approx(0.04 + 2.0 * std::sqrt(std::log(10.0) / 100.0)).epsilon(1e-14));
    CHECK(w.theorem_tag == "rademacher_worst_case");

    const std::vector<double> negative{-0.01};
    CHECK_THROWS_AS(rademacher_risk_bound(RademacherVariant::marginal, 0.0, negative, 1.0, 10, 0.1), ParameterError);
    CHECK_THROWS_AS(rademacher_risk_bound(RademacherVariant::two_sided, 0.0, avg, 1.0, 10, 0.1), ParameterError);
}

TEST_CASE("class rademacher upper bounds") {
    const MomentInput sum{MomentInput::Kind::sum_sq_norm, 100.0};
    CHECK(class_rad_upper(RadFamily::linear, {1.0, 2.0, std::nullopt, std::nullopt}, sum, 100) ==
          doctest::Approx(0.8));
    CHECK(class_rad_upper(RadFamily::kernel_gaussian, {1.0, 2.0, std::nullopt, std::nullopt},
                          {MomentInput::Kind::sup_norm, 1.0}, 100) == doctest::Approx(0.8));
    CHECK(class_rad_upper(RadFamily::kernel_gaussian, {1.0, 2.0, std::nullopt, std::nullopt},
                          {MomentInput::Kind::sum_kernel_diag, 100.0}, 100) == doctest::Approx(0.8));
    CHECK(class_rad_upper(RadFamily::margin_linear, {std::nullopt, 1.0, 0.5, std::nullopt}, sum, 100) ==
          doctest::Approx(0.2));
    CHECK(class_rad_upper(RadFamily::vq, {std::nullopt, 1.0, std::nullopt, std::size_t{2}}, sum, 100) ==
          doctest::Approx(0.6));
    CHECK(class_rad_upper(RadFamily::linear, {1.0, 2.0, std::nullopt, std::nullopt},
                          {MomentInput::Kind::sup_norm, 3.0}, 100) == doctest::Approx(4.0 * 2.0 * 3.0 / 10.0));
    CHECK_THROWS_WITH_AS(class_rad_upper(RadFamily::margin_linear, {std::nullopt, 1.0, std::nullopt, std::nullopt}, sum,
                                         100),
                         doctest::Contains("gamma"), ParameterError);
    CHECK_THROWS_AS(class_rad_upper(RadFamily::vq, {}, sum, 100), ParameterError);
}

TEST_CASE("chaining") {
    const LogCovering one = [](double) { return 0.0; };
    CHECK(chaining_rad_upper(0.0, 3, one, 100) == 0.0);
    for (int depth : {1, 4, 9})
        CHECK(chaining_rad_upper(2.0, depth, one, 100, 3.0) == doctest::Approx(3.0 * 2.0 / std::pow(2.0, depth)));
    const LogCovering two = [](double) { return std::log(2.0); };
    CHECK(chaining_rad_upper(1.0, 3, two, 100) == doctest::Approx(0.562091).epsilon(1e-6));
    CHECK(chaining_rad_upper(1.0, 3, two, 100) ==
          doctest::Approx(0.125 + 6.0 * 0.875 * std::sqrt(std::log(2.0) / 100.0)).epsilon(1e-14));

    const auto best = chaining_rad_upper_best(1.0, two, 100);
    for (int depth = 1; depth <= 40; ++depth) CHECK(best.value <= chaining_rad_upper(1.0, depth, two, 100) + 1e-15);
    CHECK(best.value == doctest::Approx(chaining_rad_upper(1.0, best.depth, two, 100)));

    const LogCovering negative = [](double) { return -1.0; };
    CHECK_THROWS_AS(chaining_rad_upper(1.0, 2, negative, 100), ParameterError);
    const LogCovering wrong_way = [](double e) { return e; };
    CHECK_THROWS_AS(chaining_rad_upper(1.0, 3, wrong_way, 100), ParameterError);

    const auto spectral = spectral_log_covering(0.5, 20.0);
    CHECK(spectral(2.0) == doctest::Approx(0.5 * 20.0 / 4.0));

    const PseudoMetricSample s(2, {{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.9}});
    const auto greedy = greedy_log_covering(s);
    CHECK(greedy(10.0) == doctest::Approx(0.0));
    CHECK(greedy(0.5) == doctest::Approx(std::log(2.0)));
    CHECK(greedy(0.01) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("mixing reference bound") {
    CHECK_FALSE(mixing_reference_bound(0.0, 0.0, 1.0, 100, 10, 0.001, 0.01).has_value());
    const auto r = mixing_reference_bound(0.0, 0.0, 1.0, 100, 10, 1e-6, 0.05);
    REQUIRE(r.has_value());
    CHECK(r->bound_value == doctest::Approx(0.122550).epsilon(1e-6));
    CHECK(r->theorem_tag == "mixing_reference_beta");
    CHECK(r->n == 2000);
    check_terms(*r);

    const std::vector<double> rad{0.03};
    const auto zero_beta = mixing_reference_bound(0.1, 0.03, 2.0, 250, 4, 0.0, 0.05);
    const auto marginal = rademacher_risk_bound(RademacherVariant::marginal, 0.1, rad, 2.0, 250, 0.05);
    REQUIRE(zero_beta.has_value());
    CHECK(zero_beta->bound_value == doctest::Approx(marginal.bound_value).epsilon(1e-14));
}

TEST_CASE("monotonicity in n and delta") {
    for (int d : {1, 4, 10}) {
        double previous = 1e300;
        for (std::uint64_t n = static_cast<std::uint64_t>(d); n <= 1000000; n = n * 3 / 2 + 1) {
            const double v = vc_bound(0.1, n, Capacity::vc(d), 0.05).bound_value;
            CHECK(v <= previous);
            previous = v;
        }
    }
    const std::vector<double> rad{0.05};
    const std::vector<double> rad2{0.05, 0.04};
    double prev[6] = {1e300, 1e300, 1e300, 1e300, 1e300, 1e300};
    for (double delta = 1e-9; delta < 1.0; delta *= 3.0) {
        const double vals[6] = {
            vc_bound(0.1, 1000, Capacity::vc(3), delta).bound_value,
            vc_relative_bound(0.1, 1000, Capacity::vc(3), delta).bound_value,
            regression_vc_bound(0.1, 1000, 8, delta, 4.0).bound_value,
            rademacher_risk_bound(RademacherVariant::marginal, 0.1, rad, 1.0, 1000, delta).bound_value,
            rademacher_risk_bound(RademacherVariant::two_sided, 0.1, rad2, 1.0, 1000, delta).bound_value,
            mixing_reference_bound(0.1, 0.05, 1.0, 50, 10, 0.0, delta)->bound_value,
        };
        for (int k = 0; k < 6; ++k) {
            CHECK(vals[k] <= prev[k]);
            prev[k] = vals[k];
        }
    }
}

TEST_CASE("hoeffding dominates exact binomial tails") {
    // P(S/n - p > eps) with p and eps in hundredths: S > n (p + eps) exactly.
    for (unsigned n = 1; n <= 30; ++n) {
        const std::vector<double> ranges(n, 1.0);
        for (int p100 = 5; p100 <= 95; p100 += 15)
            for (int e100 = 1; e100 <= 100; ++e100) {
                const unsigned long long threshold = static_cast<unsigned long long>(n) * (p100 + e100);
                const unsigned k = static_cast<unsigned>(threshold / 100 + 1);
                const long double exact = k > n ? 0.0L : oracle::binomial_tail(n, p100 / 100.0L, k);
                const double bound = concentration_tail(TailKind::hoeffding, ranges, e100 / 100.0, n);
                CHECK(static_cast<double>(exact) <= bound * (1.0 + 1e-12));
            }
    }
}
