#include "doctest.h"

#include <cmath>
#include <random>

#include "depbounds/bounds.hpp"
#include "depbounds/error.hpp"
#include "depbounds/estimators.hpp"
#include "depbounds/experiments.hpp"
#include "oracles.hpp"

using namespace depbounds;

namespace {

SequenceSample hand_sample(std::vector<double> x, std::vector<double> y) {
    SequenceSample s;
    s.x = Points::scalars(std::move(x));
    s.y = std::move(y);
    return s;
}

double zero_one_on(const SequenceSample& s, double b) {
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) e += ((s.x[i][0] - b >= 0.0) ? 1.0 : -1.0) != s.y[i];
    return e / static_cast<double>(s.size());
}

const ProcessSpec ar1{Ar1Threshold{0.8, 0.6, 0.0, 0.1}};

}  // namespace

TEST_CASE("empirical risk examples") {
    const auto zo = LossSpec::zero_one();
    const auto s = hand_sample({-1.0, 1.0}, {1.0, 1.0});
    CHECK(empirical_risk(ThresholdModel{0.0}, zo, s) == doctest::Approx(0.5));
    const auto clean = simulate_sequence(ProcessSpec{Ar1Threshold{0.5, 1.0, 0.3, 0.0}}, 500, 1);
    CHECK(empirical_risk(ThresholdModel{0.3}, zo, clean) == 0.0);
    // Constant-wrong: predicts +1 everywhere on all-negative labels.
    const auto neg = hand_sample({1.0, 2.0, 3.0}, {-1.0, -1.0, -1.0});
    CHECK(empirical_risk(ThresholdModel{-100.0}, zo, neg) == 1.0);
    CHECK_THROWS_AS(empirical_risk(ThresholdModel{0.0}, zo, hand_sample({}, {})), ParameterError);
}

TEST_CASE("risk by fresh-path averaging") {
    const auto zo = LossSpec::zero_one();
    const ProcessSpec clean{Ar1Threshold{0.8, 0.6, 0.2, 0.0}};
    const auto zero = risk_mc(ThresholdModel{0.2}, zo, clean, 100, 20, 3, 2);
    CHECK(zero.value == 0.0);
    CHECK(zero.std_error == 0.0);
    CHECK(zero.replications == 20);

    const auto bayes = risk_mc(ThresholdModel{0.0}, zo, ar1, 200, 200, 4, 0);
    CHECK(std::abs(bayes.value - 0.1) <= 3.0 * bayes.std_error);

    const ProcessSpec iid{IidBaseline{IidBaseline::Distribution::normal, 0.0, 1.0, 0.0, 0.2}};
    for (double b : {-1.0, 0.5, 2.0}) {
        const auto est = risk_mc(ThresholdModel{b}, zo, iid, 100, 300, 5, 0);
        CHECK(std::abs(est.value - threshold_risk(iid, b)) <= 3.0 * est.std_error);
        CHECK((est.value >= 0.0 && est.value <= 1.0));
    }
    CHECK_THROWS_AS(risk_mc(ThresholdModel{0.0}, zo, ar1, 10, 1, 1), ParameterError);
}

TEST_CASE("results do not depend on the thread count") {
    const auto zo = LossSpec::zero_one();
    const auto a = risk_mc(ThresholdModel{0.3}, zo, ar1, 300, 50, 9, 1);
    const auto b = risk_mc(ThresholdModel{0.3}, zo, ar1, 300, 50, 9, 8);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("empirical rademacher examples") {
    const auto pts = Points::scalars({-1.0, 1.0, -1.0, 1.0, 1.0});
    const auto single = FunctionClass::finite({-1.0, 1.0}, {{0.3, -0.7}});
    const auto est = empirical_rademacher(single, pts, 2000, 1);
    // E sigma = 0: the Monte-Carlo value is an average of a single linear form.
    CHECK(std::abs(est.value) <= 3.0 * est.std_error + 1e-12);
    CHECK(exact_empirical_rademacher(single, pts) == doctest::Approx(0.0).epsilon(1e-15));

    const Points one(2, {3.0, 4.0});
    const auto ball = FunctionClass::linear_ball(2, 2.0);
    const auto e = empirical_rademacher(ball, one, 100, 2);
    CHECK(e.value == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(e.std_error == doctest::Approx(0.0));

    CHECK_THROWS_AS(empirical_rademacher(FunctionClass::codebook(2, 1, 1.0), pts, 10, 1), UnsupportedError);
}

TEST_CASE("finite class rademacher against sign enumeration") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 8, grid = 8;
        std::vector<double> g(grid);
        for (std::size_t i = 0; i < grid; ++i) g[i] = static_cast<double>(i);
        std::vector<std::vector<double>> values(2 + trial % 6, std::vector<double>(grid));
        for (auto& f : values)
            for (auto& v : f) v = u(rng);
        const auto cls = FunctionClass::finite(g, values);
        const auto pts = Points::scalars(g);
        const double brute = oracle::rademacher_brute(values);
        CHECK(exact_empirical_rademacher(cls, pts) == doctest::Approx(brute).epsilon(1e-12));
        const auto mc = empirical_rademacher(cls, pts, 4000, 100 + trial);
        CHECK(std::abs(mc.value - brute) <= 3.0 * mc.std_error);
        (void)n;
    }
}

TEST_CASE("threshold rademacher against sign enumeration") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> z;
    for (std::size_t n = 1; n <= 10; ++n) {
        std::vector<double> x(n);
        for (auto& v : x) v = z(rng);
        // All n + 1 dichotomies as explicit functions.
        std::vector<std::vector<double>> fns;
        std::vector<double> sorted = x;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> cuts{sorted.front() - 1.0};
        for (std::size_t i = 0; i + 1 < n; ++i) cuts.push_back(0.5 * (sorted[i] + sorted[i + 1]));
        cuts.push_back(sorted.back() + 1.0);
        for (double b : cuts) {
            std::vector<double> f;
            for (double v : x) f.push_back(v - b >= 0.0 ? 1.0 : -1.0);
            fns.push_back(f);
        }
        CHECK(exact_empirical_rademacher(FunctionClass::threshold1d(), Points::scalars(x)) ==
              doctest::Approx(oracle::rademacher_brute(fns)).epsilon(1e-12));
    }
}

TEST_CASE("linear ball scaling and nesting") {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> z;
    Points pts(3);
    for (int i = 0; i < 40; ++i) {
        const std::vector<double> p{z(rng), z(rng), z(rng)};
        pts.push_back(p);
    }
    const auto small = empirical_rademacher(FunctionClass::linear_ball(3, 0.5), pts, 300, 21);
    const auto large = empirical_rademacher(FunctionClass::linear_ball(3, 1.5), pts, 300, 21);
    CHECK(small.value <= large.value);
    CHECK(large.value == doctest::Approx(3.0 * small.value).epsilon(1e-12));

    // Offset term: the class is the ball over (w, b) acting on (x, 1).
    const std::vector<std::vector<double>> aug{{1.0, 1.0}, {-2.0, 1.0}, {0.5, 1.0}};
    const auto one_d = Points::scalars({1.0, -2.0, 0.5});
    double oracle_mean = 0.0;
    oracle::for_each_sign_vector(3, [&](const std::vector<int>& s) {
        oracle_mean += oracle::linear_sup_gram(aug, s, 2.0) / 8.0;
    });
    CHECK(exact_empirical_rademacher(FunctionClass::linear_ball(1, 2.0, true), one_d) ==
          doctest::Approx(oracle_mean).epsilon(1e-12));
}

TEST_CASE("kernel ball supremum") {
    const auto pts = Points::scalars({0.0, 0.5, 2.0, -1.0});
    KernelSpec lin;
    lin.kind = KernelSpec::Kind::linear;
    // Linear kernel ball equals the linear ball without offset.
    CHECK(exact_empirical_rademacher(FunctionClass::kernel_ball(lin, 1.5), pts) ==
          doctest::Approx(exact_empirical_rademacher(FunctionClass::linear_ball(1, 1.5), pts)).epsilon(1e-12));
    // Gaussian kernel: K(x,x) = 1 so each sign vector gives at most Lambda sqrt(n) / n.
    const auto g = FunctionClass::kernel_ball(KernelSpec{KernelSpec::Kind::gaussian, 0.7}, 1.0);
    CHECK(exact_empirical_rademacher(g, pts) <= 1.0 / std::sqrt(4.0) + 1e-12);
}

TEST_CASE("sup deviation examples") {
    const auto zo = LossSpec::zero_one();
    const ProcessSpec mb{MarkovBinary{0.7}};
    const auto s = simulate_sequence(mb, 400, 2);
    // Single function: the deviation is L - L_hat of that function.
    const auto flip = FunctionClass::finite({-1.0, 1.0}, {{1.0, -1.0}});
    const std::vector<double> risk_one{1.0};
    CHECK(sup_deviation(flip, zo, s, risk_one).value == doctest::Approx(0.0));
    const auto half = FunctionClass::finite({-1.0, 1.0}, {{1.0, 1.0}});
    const auto risks = finite_class_risks(*half.as<FiniteFunctions>(), zo, mb);
    CHECK(risks[0] == doctest::Approx(0.5));
    double neg = 0.0;
    for (double y : s.y) neg += y == -1.0;
    CHECK(sup_deviation(half, zo, s, risks).value == doctest::Approx(0.5 - neg / 400.0));
    // Identical behaviours on the sample, risk equal to the empirical risk.
    const auto same = FunctionClass::finite({-1.0, 1.0}, {{-1.0, 1.0}, {-1.0, 1.0}});
    const std::vector<double> zeros{0.0, 0.0};
    CHECK(sup_deviation(same, zo, s, zeros).value == 0.0);

    CHECK_THROWS_AS(sup_deviation(FunctionClass::linear_ball(1, 1.0), zo, s, zeros), UnsupportedError);
    CHECK_THROWS_AS(sup_deviation(FunctionClass::threshold1d(), LossSpec::margin(0.5), s,
                                  [](double) { return 0.0; }),
                    IncompatibleError);
}

TEST_CASE("threshold sup deviation dominates every threshold") {
    const auto zo = LossSpec::zero_one();
    const auto risk = [](double b) { return threshold_risk(ar1, b); };
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = simulate_sequence(ar1, 200, seed);
        const auto sup = sup_deviation(FunctionClass::threshold1d(), zo, s, risk);
        for (double b = -4.0; b <= 4.0; b += 0.01) CHECK(risk(b) - zero_one_on(s, b) <= sup.value + 1e-12);
        // The reported threshold attains the value, possibly as the open end of its cell.
        const double inside = std::nextafter(sup.threshold, INFINITY);
        const double at = risk(sup.threshold) - zero_one_on(s, sup.threshold);
        const double near = risk(inside) - zero_one_on(s, inside);
        CHECK(std::min(std::abs(at - sup.value), std::abs(near - sup.value)) <= 1e-9);
    }
}

TEST_CASE("ghost gap against brute force") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto train = simulate_sequence(ar1, 60, seed);
        const auto ghost = sample_marginal(ar1, 60, seed + 100);
        double best = -1.0;
        std::vector<double> cand{-1e9};
        for (std::size_t i = 0; i < 60; ++i) {
            cand.push_back(train.x[i][0]);
            cand.push_back(ghost.x[i][0]);
            cand.push_back(std::nextafter(train.x[i][0], 1e9));
            cand.push_back(std::nextafter(ghost.x[i][0], 1e9));
        }
        for (double b : cand) best = std::max(best, zero_one_on(ghost, b) - zero_one_on(train, b));
        CHECK(sup_ghost_gap(FunctionClass::threshold1d(), train, ghost) == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("violation rate") {
    const auto program = experiments::one_dimensional_margin_program(0.1, -10.0, 10.0);
    const auto draws = sample_marginal(ar1, 10000, 3);
    const std::vector<double> safe{9.0};
    const std::vector<double> bad{-9.0};
    CHECK(violation_rate(safe, program, draws.x) == 0.0);
    CHECK(violation_rate(bad, program, draws.x) == 1.0);
    const std::vector<double> median{0.0};
    CHECK(std::abs(violation_rate(median, program, draws.x) - 0.5) <= 3.0 / 100.0);
    CHECK_THROWS_AS(violation_rate(safe, program, Points(1)), ParameterError);
}

TEST_CASE("symmetrization check") {
    const auto zo = LossSpec::zero_one();
    CHECK_THROWS_WITH_AS(verify_symmetrization(FunctionClass::threshold1d(), zo, ar1, 10, 0.2, 10, 1),
                         doctest::Contains("n*epsilon^2 >= 2*B^2"), ParameterError);
    const ProcessSpec mb{MarkovBinary{0.8}};
    const auto single = FunctionClass::finite({-1.0, 1.0}, {{1.0, 1.0}});
    const auto one = verify_symmetrization(single, zo, mb, 100, 0.2, 300, 4, 0);
    CHECK(one.holds);
    const auto thr = verify_symmetrization(FunctionClass::threshold1d(), zo, ar1, 200, 0.2, 200, 5, 0);
    CHECK(thr.holds);
    CHECK(thr.replications == 200);
    CHECK((thr.lhs_freq >= 0.0 && thr.lhs_freq <= 1.0));
}

TEST_CASE("vc slack covers threshold deviations at n = 500") {
    experiments::CoverageSetup s;
    s.n = 500;
    s.replications = 200;
    s.seed = 31;
    const auto r = experiments::vc_coverage(s);
    CHECK(r.records.size() == 200);
    CHECK(r.holds_fraction >= 0.95);
}

TEST_CASE("summaries") {
    const std::vector<double> draws{1.0, 2.0, 3.0, 4.0};
    const auto e = summarize(draws, 5);
    CHECK(e.value == doctest::Approx(2.5));
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(e.seed == 5);
}
