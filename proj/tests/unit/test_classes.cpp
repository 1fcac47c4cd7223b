#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "depbounds/classes.hpp"
#include "depbounds/error.hpp"
#include "oracles.hpp"

using namespace depbounds;

namespace {

// Largest subset of the grid shattered by the binary rows of `values`.
int vc_by_shattering(const std::vector<std::vector<double>>& values, std::size_t grid) {
    int best = 0;
    for (std::uint32_t subset = 1; subset < (1u << grid); ++subset) {
        std::set<std::uint32_t> patterns;
        for (const auto& f : values) {
            std::uint32_t p = 0;
            for (std::size_t g = 0; g < grid; ++g)
                if ((subset >> g & 1u) && f[g] > 0.0) p |= 1u << g;
            patterns.insert(p);
        }
        const int size = __builtin_popcount(subset);
        if (patterns.size() == (1u << size)) best = std::max(best, size);
    }
    return best;
}

std::vector<std::vector<double>> random_binary_class(std::mt19937_64& rng, std::size_t functions, std::size_t grid) {
    std::bernoulli_distribution coin(0.5);
    std::vector<std::vector<double>> v(functions, std::vector<double>(grid));
    for (auto& f : v)
        for (auto& x : f) x = coin(rng) ? 1.0 : -1.0;
    return v;
}

std::vector<double> iota_grid(std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i);
    return g;
}

}  // namespace

TEST_CASE("threshold growth counts n + 1 dichotomies") {
    const auto cls = FunctionClass::threshold1d();
    const std::vector<double> three{0.3, -1.0, 2.0};
    CHECK(growth_function_exact(cls, three) == 4);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> z;
    for (std::size_t n = 1; n <= 12; ++n) {
        std::vector<double> pts(n);
        for (auto& p : pts) p = z(rng);
        CHECK(growth_function_exact(cls, pts) == n + 1);
    }
    const std::vector<double> repeated{1.0, 1.0};
    CHECK_THROWS_AS(growth_function_exact(cls, repeated), ParameterError);
}

TEST_CASE("finite class growth") {
    const std::vector<double> pts{0.0, 1.0, 2.0};
    const auto single = FunctionClass::finite(iota_grid(3), {{1, -1, 1}});
    CHECK(growth_function_exact(single, pts) == 1);

    std::vector<std::vector<double>> all;
    for (int m = 0; m < 8; ++m) all.push_back({m & 1 ? 1.0 : -1.0, m & 2 ? 1.0 : -1.0, m & 4 ? 1.0 : -1.0});
    const auto full = FunctionClass::finite(iota_grid(3), all);
    CHECK(growth_function_exact(full, pts) == 8);
    CHECK(full.vc_dim() == 3);
}

TEST_CASE("unsupported kinds refuse enumeration") {
    const std::vector<double> pts{0.0, 1.0};
    CHECK_THROWS_AS(growth_function_exact(FunctionClass::linear_ball(2, 1.0), pts), UnsupportedError);
    CHECK_THROWS_AS(growth_function_exact(FunctionClass::codebook(2, 1, 1.0), pts), UnsupportedError);
}

TEST_CASE("descriptor invariants") {
    CHECK(FunctionClass::linear_ball(3, 1.0, true).vc_dim() == 4);
    CHECK(FunctionClass::linear_ball(3, 1.0, false).vc_dim() == 3);
    CHECK(FunctionClass::threshold1d().vc_dim() == 1);
    CHECK_THROWS_AS(FunctionClass::linear_ball(0, 1.0), ParameterError);
    CHECK_THROWS_AS(FunctionClass::linear_ball(2, 0.0), ParameterError);
    CHECK_THROWS_AS(FunctionClass::codebook(0, 1, 1.0), ParameterError);
    CHECK_THROWS_AS(FunctionClass::kernel_ball({}, -1.0), ParameterError);
}

TEST_CASE("finite vc dimension matches shattering enumeration") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t grid = 2 + trial % 5;
        const std::size_t functions = 1 + trial % 9;
        const auto values = random_binary_class(rng, functions, grid);
        const auto cls = FunctionClass::finite(iota_grid(grid), values);
        REQUIRE(cls.vc_dim().has_value());
        CHECK(*cls.vc_dim() == vc_by_shattering(values, grid));
    }
}

TEST_CASE("sauer bound examples") {
    CHECK(sauer_growth_bound(3, 3) == doctest::Approx(8.0));
    CHECK(sauer_growth_bound(2, 10) == doctest::Approx(184.7264).epsilon(1e-6));
    // (e n / d)^d = 2e exceeds 2^n = 4 here, so the cap applies.
    CHECK(sauer_growth_bound(1, 2) == doctest::Approx(4.0));
    CHECK(sauer_growth_bound(1, 6) == doctest::Approx(6.0 * std::numbers::e).epsilon(1e-12));
    CHECK(sauer_growth_bound(5, 3) == doctest::Approx(8.0));
}

TEST_CASE("growth never exceeds the Sauer bound") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t grid = 1 + trial % 12;
        const auto values = random_binary_class(rng, 1 + trial % 20, grid);
        const auto cls = FunctionClass::finite(iota_grid(grid), values);
        const auto d = cls.vc_dim().value_or(0);
        if (d == 0) continue;
        const auto pts = iota_grid(grid);
        CHECK(static_cast<double>(growth_function_exact(cls, pts)) <= sauer_growth_bound(d, grid) + 1e-9);
    }
    for (std::size_t n = 1; n <= 12; ++n) {
        std::vector<double> pts(n);
        for (std::size_t i = 0; i < n; ++i) pts[i] = 0.5 * static_cast<double>(i);
        CHECK(static_cast<double>(growth_function_exact(FunctionClass::threshold1d(), pts)) <=
              sauer_growth_bound(1, n) + 1e-9);
    }
}

TEST_CASE("pseudo metric") {
    const std::vector<double> f{1.0, 2.0};
    const std::vector<double> g{-1.0, -2.0};
    CHECK(pseudo_metric(f, f) == 0.0);
    CHECK(pseudo_metric(f, g) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
    const std::vector<double> ones(7, 1.0), zeros(7, 0.0);
    CHECK(pseudo_metric(ones, zeros) == doctest::Approx(1.0));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    for (int t = 0; t < 500; ++t) {
        std::vector<double> a(6), b(6), c(6);
        for (int i = 0; i < 6; ++i) {
            a[i] = z(rng);
            b[i] = z(rng);
            c[i] = z(rng);
        }
        CHECK(std::abs(pseudo_metric(a, b) - pseudo_metric(b, a)) <= 1e-12);
        CHECK(pseudo_metric(a, c) <= pseudo_metric(a, b) + pseudo_metric(b, c) + 1e-12);
    }
}

TEST_CASE("covering number examples") {
    const PseudoMetricSample single(3, {{0.0, 1.0, 2.0}});
    CHECK(covering_number_greedy(single, 0.01) == 1);
    CHECK(covering_number_greedy(single, 100.0) == 1);

    const PseudoMetricSample pair(2, {{0.0, 0.0}, {1.0, 1.0}});  // distance D = 1
    CHECK(pair.diameter() == doctest::Approx(1.0));
    CHECK(covering_number_greedy(pair, 1.5) == 1);
    CHECK(covering_number_greedy(pair, 0.5) == 2);
    CHECK(oracle::exhaustive_covering({{0.0, 0.0}, {1.0, 1.0}}, 0.5) == 2);
    CHECK_THROWS_AS(covering_number_greedy(pair, 0.0), ParameterError);
}

TEST_CASE("greedy covering is an upper bound and monotone in epsilon") {
    // Greedy is not always optimal.
    const PseudoMetricSample line(1, {{2}, {3}, {7}, {11}, {15}, {17}});
    CHECK(oracle::exhaustive_covering({{2}, {3}, {7}, {11}, {15}, {17}}, 4.5) == 2);
    CHECK(covering_number_greedy(line, 4.5) >= 2);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int equal = 0, total = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t m = 2 + trial % 11;
        std::vector<std::vector<double>> fns(m, std::vector<double>(5));
        for (auto& f : fns)
            for (auto& x : f) x = u(rng);
        const PseudoMetricSample s(5, fns);
        std::size_t previous = m + 1;
        for (double eps : {0.05, 0.2, 0.4, 0.6, 0.8, 1.0, 1.5}) {
            const auto g = covering_number_greedy(s, eps);
            const auto e = oracle::exhaustive_covering(fns, eps);
            CHECK(g >= e);
            CHECK(g <= previous);
            // The returned net really covers.
            const auto net = greedy_net(s, eps);
            for (std::size_t f = 0; f < m; ++f) {
                double closest = 1e300;
                for (auto c : net) closest = std::min(closest, s.distance(f, c));
                CHECK(closest < eps);
            }
            previous = g;
            equal += g == e;
            ++total;
        }
    }
    CHECK(equal * 10 >= total * 8);  // greedy is optimal on most random instances
}
