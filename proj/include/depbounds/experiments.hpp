#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "depbounds/processes.hpp"
#include "depbounds/scenario.hpp"

namespace depbounds::experiments {

struct Record {
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    double statistic = 0.0;
    double bound = 0.0;
    bool holds = false;
};

struct Result {
    std::string name;
    std::vector<Record> records;
    double holds_fraction = 0.0;
    double required_fraction = 0.0;  // pass threshold on holds_fraction
    bool passed = false;
    std::vector<std::pair<std::string, double>> summary;
};

struct CoverageSetup {
    ProcessSpec process{Ar1Threshold{0.8, 0.6, 0.0, 0.1}};
    std::size_t n = 2000;
    std::size_t replications = 200;
    double delta = 0.05;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
};

// Threshold classifiers on threshold-labelled paths: sup_f L(f) - L_hat(f) against
// the basic VC slack with the exact growth function 2n + 1 at 2n.
Result vc_coverage(const CoverageSetup& setup);

// Same class against the relative-deviation bound: statistic is
// sup_f L(f) - L_hat(f) - 2 sqrt(L_hat(f) c), compared with 4c.
Result relative_coverage(const CoverageSetup& setup);

struct MarginSetup {
    CoverageSetup base;
    double gamma = 0.5;
    double radius = 1.0;           // |w| <= radius, g(x) = w x on scalar inputs
    std::size_t weight_grid = 401;
};

// Linear margin classifiers against the marginal Rademacher bound.
Result margin_rademacher_coverage(const MarginSetup& setup);

struct RegressionSetup {
    CoverageSetup base{ProcessSpec{ArdLinearSystem{{0.5, -0.3}, 0.5, 3.0}}, 2000, 50, 0.05, 1, 0};
    double clip_m = 3.0;
    double weight_box = 1.5;       // models w in [-weight_box, weight_box]^d
    std::size_t grid_per_dim = 31;
    std::size_t risk_draws = 200000;
};

// Clipped squared loss of linear models on an AR(d) system against the regression VC bound.
Result regression_coverage(const RegressionSetup& setup);

struct SymmetrizationSetup {
    CoverageSetup base{ProcessSpec{Ar1Threshold{0.8, 0.6, 0.0, 0.1}}, 200, 500, 0.05, 1, 0};
    double epsilon = 0.2;
};

Result symmetrization(const SymmetrizationSetup& setup);

struct ScenarioSetup {
    ScenarioProgramSpec program;
    ProcessSpec process{Ar1Threshold{0.8, 0.6, 0.0, 0.0}};
    double epsilon = 0.15;
    double delta = 0.1;
    CertificateMethod method = CertificateMethod::margin;
    std::size_t replications = 200;
    std::size_t marginal_draws = 10000;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
};

// PAC coverage of certificates: the frequency of violation_rate > epsilon must not
// exceed delta + 3 sqrt(delta (1 - delta) / R). Infeasible solves count as failures.
Result scenario_coverage(const ScenarioSetup& setup);

// min theta s.t. x - theta <= -gamma, theta in [lo, hi].
ScenarioProgramSpec one_dimensional_margin_program(double gamma, double lo, double hi);

void write_records_csv(const Result& result, std::ostream& out);

}  // namespace depbounds::experiments
