#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "depbounds/classes.hpp"
#include "depbounds/losses.hpp"
#include "depbounds/processes.hpp"
#include "depbounds/scenario.hpp"

namespace depbounds {

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
};

// Mean and standard error (sample sd / sqrt(count)) of a list of draws.
MonteCarloEstimate summarize(std::span<const double> draws, std::uint64_t seed);

double empirical_risk(const Model& model, const LossSpec& loss, const SequenceSample& sample);

// Average of empirical_risk over R independent fresh paths.
MonteCarloEstimate risk_mc(const Model& model, const LossSpec& loss, const ProcessSpec& spec, std::size_t n,
                           std::size_t replications, std::uint64_t seed, std::size_t threads = 1);

// sup_{f in F} (1/n) sum_i sigma_i f(t_i) for one sign vector.
class RademacherSupremum {
public:
    RademacherSupremum(const FunctionClass& cls, const Points& points);
    double operator()(std::span<const int> signs) const;
    std::size_t size() const noexcept { return n_; }

private:
    const FunctionClass* cls_;
    const Points* points_;
    std::size_t n_;
    std::vector<std::vector<double>> finite_values_;  // finite: values on the points
    std::vector<std::size_t> order_;                   // threshold1d: points sorted
    std::vector<double> gram_;                         // kernel_ball: Gram matrix
};

// Monte-Carlo estimate over `sign_draws` uniform sign vectors.
MonteCarloEstimate empirical_rademacher(const FunctionClass& cls, const Points& points, std::size_t sign_draws,
                                        std::uint64_t seed);

// Average over all 2^n sign vectors (n <= 24).
double exact_empirical_rademacher(const FunctionClass& cls, const Points& points);

struct SupDeviation {
    double value = 0.0;            // sup_f L(f) - L_hat(f)
    std::size_t function_index = 0;  // finite classes
    double threshold = 0.0;        // threshold1d: maximizer, or the open left end of its cell
};

// Finite class: risks[f] is the risk of function f.
SupDeviation sup_deviation(const FunctionClass& cls, const LossSpec& loss, const SequenceSample& sample,
                           std::span<const double> risks);

using ThresholdRiskOracle = std::function<double(double threshold)>;

// Threshold1d under the zero-one loss. The risk oracle is evaluated at both ends
// (and the midpoint) of every cell of thresholds sharing one dichotomy.
SupDeviation sup_deviation(const FunctionClass& cls, const LossSpec& loss, const SequenceSample& sample,
                           const ThresholdRiskOracle& risk);

// One cell of thresholds (lo, hi] that induce the same labels on the sample.
struct ThresholdCell {
    double lo = 0.0;
    double hi = 0.0;
    double empirical_risk = 0.0;
    double risk_sup = 0.0;
    double argmax = 0.0;
};

std::vector<ThresholdCell> threshold_cells(const SequenceSample& sample, const ThresholdRiskOracle& risk);

// sup_f L_hat_ghost(f) - L_hat(f) under the zero-one loss.
double sup_ghost_gap(const FunctionClass& cls, const SequenceSample& train, const SequenceSample& ghost);

// Fraction of draws with f(x, theta) > 0.
double violation_rate(std::span<const double> theta, const ScenarioProgramSpec& program, const Points& draws);

struct SymmetrizationCheck {
    double lhs_freq = 0.0;   // P{sup_f L(f) - L_hat(f) >= eps}
    double rhs_freq = 0.0;   // P{sup_f L_hat'(f) - L_hat(f) >= eps/2}
    double combined_std_error = 0.0;
    bool holds = false;      // lhs <= 2 rhs + 3 combined_std_error
    std::size_t replications = 0;
};

// Risk of each function of a finite class under the stationary law of `spec`
// (markov_binary only: inputs on the grid {-1, +1}).
std::vector<double> finite_class_risks(const FiniteFunctions& f, const LossSpec& loss, const ProcessSpec& spec);

SymmetrizationCheck verify_symmetrization(const FunctionClass& cls, const LossSpec& loss, const ProcessSpec& spec,
                                          std::size_t n, double epsilon, std::size_t replications,
                                          std::uint64_t seed, std::size_t threads = 1);

}  // namespace depbounds
