#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "depbounds/points.hpp"
#include "depbounds/rng.hpp"

namespace depbounds {

// X_{t+1} = a X_t + sigma e_t started from its stationary law;
// Y_t = sign(X_t - b*) flipped independently with probability flip_p.
struct Ar1Threshold {
    double a = 0.0;
    double sigma = 1.0;
    double b_star = 0.0;
    double flip_p = 0.0;
};

// y_t = <theta*, (y_{t-1}, ..., y_{t-d})> + sigma e_t. Emits z_t = (x_t, y_t) with
// x_t the lag vector, optionally rescaled onto the ball of radius clip_radius.
struct ArdLinearSystem {
    std::vector<double> coefficients;
    double sigma = 1.0;
    std::optional<double> clip_radius;
};

// Sign chain on {-1,+1}: keeps its state with probability rho, otherwise redraws
// uniformly. Y_t = X_t.
struct MarkovBinary {
    double rho = 0.0;
};

// I.i.d. inputs with threshold labels as in Ar1Threshold.
struct IidBaseline {
    enum class Distribution { normal, uniform };
    Distribution distribution = Distribution::normal;
    double p1 = 0.0;  // normal: mean, uniform: lower end
    double p2 = 1.0;  // normal: standard deviation, uniform: upper end
    double b_star = 0.0;
    double flip_p = 0.0;
};

using ProcessKind = std::variant<Ar1Threshold, ArdLinearSystem, MarkovBinary, IidBaseline>;

struct ProcessSpec {
    ProcessKind kind;

    // Throws ParameterError for invalid parameters (|a| >= 1, rho >= 1, unstable AR(d), ...).
    void validate() const;
    std::size_t input_dim() const;
    std::string id() const;
    bool stationary() const noexcept { return true; }
};

struct SequenceSample {
    Points x;
    std::vector<double> y;
    std::uint64_t seed = 0;
    std::string process_id;

    std::size_t size() const noexcept { return y.size(); }
};

// Closed-form stationary marginal law.
struct MarginalLaw {
    enum class Kind { gaussian, uniform_interval, uniform_signs, gaussian_state };
    Kind kind = Kind::gaussian;
    double mean = 0.0;
    double variance = 1.0;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t state_dim = 0;
    std::vector<double> covariance;  // gaussian_state: state_dim x state_dim, row-major

    // CDF of the scalar input law (gaussian, uniform_interval, uniform_signs).
    double cdf(double x) const;
};

SequenceSample simulate_sequence(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);
MarginalLaw stationary_params(const ProcessSpec& spec);
// m mutually independent draws from the stationary marginal of z = (x, y).
SequenceSample sample_marginal(const ProcessSpec& spec, std::size_t m, std::uint64_t seed);

// Seed of stream `role` in replication `replication` of an experiment.
std::uint64_t stream_seed(std::uint64_t experiment_seed, std::uint64_t replication, StreamRole role);

// Stationary covariance of the AR(d) state (y_t, ..., y_{t-d+1}).
std::vector<double> ar_state_covariance(const std::vector<double>& coefficients, double sigma);

// Risk of x -> sign(x - b) under the zero-one loss for threshold-labelled processes.
double threshold_risk(const ProcessSpec& spec, double threshold);

void write_sequence_csv(const SequenceSample& sample, std::ostream& out);

}  // namespace depbounds
