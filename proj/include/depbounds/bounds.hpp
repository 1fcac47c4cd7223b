#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "depbounds/classes.hpp"

namespace depbounds {

// Right-hand side of a uniform risk bound, split into its additive terms.
struct RiskBoundReport {
    double bound_value = 0.0;
    double empirical_risk_term = 0.0;
    double complexity_term = 0.0;
    double concentration_term = 0.0;
    double delta = 0.0;
    std::string theorem_tag;
    std::uint64_t n = 0;

    double slack() const noexcept { return bound_value - empirical_risk_term; }
};

enum class TailKind { hoeffding, bounded_difference };

// hoeffding: `values` are the ranges b_i - a_i of n independent variables and the
// result bounds P{mean - E mean > epsilon}. bounded_difference: `values` are the
// bounded-difference constants c_i and the result bounds P{g - E g >= epsilon}.
double concentration_tail(TailKind kind, std::span<const double> values, double epsilon, std::uint64_t n);

// P(X >= k) for X ~ Binomial(m, p), by direct summation.
double binomial_upper_tail(std::uint64_t m, double p, std::uint64_t k);

// Whether P(X >= E X) > 1/4 for X ~ Binomial(m, p); requires p > 1/m.
bool binomial_quarter_lemma_holds(std::uint64_t m, double p);

// Capacity of a binary class: its VC dimension (Sauer form) or the value of its
// growth function at 2n.
class Capacity {
public:
    static Capacity vc(int d_vc);
    static Capacity growth_at_2n(double value);
    static Capacity log_growth_at_2n(double log_value);

    // log of the growth function at 2n, or its Sauer upper bound d log(2en/d).
    double log_growth(std::uint64_t n) const;
    std::optional<int> d_vc() const noexcept { return d_vc_; }

private:
    std::optional<int> d_vc_;
    double log_growth_ = 0.0;
};

RiskBoundReport vc_bound(double emp_risk, std::uint64_t n, const Capacity& capacity, double delta);

// Requires a stationary data sequence; `stationary = false` is refused.
RiskBoundReport vc_relative_bound(double emp_risk, std::uint64_t n, const Capacity& capacity, double delta,
                                  bool stationary = true);

// VC dimension of the level sets induced by linear models on R^d under squared loss.
int induced_regression_vc_dim(int input_dim);

RiskBoundReport regression_vc_bound(double emp_risk, std::uint64_t n, int d_vc_induced, double delta, double range_b);

enum class RademacherVariant { two_sided, worst_case, marginal };

// two_sided: rad_terms = {R_train, R_ghost}; worst_case: {sup empirical R}; marginal: {R_bar}.
RiskBoundReport rademacher_risk_bound(RademacherVariant variant, double emp_risk, std::span<const double> rad_terms,
                                      double range_b, std::uint64_t n, double delta);

enum class RadFamily { linear, kernel_gaussian, margin_linear, vq };

struct RadFamilyParams {
    std::optional<double> clip_m;    // M (linear, kernel_gaussian)
    std::optional<double> radius;    // Lambda
    std::optional<double> gamma;     // margin_linear
    std::optional<std::size_t> codepoints;  // C (vq)
};

struct MomentInput {
    enum class Kind { sum_sq_norm, sup_norm, sum_kernel_diag };
    Kind kind = Kind::sum_sq_norm;
    double value = 0.0;  // sum_i E|X_i|^2, sup_x |x|, or sum_i E K(X_i, X_i)
};

// Closed-form upper bounds on the Rademacher complexity of the induced loss class.
double class_rad_upper(RadFamily family, const RadFamilyParams& params, const MomentInput& moment, std::uint64_t n);

using LogCovering = std::function<double(double epsilon)>;

double chaining_rad_upper(double diameter, int depth, const LogCovering& log_covering, std::uint64_t n,
                          double lipschitz = 1.0);

struct ChainingResult {
    double value = 0.0;
    int depth = 1;
};

// Minimum over depth N in [1, max_depth].
ChainingResult chaining_rad_upper_best(double diameter, const LogCovering& log_covering, std::uint64_t n,
                                       double lipschitz = 1.0, int max_depth = 40);

// log N(eps) <= A * sum_i |x_i|^2 / eps^2
LogCovering spectral_log_covering(double a_constant, double sum_sq_norms);

// log of the greedy proper-net size of an evaluated function set.
LogCovering greedy_log_covering(const PseudoMetricSample& sample);

// Rademacher/beta-mixing reference bound on mu blocks; nullopt when
// delta <= 4 (mu - 1) beta(a) makes it inapplicable.
std::optional<RiskBoundReport> mixing_reference_bound(double emp_risk, double rad_mu, double range_b,
                                                      std::uint64_t mu, std::uint64_t a, double beta_a, double delta);

}  // namespace depbounds
