#include "depbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "depbounds/error.hpp"

namespace depbounds {

namespace {

void check_delta(double delta) { require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)"); }

void check_emp(double emp) { require(emp >= 0.0 && std::isfinite(emp), "empirical risk must be finite and >= 0"); }

RiskBoundReport make_report(double emp, double complexity, double concentration, double delta, std::string tag,
                            std::uint64_t n) {
    RiskBoundReport r;
    r.empirical_risk_term = emp;
    r.complexity_term = std::max(0.0, complexity);
    r.concentration_term = std::max(0.0, concentration);
    r.bound_value = r.empirical_risk_term + r.complexity_term + r.concentration_term;
    r.delta = delta;
    r.theorem_tag = std::move(tag);
    r.n = n;
    return r;
}

}  // namespace

double concentration_tail(TailKind kind, std::span<const double> values, double epsilon, std::uint64_t n) {
    require(epsilon >= 0.0, "concentration_tail: epsilon must be >= 0");
    require(!values.empty(), "concentration_tail: needs at least one constant");
    double sum_sq = 0.0;
    for (double v : values) {
        require(v > 0.0, "concentration_tail: constants must be > 0");
        sum_sq += v * v;
    }
    if (kind == TailKind::bounded_difference) return std::exp(-2.0 * epsilon * epsilon / sum_sq);
    require(values.size() == n, "concentration_tail: hoeffding needs one range per variable");
    const double nn = static_cast<double>(n);
    return std::exp(-2.0 * nn * nn * epsilon * epsilon / sum_sq);
}

double binomial_upper_tail(std::uint64_t m, double p, std::uint64_t k) {
    require(p >= 0.0 && p <= 1.0, "binomial: p must lie in [0,1]");
    if (k == 0) return 1.0;
    if (k > m) return 0.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    // pmf via log-gamma, summed in long double.
    long double total = 0.0L;
    const long double lp = std::log(static_cast<long double>(p));
    const long double lq = std::log1p(-static_cast<long double>(p));
    for (std::uint64_t j = k; j <= m; ++j) {
        const long double lc = std::lgamma(static_cast<long double>(m) + 1) - std::lgamma(static_cast<long double>(j) + 1) -
                               std::lgamma(static_cast<long double>(m - j) + 1);
        total += std::exp(lc + j * lp + (m - j) * lq);
    }
    return static_cast<double>(std::min(total, 1.0L));
}

bool binomial_quarter_lemma_holds(std::uint64_t m, double p) {
    require(m >= 1, "binomial lemma: m must be >= 1");
    require(p <= 1.0, "binomial lemma: p must be <= 1");
    if (!(p > 1.0 / static_cast<double>(m)))
        throw ParameterError("binomial lemma hypothesis violated: requires p > 1/m");
    // Smallest integer k >= m p, with a relative tolerance for products such as 100 * 0.07.
    const double mean = static_cast<double>(m) * p;
    auto k = static_cast<std::uint64_t>(std::ceil(mean - 1e-9 * std::max(1.0, mean)));
    return binomial_upper_tail(m, p, k) > 0.25;
}

Capacity Capacity::vc(int d_vc) {
    require(d_vc >= 1, "capacity: d_vc must be >= 1");
    Capacity c;
    c.d_vc_ = d_vc;
    return c;
}

Capacity Capacity::growth_at_2n(double value) {
    require(value >= 1.0 && std::isfinite(value), "capacity: growth value must be finite and >= 1");
    return log_growth_at_2n(std::log(value));
}

Capacity Capacity::log_growth_at_2n(double log_value) {
    require(log_value >= 0.0 && std::isfinite(log_value), "capacity: log growth must be finite and >= 0");
    Capacity c;
    c.log_growth_ = log_value;
    return c;
}

double Capacity::log_growth(std::uint64_t n) const {
    if (!d_vc_) return log_growth_;
    require(n >= static_cast<std::uint64_t>(*d_vc_), "VC bound in Sauer form requires n >= d_vc");
    const double d = *d_vc_;
    return d * std::log(2.0 * std::numbers::e * static_cast<double>(n) / d);
}

RiskBoundReport vc_bound(double emp_risk, std::uint64_t n, const Capacity& capacity, double delta) {
    check_delta(delta);
    check_emp(emp_risk);
    require(n >= 1, "vc_bound: n must be >= 1");
    const double nn = static_cast<double>(n);
    const double conf = std::log(2.0 / delta);
    const double slack = 2.0 * std::sqrt(2.0 * (capacity.log_growth(n) + conf) / nn);
    const double concentration = 2.0 * std::sqrt(2.0 * conf / nn);
    return make_report(emp_risk, slack - concentration, concentration, delta, "vc_basic_dependent", n);
}

RiskBoundReport vc_relative_bound(double emp_risk, std::uint64_t n, const Capacity& capacity, double delta,
                                  bool stationary) {
    if (!stationary)
        throw ParameterError("vc_relative_bound: the relative-deviation bound holds for stationary sequences only; "
                             "declare the process stationary or use vc_bound");
    check_delta(delta);
    check_emp(emp_risk);
    require(n >= 1, "vc_relative_bound: n must be >= 1");
    const double nn = static_cast<double>(n);
    const double conf = std::log(4.0 / delta) / nn;
    const double c = capacity.log_growth(n) / nn + conf;
    const double slack = 2.0 * std::sqrt(emp_risk * c) + 4.0 * c;
    const double concentration = 2.0 * std::sqrt(emp_risk * conf) + 4.0 * conf;
    return make_report(emp_risk, slack - concentration, concentration, delta, "vc_relative_dependent", n);
}

int induced_regression_vc_dim(int input_dim) {
    require(input_dim >= 1, "induced_regression_vc_dim: d must be >= 1");
    return input_dim * input_dim + input_dim + 2;
}

RiskBoundReport regression_vc_bound(double emp_risk, std::uint64_t n, int d_vc_induced, double delta, double range_b) {
    require(range_b > 0.0, "regression_vc_bound: B must be > 0");
    const RiskBoundReport base = vc_bound(0.0, n, Capacity::vc(d_vc_induced), delta);
    check_emp(emp_risk);
    return make_report(emp_risk, range_b * base.complexity_term, range_b * base.concentration_term, delta,
                       "vc_regression_reduction", n);
}

RiskBoundReport rademacher_risk_bound(RademacherVariant variant, double emp_risk, std::span<const double> rad_terms,
                                      double range_b, std::uint64_t n, double delta) {
    require(delta > 0.0 && delta <= 1.0, "delta must lie in (0,1]");
    check_emp(emp_risk);
    require(range_b > 0.0, "rademacher_risk_bound: B must be > 0");
    require(n >= 1, "rademacher_risk_bound: n must be >= 1");
    for (double r : rad_terms) {
        if (!(r >= 0.0)) throw ParameterError("rademacher_risk_bound: Rademacher terms must be >= 0");
    }
    const double concentration = range_b * std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
    switch (variant) {
        case RademacherVariant::two_sided:
            require(rad_terms.size() == 2, "two_sided variant needs two Rademacher terms (training, ghost)");
            return make_report(emp_risk, rad_terms[0] + rad_terms[1], concentration, delta, "rademacher_two_sided", n);
        case RademacherVariant::worst_case:
            require(rad_terms.size() == 1, "worst_case variant needs one term (supremum of empirical complexity)");
            return make_report(emp_risk, 2.0 * rad_terms[0], concentration, delta, "rademacher_worst_case", n);
        case RademacherVariant::marginal:
            require(rad_terms.size() == 1, "marginal variant needs one term (marginal upper bound)");
            return make_report(emp_risk, 2.0 * rad_terms[0], concentration, delta, "rademacher_marginal", n);
    }
    throw UnsupportedError("unknown Rademacher variant");
}

double class_rad_upper(RadFamily family, const RadFamilyParams& params, const MomentInput& moment, std::uint64_t n) {
    require(n >= 1, "class_rad_upper: n must be >= 1");
    require(moment.value >= 0.0, "class_rad_upper: moment input must be >= 0");
    auto need = [](const auto& opt, const char* name) {
        if (!opt) throw ParameterError(std::string("class_rad_upper: missing family parameter ") + name);
        require(*opt > 0, std::string("class_rad_upper: parameter ") + name + " must be > 0");
        return *opt;
    };
    const double nn = static_cast<double>(n);
    const double sqrt_n = std::sqrt(nn);
    // sqrt(sum_i E|X_i|^2)/n, or sup|x|/sqrt(n) in the worst case.
    const double spread = moment.kind == MomentInput::Kind::sup_norm ? moment.value / sqrt_n
                                                                      : std::sqrt(moment.value) / nn;
    switch (family) {
        case RadFamily::linear:
            return 4.0 * need(params.clip_m, "M") * need(params.radius, "Lambda") * spread;
        case RadFamily::kernel_gaussian: {
            const double m = need(params.clip_m, "M");
            const double lambda = need(params.radius, "Lambda");
            // K(x,x) = 1 for the Gaussian kernel.
            if (moment.kind == MomentInput::Kind::sum_kernel_diag) return 4.0 * m * lambda * std::sqrt(moment.value) / nn;
            return 4.0 * m * lambda / sqrt_n;
        }
        case RadFamily::margin_linear:
            return need(params.radius, "Lambda") * spread / need(params.gamma, "gamma");
        case RadFamily::vq: {
            const double c = static_cast<double>(need(params.codepoints, "C"));
            const double lambda = need(params.radius, "Lambda");
            return 2.0 * c * lambda * spread + c * lambda * lambda / sqrt_n;
        }
    }
    throw UnsupportedError("unknown Rademacher family");
}

double chaining_rad_upper(double diameter, int depth, const LogCovering& log_covering, std::uint64_t n,
                          double lipschitz) {
    require(diameter >= 0.0 && std::isfinite(diameter), "chaining: diameter must be finite and >= 0");
    require(depth >= 1, "chaining: depth N must be >= 1");
    require(n >= 1, "chaining: n must be >= 1");
    require(lipschitz > 0.0, "chaining: Lipschitz constant must be > 0");
    if (diameter == 0.0) return 0.0;
    const double nn = static_cast<double>(n);
    double sum = 0.0;
    double previous = 0.0;
    for (int j = 1; j <= depth; ++j) {
        const double scale = std::ldexp(1.0, -j);
        const double logn = log_covering(diameter * scale);
        if (!(logn >= 0.0)) throw ParameterError("chaining: log covering number must be >= 0");
        require(logn >= previous - 1e-12, "chaining: log covering numbers must not increase with the scale");
        previous = logn;
        sum += scale * std::sqrt(logn / nn);
    }
    return lipschitz * (diameter * std::ldexp(1.0, -depth) + 6.0 * diameter * sum);
}

ChainingResult chaining_rad_upper_best(double diameter, const LogCovering& log_covering, std::uint64_t n,
                                       double lipschitz, int max_depth) {
    require(max_depth >= 1, "chaining: max_depth must be >= 1");
    ChainingResult best{std::numeric_limits<double>::infinity(), 1};
    for (int depth = 1; depth <= max_depth; ++depth) {
        const double v = chaining_rad_upper(diameter, depth, log_covering, n, lipschitz);
        if (v < best.value) best = {v, depth};
    }
    return best;
}

LogCovering spectral_log_covering(double a_constant, double sum_sq_norms) {
    require(a_constant > 0.0 && sum_sq_norms >= 0.0, "spectral covering: needs A > 0 and sum >= 0");
    return [a_constant, sum_sq_norms](double eps) { return a_constant * sum_sq_norms / (eps * eps); };
}

LogCovering greedy_log_covering(const PseudoMetricSample& sample) {
    return [sample](double eps) { return std::log(static_cast<double>(covering_number_greedy(sample, eps))); };
}

std::optional<RiskBoundReport> mixing_reference_bound(double emp_risk, double rad_mu, double range_b,
                                                      std::uint64_t mu, std::uint64_t a, double beta_a, double delta) {
    check_delta(delta);
    check_emp(emp_risk);
    require(rad_mu >= 0.0, "mixing bound: Rademacher term must be >= 0");
    require(range_b > 0.0, "mixing bound: B must be > 0");
    require(mu >= 1 && a >= 1, "mixing bound: mu and a must be positive integers");
    require(beta_a >= 0.0, "mixing bound: beta(a) must be >= 0");
    const double effective_delta = delta - 4.0 * static_cast<double>(mu - 1) * beta_a;
    if (effective_delta <= 0.0) return std::nullopt;
    const double concentration =
        range_b * std::sqrt(std::log(1.0 / effective_delta) / (2.0 * static_cast<double>(mu)));
    return make_report(emp_risk, 2.0 * rad_mu, concentration, delta, "mixing_reference_beta", 2 * a * mu);
}

}  // namespace depbounds
