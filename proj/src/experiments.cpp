#include "depbounds/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "depbounds/bounds.hpp"
#include "depbounds/error.hpp"
#include "depbounds/estimators.hpp"
#include "depbounds/losses.hpp"
#include "depbounds/parallel.hpp"

namespace depbounds::experiments {
namespace {

void check(const CoverageSetup& s) {
    s.process.validate();
    require(s.n >= 1, "experiment: n must be >= 1");
    require(s.replications >= 1, "experiment: replications must be >= 1");
    require(s.delta > 0.0 && s.delta < 1.0, "experiment: delta must lie in (0, 1)");
}

void finish(Result& r, double required) {
    const auto held = std::count_if(r.records.begin(), r.records.end(), [](const Record& x) { return x.holds; });
    r.holds_fraction = r.records.empty() ? 0.0 : static_cast<double>(held) / static_cast<double>(r.records.size());
    r.required_fraction = required;
    r.passed = !r.records.empty() && r.holds_fraction >= required;
}

bool threshold_labelled(const ProcessSpec& p) {
    return std::holds_alternative<Ar1Threshold>(p.kind) || std::holds_alternative<IidBaseline>(p.kind);
}

// E h(X) for X ~ N(mean, var) by composite Simpson on mean +- 12 sd.
template <class F>
double gaussian_expectation(F&& h, double mean, double var, std::size_t intervals = 40000) {
    const double sd = std::sqrt(var);
    const double lo = mean - 12.0 * sd;
    const double step = 24.0 * sd / static_cast<double>(intervals);
    double total = 0.0;
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double x = lo + step * static_cast<double>(i);
        const double z = (x - mean) / sd;
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        total += w * h(x) * std::exp(-0.5 * z * z);
    }
    return total * step / 3.0 / (sd * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

Result vc_coverage(const CoverageSetup& s) {
    check(s);
    if (!threshold_labelled(s.process)) throw IncompatibleError("vc coverage needs threshold-labelled inputs");
    const auto cls = FunctionClass::threshold1d();
    const auto zo = LossSpec::zero_one();
    const double slack = vc_bound(0.0, s.n, Capacity::growth_at_2n(2.0 * static_cast<double>(s.n) + 1.0), s.delta).slack();
    Result r{"vc_coverage", std::vector<Record>(s.replications), 0, 0, false, {}};
    parallel_for(s.replications, s.threads, [&](std::size_t k) {
        const auto seed = stream_seed(s.seed, k, StreamRole::path);
        const auto path = simulate_sequence(s.process, s.n, seed);
        const double dev = sup_deviation(cls, zo, path, [&](double b) { return threshold_risk(s.process, b); }).value;
        r.records[k] = {k, seed, dev, slack, dev <= slack};
    });
    finish(r, 1.0 - s.delta);
    r.summary = {{"n", static_cast<double>(s.n)}, {"delta", s.delta}, {"slack", slack}};
    return r;
}

Result relative_coverage(const CoverageSetup& s) {
    check(s);
    if (!threshold_labelled(s.process)) throw IncompatibleError("relative coverage needs threshold-labelled inputs");
    const double log_growth = std::log(2.0 * static_cast<double>(s.n) + 1.0);
    const double c = (log_growth + std::log(4.0 / s.delta)) / static_cast<double>(s.n);
    Result r{"relative_coverage", std::vector<Record>(s.replications), 0, 0, false, {}};
    parallel_for(s.replications, s.threads, [&](std::size_t k) {
        const auto seed = stream_seed(s.seed, k, StreamRole::path);
        const auto path = simulate_sequence(s.process, s.n, seed);
        double stat = -1.0;
        for (const auto& cell : threshold_cells(path, [&](double b) { return threshold_risk(s.process, b); }))
            stat = std::max(stat, cell.risk_sup - cell.empirical_risk - 2.0 * std::sqrt(cell.empirical_risk * c));
        r.records[k] = {k, seed, stat, 4.0 * c, stat <= 4.0 * c};
    });
    finish(r, 1.0 - s.delta);
    r.summary = {{"n", static_cast<double>(s.n)}, {"delta", s.delta}, {"four_c", 4.0 * c}};
    return r;
}

Result margin_rademacher_coverage(const MarginSetup& m) {
    const auto& s = m.base;
    check(s);
    const auto* ar = std::get_if<Ar1Threshold>(&s.process.kind);
    if (!ar) throw IncompatibleError("margin coverage is set up for ar1 inputs");
    require(m.gamma > 0.0 && m.radius > 0.0, "margin coverage: gamma and radius must be > 0");
    require(m.weight_grid >= 2, "margin coverage: weight grid needs >= 2 points");

    const auto law = stationary_params(s.process);
    const double n = static_cast<double>(s.n);
    const auto loss = LossSpec::margin(m.gamma);
    const double rad = class_rad_upper(RadFamily::margin_linear, {std::nullopt, m.radius, m.gamma, std::nullopt},
                                       {MomentInput::Kind::sum_sq_norm, n * (law.variance + law.mean * law.mean)}, s.n);
    const std::vector<double> rad_terms{rad};
    const double slack =
        rademacher_risk_bound(RademacherVariant::marginal, 0.0, rad_terms, loss.range(), s.n, s.delta).slack();

    std::vector<double> weights(m.weight_grid);
    for (std::size_t j = 0; j < m.weight_grid; ++j)
        weights[j] = -m.radius + 2.0 * m.radius * static_cast<double>(j) / static_cast<double>(m.weight_grid - 1);
    const double h = weights[1] - weights[0];

    // Exact risk of each grid weight; labels are sign(x - b*) flipped w.p. flip_p.
    std::vector<double> risk(m.weight_grid);
    parallel_for(m.weight_grid, s.threads, [&](std::size_t j) {
        risk[j] = gaussian_expectation(
            [&](double x) {
                const double label = x - ar->b_star >= 0.0 ? 1.0 : -1.0;
                const double g = weights[j] * x;
                return (1.0 - ar->flip_p) * eval_loss(loss, g, label) + ar->flip_p * eval_loss(loss, g, -label);
            },
            law.mean, law.variance);
    });
    const double abs_mean = gaussian_expectation([](double x) { return std::abs(x); }, law.mean, law.variance);

    Result r{"margin_rademacher_coverage", std::vector<Record>(s.replications), 0, 0, false, {}};
    parallel_for(s.replications, s.threads, [&](std::size_t k) {
        const auto seed = stream_seed(s.seed, k, StreamRole::path);
        const auto path = simulate_sequence(s.process, s.n, seed);
        double sample_abs = 0.0;
        for (std::size_t i = 0; i < path.size(); ++i) sample_abs += std::abs(path.x[i][0]);
        sample_abs /= n;
        double best = -1.0;
        for (std::size_t j = 0; j < m.weight_grid; ++j) {
            double emp = 0.0;
            for (std::size_t i = 0; i < path.size(); ++i) emp += eval_loss(loss, weights[j] * path.x[i][0], path.y[i]);
            best = std::max(best, risk[j] - emp / n);
        }
        // Both risks are (E|X| / gamma)-Lipschitz in w; cover the gaps between grid points.
        const double stat = best + (abs_mean + sample_abs) / m.gamma * h / 2.0;
        r.records[k] = {k, seed, stat, slack, stat <= slack};
    });
    finish(r, 1.0 - s.delta);
    r.summary = {{"n", n}, {"delta", s.delta}, {"gamma", m.gamma}, {"rad_bar", rad}, {"slack", slack}};
    return r;
}

Result regression_coverage(const RegressionSetup& g) {
    const auto& s = g.base;
    check(s);
    const auto* sys = std::get_if<ArdLinearSystem>(&s.process.kind);
    if (!sys) throw IncompatibleError("regression coverage needs an ar_d system");
    require(g.grid_per_dim >= 2 && g.risk_draws >= 1, "regression coverage: bad grid or draw count");
    const std::size_t d = sys->coefficients.size();
    const auto loss = LossSpec::clipped_squared(g.clip_m);
    const double slack = regression_vc_bound(0.0, s.n, induced_regression_vc_dim(static_cast<int>(d)), s.delta,
                                             loss.range()).slack();

    std::vector<LinearModel> models;
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= g.grid_per_dim;
    for (std::size_t id = 0; id < total; ++id) {
        LinearModel lm{std::vector<double>(d), 0.0};
        std::size_t rest = id;
        for (std::size_t i = 0; i < d; ++i) {
            const auto step = rest % g.grid_per_dim;
            rest /= g.grid_per_dim;
            lm.weights[i] = -g.weight_box + 2.0 * g.weight_box * static_cast<double>(step) /
                                                static_cast<double>(g.grid_per_dim - 1);
        }
        models.push_back(std::move(lm));
    }
    // Labels are clipped to [-M, M] so that the loss stays in [0, 4 M^2].
    auto clip_labels = [&](SequenceSample z) {
        for (auto& y : z.y) y = std::clamp(y, -g.clip_m, g.clip_m);
        return z;
    };
    auto mean_loss = [&](const LinearModel& lm, const SequenceSample& z) {
        double t = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) t += eval_loss(loss, lm.score(z.x[i]), z.y[i]);
        return t / static_cast<double>(z.size());
    };
    const auto reference = clip_labels(sample_marginal(s.process, g.risk_draws, stream_seed(s.seed, 0, StreamRole::auxiliary)));
    std::vector<double> risk(models.size());
    parallel_for(models.size(), s.threads, [&](std::size_t j) { risk[j] = mean_loss(models[j], reference); });

    Result r{"regression_coverage", std::vector<Record>(s.replications), 0, 0, false, {}};
    parallel_for(s.replications, s.threads, [&](std::size_t k) {
        const auto seed = stream_seed(s.seed, k, StreamRole::path);
        const auto path = clip_labels(simulate_sequence(s.process, s.n, seed));
        double best = -loss.range();
        for (std::size_t j = 0; j < models.size(); ++j) best = std::max(best, risk[j] - mean_loss(models[j], path));
        r.records[k] = {k, seed, best, slack, best <= slack};
    });
    finish(r, 1.0 - s.delta);
    r.summary = {{"n", static_cast<double>(s.n)}, {"delta", s.delta}, {"slack", slack},
                 {"models", static_cast<double>(models.size())}};
    return r;
}

Result symmetrization(const SymmetrizationSetup& y) {
    const auto& s = y.base;
    check(s);
    const auto check_result = verify_symmetrization(FunctionClass::threshold1d(), LossSpec::zero_one(), s.process, s.n,
                                                    y.epsilon, s.replications, s.seed, s.threads);
    Result r{"symmetrization", {}, check_result.holds ? 1.0 : 0.0, 1.0, check_result.holds, {}};
    r.summary = {{"n", static_cast<double>(s.n)},
                 {"epsilon", y.epsilon},
                 {"lhs_freq", check_result.lhs_freq},
                 {"rhs_freq", check_result.rhs_freq},
                 {"combined_std_error", check_result.combined_std_error}};
    return r;
}

Result scenario_coverage(const ScenarioSetup& s) {
    s.program.validate();
    s.process.validate();
    require(s.replications >= 1 && s.marginal_draws >= 1, "scenario coverage: replications and draws must be >= 1");
    Result r{"scenario_coverage", std::vector<Record>(s.replications), 0, 0, false, {}};
    std::vector<double> planned(s.replications, 0.0);
    parallel_for(s.replications, s.threads, [&](std::size_t k) {
        const auto seed = stream_seed(s.seed, k, StreamRole::path);
        const auto cert = certify(s.program, s.process, s.epsilon, s.delta, s.method, seed);
        planned[k] = static_cast<double>(cert.n_planned);
        double rate = 1.0;
        if (cert.feasible) {
            const auto draws = sample_marginal(s.process, s.marginal_draws, stream_seed(s.seed, k, StreamRole::ghost));
            rate = violation_rate(cert.theta_hat, s.program, draws.x);
        }
        r.records[k] = {k, seed, rate, s.epsilon, cert.feasible && rate <= s.epsilon};
    });
    const double count = static_cast<double>(s.replications);
    const double allowed = s.delta + 3.0 * std::sqrt(s.delta * (1.0 - s.delta) / count);
    finish(r, 1.0 - allowed);
    const double mean_rate = [&] {
        double t = 0.0;
        for (const auto& x : r.records) t += x.statistic;
        return t / count;
    }();
    r.summary = {{"epsilon", s.epsilon},
                 {"delta", s.delta},
                 {"n_planned", planned.empty() ? 0.0 : planned.front()},
                 {"failure_freq", 1.0 - r.holds_fraction},
                 {"allowed_failure_freq", allowed},
                 {"mean_violation_rate", mean_rate}};
    return r;
}

ScenarioProgramSpec one_dimensional_margin_program(double gamma, double lo, double hi) {
    ScenarioProgramSpec p;
    p.cost = {1.0};
    p.pieces = {ConstraintPiece{AffineMap{1, 1, {0.0}, {-1.0}}, AffineScalar{{1.0}, 0.0}}};
    p.theta_set = BoxSet{{lo}, {hi}};
    p.margin = gamma;
    p.input_dim = 1;
    p.vc_dim = 1;
    p.validate();
    return p;
}

void write_records_csv(const Result& result, std::ostream& out) {
    out << "replication,seed,statistic,bound,holds\n";
    out.precision(17);
    for (const auto& r : result.records)
        out << r.replication << ',' << r.seed << ',' << r.statistic << ',' << r.bound << ',' << (r.holds ? 1 : 0) << '\n';
}

}  // namespace depbounds::experiments
