#include "depbounds/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "depbounds/error.hpp"
#include "depbounds/parallel.hpp"

namespace depbounds {

MonteCarloEstimate summarize(std::span<const double> draws, std::uint64_t seed) {
    require(!draws.empty(), "summarize: no draws");
    const double count = static_cast<double>(draws.size());
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / count;
    double ss = 0.0;
    for (double v : draws) ss += (v - mean) * (v - mean);
    const double se = draws.size() >= 2 ? std::sqrt(ss / (count - 1.0)) / std::sqrt(count) : 0.0;
    return {mean, se, draws.size(), seed};
}

double empirical_risk(const Model& model, const LossSpec& loss, const SequenceSample& sample) {
    require(sample.size() >= 1, "empirical_risk: empty sample");
    double total = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) total += model_loss(loss, model, sample.x[i], sample.y[i]);
    return total / static_cast<double>(sample.size());
}

MonteCarloEstimate risk_mc(const Model& model, const LossSpec& loss, const ProcessSpec& spec, std::size_t n,
                           std::size_t replications, std::uint64_t seed, std::size_t threads) {
    require(replications >= 2, "risk_mc: needs at least 2 replications");
    std::vector<double> risks(replications);
    parallel_for(replications, threads, [&](std::size_t r) {
        const SequenceSample path = simulate_sequence(spec, n, stream_seed(seed, r, StreamRole::path));
        risks[r] = empirical_risk(model, loss, path);
    });
    return summarize(risks, seed);
}

RademacherSupremum::RademacherSupremum(const FunctionClass& cls, const Points& points)
    : cls_(&cls), points_(&points), n_(points.size()) {
    require(n_ >= 1, "empirical Rademacher: needs at least one point");
    if (const auto* f = cls.as<FiniteFunctions>()) {
        require(points.dim() == 1, "finite classes are tabulated on scalar inputs");
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n_; ++i) idx.push_back(grid_index(*f, points[i][0]));
        for (const auto& fn : f->values) {
            std::vector<double> row;
            for (std::size_t g : idx) row.push_back(fn[g]);
            finite_values_.push_back(std::move(row));
        }
    } else if (cls.as<Threshold1d>()) {
        require(points.dim() == 1, "threshold1d acts on scalar inputs");
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return points[a][0] < points[b][0]; });
    } else if (const auto* lb = cls.as<LinearBall>()) {
        require(points.dim() == lb->dim, "linear ball: point dimension differs from the class dimension");
    } else if (const auto* kb = cls.as<KernelBall>()) {
        gram_.resize(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i; j < n_; ++j) gram_[i * n_ + j] = gram_[j * n_ + i] = kb->kernel(points[i], points[j]);
    } else {
        throw UnsupportedError("empirical Rademacher: no supremum routine for class kind '" + cls.kind_name() + "'");
    }
}

double RademacherSupremum::operator()(std::span<const int> signs) const {
    require(signs.size() == n_, "Rademacher: sign vector length differs from the number of points");
    const double nn = static_cast<double>(n_);
    if (!finite_values_.empty()) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& row : finite_values_) {
            double s = 0.0;
            for (std::size_t i = 0; i < n_; ++i) s += signs[i] * row[i];
            best = std::max(best, s);
        }
        return best / nn;
    }
    if (cls_->as<Threshold1d>()) {
        // Threshold below every point labels all +1; passing a group of tied points flips them.
        double s = 0.0;
        for (int v : signs) s += v;
        double best = s;
        std::size_t i = 0;
        const Points& pts = *points_;
        while (i < n_) {
            const double x = pts[order_[i]][0];
            while (i < n_ && pts[order_[i]][0] == x) s -= 2.0 * signs[order_[i++]];
            best = std::max(best, s);
        }
        return best / nn;
    }
    if (const auto* lb = cls_->as<LinearBall>()) {
        const std::size_t d = lb->dim;
        std::vector<double> acc(d + (lb->with_offset ? 1 : 0), 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto x = (*points_)[i];
            for (std::size_t j = 0; j < d; ++j) acc[j] += signs[i] * x[j];
            if (lb->with_offset) acc[d] += signs[i];
        }
        return lb->radius * norm2(acc) / nn;
    }
    const auto* kb = cls_->as<KernelBall>();
    double quad = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n_; ++j) row += gram_[i * n_ + j] * signs[j];
        quad += signs[i] * row;
    }
    return kb->radius * std::sqrt(std::max(0.0, quad)) / nn;
}

MonteCarloEstimate empirical_rademacher(const FunctionClass& cls, const Points& points, std::size_t sign_draws,
                                        std::uint64_t seed) {
    require(sign_draws >= 1, "empirical_rademacher: needs at least one sign draw");
    const RademacherSupremum sup(cls, points);
    CounterRng rng = CounterRng::stream(seed, 0, StreamRole::signs);
    std::vector<int> signs(points.size());
    std::vector<double> draws(sign_draws);
    for (std::size_t s = 0; s < sign_draws; ++s) {
        for (int& v : signs) v = (rng() >> 63) ? 1 : -1;
        draws[s] = sup(signs);
    }
    return summarize(draws, seed);
}

double exact_empirical_rademacher(const FunctionClass& cls, const Points& points) {
    const std::size_t n = points.size();
    require(n >= 1 && n <= 24, "exact_empirical_rademacher: needs 1 <= n <= 24");
    const RademacherSupremum sup(cls, points);
    std::vector<int> signs(n);
    double total = 0.0;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        for (std::size_t i = 0; i < n; ++i) signs[i] = (mask >> i & 1U) ? 1 : -1;
        total += sup(signs);
    }
    return total / static_cast<double>(count);
}

SupDeviation sup_deviation(const FunctionClass& cls, const LossSpec& loss, const SequenceSample& sample,
                           std::span<const double> risks) {
    const auto* f = cls.as<FiniteFunctions>();
    if (!f) throw UnsupportedError("sup_deviation with per-function risks needs a finite class");
    require(risks.size() == f->values.size(), "sup_deviation: one risk per function required");
    require(sample.size() >= 1 && sample.x.dim() == 1, "sup_deviation: needs a non-empty scalar sample");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < sample.size(); ++i) idx.push_back(grid_index(*f, sample.x[i][0]));
    SupDeviation best{-std::numeric_limits<double>::infinity(), 0, 0.0};
    for (std::size_t k = 0; k < f->values.size(); ++k) {
        double emp = 0.0;
        for (std::size_t i = 0; i < idx.size(); ++i) emp += eval_loss(loss, f->values[k][idx[i]], sample.y[i]);
        emp /= static_cast<double>(idx.size());
        if (risks[k] - emp > best.value) best = {risks[k] - emp, k, 0.0};
    }
    return best;
}

std::vector<ThresholdCell> threshold_cells(const SequenceSample& sample, const ThresholdRiskOracle& risk) {
    const std::size_t n = sample.size();
    require(n >= 1 && sample.x.dim() == 1, "threshold cells: needs a non-empty scalar sample");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sample.x[a][0] < sample.x[b][0]; });

    const double inf = std::numeric_limits<double>::infinity();
    auto cell = [&](double lo, double hi, double errors) {
        ThresholdCell c{lo, hi, errors / static_cast<double>(n), -inf, lo};
        std::vector<double> probes{lo, hi};
        if (std::isfinite(lo) && std::isfinite(hi)) probes.push_back(0.5 * (lo + hi));
        for (double b : probes) {
            const double r = risk(b);
            if (r > c.risk_sup) {
                c.risk_sup = r;
                c.argmax = b;
            }
        }
        return c;
    };

    double errors = 0.0;
    for (std::size_t i = 0; i < n; ++i) errors += sample.y[i] != 1.0 ? 1.0 : 0.0;
    std::vector<ThresholdCell> cells;
    double lo = -inf;
    std::size_t i = 0;
    while (i < n) {
        const double x = sample.x[order[i]][0];
        cells.push_back(cell(lo, x, errors));
        while (i < n && sample.x[order[i]][0] == x) {
            // This point is now labelled -1.
            const double y = sample.y[order[i++]];
            errors += (y != -1.0 ? 1.0 : 0.0) - (y != 1.0 ? 1.0 : 0.0);
        }
        lo = x;
    }
    cells.push_back(cell(lo, inf, errors));
    return cells;
}

SupDeviation sup_deviation(const FunctionClass& cls, const LossSpec& loss, const SequenceSample& sample,
                           const ThresholdRiskOracle& risk) {
    if (!cls.as<Threshold1d>()) throw UnsupportedError("sup_deviation with a threshold oracle needs threshold1d");
    if (loss.kind() != LossSpec::Kind::zero_one)
        throw IncompatibleError("threshold1d deviation enumeration is defined for the zero-one loss");
    SupDeviation best{-std::numeric_limits<double>::infinity(), 0, 0.0};
    for (const auto& c : threshold_cells(sample, risk))
        if (c.risk_sup - c.empirical_risk > best.value) best = {c.risk_sup - c.empirical_risk, 0, c.argmax};
    return best;
}

double sup_ghost_gap(const FunctionClass& cls, const SequenceSample& train, const SequenceSample& ghost) {
    require(train.size() >= 1 && ghost.size() >= 1, "sup_ghost_gap: empty sample");
    const double n_train = static_cast<double>(train.size());
    const double n_ghost = static_cast<double>(ghost.size());
    if (const auto* f = cls.as<FiniteFunctions>()) {
        const LossSpec zo = LossSpec::zero_one();
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& fn : f->values) {
            double gap = 0.0;
            for (std::size_t i = 0; i < ghost.size(); ++i)
                gap += eval_loss(zo, fn[grid_index(*f, ghost.x[i][0])], ghost.y[i]) / n_ghost;
            for (std::size_t i = 0; i < train.size(); ++i)
                gap -= eval_loss(zo, fn[grid_index(*f, train.x[i][0])], train.y[i]) / n_train;
            best = std::max(best, gap);
        }
        return best;
    }
    if (!cls.as<Threshold1d>()) throw UnsupportedError("sup_ghost_gap: class kind is not enumerable");
    // Merge both samples; weight +1/n' for ghost errors and -1/n for training errors.
    struct Item {
        double x;
        double y;
        double weight;
    };
    std::vector<Item> items;
    for (std::size_t i = 0; i < ghost.size(); ++i) items.push_back({ghost.x[i][0], ghost.y[i], 1.0 / n_ghost});
    for (std::size_t i = 0; i < train.size(); ++i) items.push_back({train.x[i][0], train.y[i], -1.0 / n_train});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.x < b.x; });
    double gap = 0.0;
    for (const auto& it : items) gap += it.y != 1.0 ? it.weight : 0.0;
    double best = gap;
    std::size_t i = 0;
    while (i < items.size()) {
        const double x = items[i].x;
        while (i < items.size() && items[i].x == x) {
            const auto& it = items[i++];
            gap += it.weight * ((it.y != -1.0 ? 1.0 : 0.0) - (it.y != 1.0 ? 1.0 : 0.0));
        }
        best = std::max(best, gap);
    }
    return best;
}

double violation_rate(std::span<const double> theta, const ScenarioProgramSpec& program, const Points& draws) {
    require(!draws.empty(), "violation_rate: no marginal draws");
    std::size_t violated = 0;
    for (std::size_t i = 0; i < draws.size(); ++i)
        if (program.constraint(draws[i], theta) > 0.0) ++violated;
    return static_cast<double>(violated) / static_cast<double>(draws.size());
}

std::vector<double> finite_class_risks(const FiniteFunctions& f, const LossSpec& loss, const ProcessSpec& spec) {
    if (!std::holds_alternative<MarkovBinary>(spec.kind))
        throw UnsupportedError("finite_class_risks: analytic risks are available for markov_binary inputs only");
    const std::size_t minus = grid_index(f, -1.0);
    const std::size_t plus = grid_index(f, 1.0);
    std::vector<double> risks;
    for (const auto& fn : f.values)
        risks.push_back(0.5 * (eval_loss(loss, fn[minus], -1.0) + eval_loss(loss, fn[plus], 1.0)));
    return risks;
}

SymmetrizationCheck verify_symmetrization(const FunctionClass& cls, const LossSpec& loss, const ProcessSpec& spec,
                                          std::size_t n, double epsilon, std::size_t replications,
                                          std::uint64_t seed, std::size_t threads) {
    if (loss.kind() != LossSpec::Kind::zero_one)
        throw IncompatibleError("verify_symmetrization: implemented for the zero-one loss");
    const double b = loss.range();
    if (static_cast<double>(n) * epsilon * epsilon < 2.0 * b * b)
        throw ParameterError("verify_symmetrization: requires n*epsilon^2 >= 2*B^2");
    require(replications >= 2, "verify_symmetrization: needs at least 2 replications");

    std::vector<double> finite_risks;
    if (const auto* f = cls.as<FiniteFunctions>()) finite_risks = finite_class_risks(*f, loss, spec);
    else if (!cls.as<Threshold1d>()) throw UnsupportedError("verify_symmetrization: class kind is not enumerable");

    std::vector<char> lhs(replications, 0);
    std::vector<char> rhs(replications, 0);
    parallel_for(replications, threads, [&](std::size_t r) {
        const SequenceSample path = simulate_sequence(spec, n, stream_seed(seed, r, StreamRole::path));
        const SequenceSample ghost = sample_marginal(spec, n, stream_seed(seed, r, StreamRole::ghost));
        const double deviation =
            finite_risks.empty()
                ? sup_deviation(cls, loss, path, [&](double t) { return threshold_risk(spec, t); }).value
                : sup_deviation(cls, loss, path, finite_risks).value;
        lhs[r] = deviation >= epsilon;
        rhs[r] = sup_ghost_gap(cls, path, ghost) >= epsilon / 2.0;
    });

    SymmetrizationCheck out;
    const double count = static_cast<double>(replications);
    out.replications = replications;
    out.lhs_freq = static_cast<double>(std::count(lhs.begin(), lhs.end(), 1)) / count;
    out.rhs_freq = static_cast<double>(std::count(rhs.begin(), rhs.end(), 1)) / count;
    const double var_l = out.lhs_freq * (1.0 - out.lhs_freq) / count;
    const double var_r = out.rhs_freq * (1.0 - out.rhs_freq) / count;
    out.combined_std_error = std::sqrt(var_l + 4.0 * var_r);
    out.holds = out.lhs_freq <= 2.0 * out.rhs_freq + 3.0 * out.combined_std_error;
    return out;
}

}  // namespace depbounds
