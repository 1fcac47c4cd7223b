#include "depbounds/classes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "depbounds/error.hpp"

namespace depbounds {

double KernelSpec::operator()(std::span<const double> a, std::span<const double> b) const {
    require(a.size() == b.size(), "kernel arguments differ in dimension");
    if (kind == Kind::linear) return dot(a, b);
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
    return std::exp(-sq / (2.0 * bandwidth * bandwidth));
}

FunctionClass FunctionClass::finite(std::vector<double> grid, std::vector<std::vector<double>> values) {
    require(!values.empty(), "finite class needs at least one function");
    require(!grid.empty(), "finite class needs a non-empty evaluation grid");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& f : values) {
        require(f.size() == grid.size(), "finite class function not tabulated on the whole grid");
        for (double v : f) {
            require(std::isfinite(v), "finite class values must be finite");
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    FiniteFunctions table{std::move(grid), std::move(values)};
    std::optional<int> vc;
    std::set<double> distinct;
    for (const auto& f : table.values) distinct.insert(f.begin(), f.end());
    if (distinct.size() <= 2 && table.grid.size() <= 16) vc = finite_vc_dimension(table);
    return FunctionClass(std::move(table), vc, {lo, hi});
}

FunctionClass FunctionClass::threshold1d() { return FunctionClass(Threshold1d{}, 1, {-1.0, 1.0}); }

FunctionClass FunctionClass::linear_ball(std::size_t dim, double radius, bool with_offset) {
    require(dim >= 1, "linear ball dimension must be >= 1");
    require(radius > 0.0, "linear ball radius must be > 0");
    const double inf = std::numeric_limits<double>::infinity();
    return FunctionClass(LinearBall{dim, radius, with_offset},
                         static_cast<int>(with_offset ? dim + 1 : dim), {-inf, inf});
}

FunctionClass FunctionClass::kernel_ball(KernelSpec kernel, double radius) {
    require(radius > 0.0, "kernel ball radius must be > 0");
    if (kernel.kind == KernelSpec::Kind::gaussian) {
        require(kernel.bandwidth > 0.0, "gaussian kernel bandwidth must be > 0");
        return FunctionClass(KernelBall{kernel, radius}, std::nullopt, {-radius, radius});
    }
    const double inf = std::numeric_limits<double>::infinity();
    return FunctionClass(KernelBall{kernel, radius}, std::nullopt, {-inf, inf});
}

FunctionClass FunctionClass::codebook(std::size_t codepoints, std::size_t dim, double radius) {
    require(codepoints >= 1, "codebook needs C >= 1");
    require(dim >= 1, "codebook dimension must be >= 1");
    require(radius > 0.0, "codebook radius must be > 0");
    return FunctionClass(Codebook{codepoints, dim, radius}, std::nullopt, {0.0, 4.0 * radius * radius});
}

std::string FunctionClass::kind_name() const {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FiniteFunctions>) return "finite";
            else if constexpr (std::is_same_v<T, Threshold1d>) return "threshold1d";
            else if constexpr (std::is_same_v<T, LinearBall>) return "linear_ball";
            else if constexpr (std::is_same_v<T, KernelBall>) return "kernel_ball";
            else return "codebook";
        },
        shape_);
}

std::size_t grid_index(const FiniteFunctions& f, double x) {
    auto it = std::find(f.grid.begin(), f.grid.end(), x);
    require(it != f.grid.end(), "point is not on the evaluation grid of the finite class");
    return static_cast<std::size_t>(it - f.grid.begin());
}

namespace {

std::uint64_t count_finite_patterns(const FiniteFunctions& f, std::span<const std::size_t> idx) {
    std::set<std::vector<double>> patterns;
    for (const auto& fn : f.values) {
        std::vector<double> pattern;
        pattern.reserve(idx.size());
        for (std::size_t g : idx) pattern.push_back(fn[g]);
        patterns.insert(std::move(pattern));
    }
    return patterns.size();
}

}  // namespace

std::uint64_t growth_function_exact(const FunctionClass& cls, std::span<const double> points) {
    if (const auto* f = cls.as<FiniteFunctions>()) {
        std::vector<std::size_t> idx;
        idx.reserve(points.size());
        for (double x : points) idx.push_back(grid_index(*f, x));
        return count_finite_patterns(*f, idx);
    }
    if (cls.as<Threshold1d>()) {
        std::vector<double> sorted(points.begin(), points.end());
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                "threshold1d growth requires pairwise distinct points");
        // Every dichotomy is realized by a threshold below all points, between two
        // consecutive points, or above all points.
        std::vector<double> candidates;
        if (!sorted.empty()) {
            candidates.push_back(sorted.front() - 1.0);
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
            candidates.push_back(sorted.back() + 1.0);
        }
        std::set<std::vector<int>> patterns;
        for (double b : candidates) {
            std::vector<int> labels;
            labels.reserve(points.size());
            for (double x : points) labels.push_back(x - b >= 0.0 ? 1 : -1);
            patterns.insert(std::move(labels));
        }
        return points.empty() ? 1 : patterns.size();
    }
    throw UnsupportedError("growth_function_exact: class kind '" + cls.kind_name() + "' is not enumerable");
}

int finite_vc_dimension(const FiniteFunctions& f) {
    const std::size_t g = f.grid.size();
    require(g <= 20, "finite_vc_dimension: grid too large for subset enumeration");
    int best = 0;
    for (std::uint32_t mask = 1; mask < (1u << g); ++mask) {
        const int k = std::popcount(mask);
        if (k <= best) continue;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < g; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        if (count_finite_patterns(f, idx) == (std::uint64_t{1} << k)) best = k;
    }
    return best;
}

double sauer_growth_bound(int d_vc, std::uint64_t n) {
    require(d_vc >= 1, "sauer_growth_bound: d_vc must be >= 1");
    require(n >= 1, "sauer_growth_bound: n must be >= 1");
    const double all = std::ldexp(1.0, static_cast<int>(std::min<std::uint64_t>(n, 2000)));
    if (n < static_cast<std::uint64_t>(d_vc)) return all;
    const double d = d_vc;
    const double sauer = std::pow(std::exp(1.0) * static_cast<double>(n) / d, d);
    return std::min(all, sauer);
}

PseudoMetricSample::PseudoMetricSample(std::size_t n_points, std::vector<std::vector<double>> evaluations)
    : n_points_(n_points), evaluations_(std::move(evaluations)) {
    require(n_points_ >= 1, "pseudo-metric sample needs n >= 1");
    for (const auto& f : evaluations_) {
        require(f.size() == n_points_, "evaluation vector length differs from the number of points");
        for (double v : f) require(std::isfinite(v), "pseudo-metric evaluations must be finite");
    }
}

PseudoMetricSample PseudoMetricSample::evaluate(
    const Points& points, const std::vector<std::function<double(std::span<const double>)>>& functions) {
    std::vector<std::vector<double>> evals;
    evals.reserve(functions.size());
    for (const auto& fn : functions) {
        std::vector<double> row(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) row[i] = fn(points[i]);
        evals.push_back(std::move(row));
    }
    return PseudoMetricSample(points.size(), std::move(evals));
}

PseudoMetricSample PseudoMetricSample::from_finite(const FiniteFunctions& f, std::span<const double> points) {
    std::vector<std::size_t> idx;
    for (double x : points) idx.push_back(grid_index(f, x));
    std::vector<std::vector<double>> evals;
    for (const auto& fn : f.values) {
        std::vector<double> row;
        for (std::size_t g : idx) row.push_back(fn[g]);
        evals.push_back(std::move(row));
    }
    return PseudoMetricSample(points.size(), std::move(evals));
}

double pseudo_metric(std::span<const double> f_values, std::span<const double> g_values) {
    require(f_values.size() == g_values.size() && !f_values.empty(), "pseudo_metric: mismatched evaluations");
    double s = 0.0;
    for (std::size_t i = 0; i < f_values.size(); ++i) {
        const double d = f_values[i] - g_values[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(f_values.size()));
}

double PseudoMetricSample::distance(std::size_t f, std::size_t g) const {
    return pseudo_metric(evaluations_.at(f), evaluations_.at(g));
}

double PseudoMetricSample::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < n_functions(); ++i)
        for (std::size_t j = i + 1; j < n_functions(); ++j) d = std::max(d, distance(i, j));
    return d;
}

std::vector<std::size_t> greedy_net(const PseudoMetricSample& sample, double epsilon) {
    require(epsilon > 0.0, "covering: epsilon must be > 0");
    const std::size_t m = sample.n_functions();
    require(m >= 1, "covering: function set must be non-empty");
    std::vector<double> dist(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) dist[i * m + j] = dist[j * m + i] = sample.distance(i, j);

    std::vector<std::size_t> best;
    for (std::size_t start = 0; start < m; ++start) {
        std::vector<std::size_t> net{start};
        std::vector<double> to_net(dist.begin() + static_cast<std::ptrdiff_t>(start * m),
                                   dist.begin() + static_cast<std::ptrdiff_t>((start + 1) * m));
        while (!best.empty() ? net.size() < best.size() : true) {
            auto far = std::max_element(to_net.begin(), to_net.end());
            if (*far < epsilon) break;
            const std::size_t pick = static_cast<std::size_t>(far - to_net.begin());
            net.push_back(pick);
            for (std::size_t j = 0; j < m; ++j) to_net[j] = std::min(to_net[j], dist[pick * m + j]);
        }
        const bool covered = *std::max_element(to_net.begin(), to_net.end()) < epsilon;
        if (covered && (best.empty() || net.size() < best.size())) best = std::move(net);
    }
    return best;
}

std::size_t covering_number_greedy(const PseudoMetricSample& sample, double epsilon) {
    return greedy_net(sample, epsilon).size();
}

}  // namespace depbounds
