#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "depbounds/points.hpp"

namespace depbounds {

struct Interval {
    double lo;
    double hi;
};

struct KernelSpec {
    enum class Kind { gaussian, linear };
    Kind kind = Kind::gaussian;
    double bandwidth = 1.0;  // gaussian: K(x,x') = exp(-|x-x'|^2 / (2 bandwidth^2))

    double operator()(std::span<const double> a, std::span<const double> b) const;
};

// Explicit functions tabulated on a finite scalar evaluation grid.
struct FiniteFunctions {
    std::vector<double> grid;
    std::vector<std::vector<double>> values;  // values[f][g] = f(grid[g])
};

// x -> sign(x - b), b real, sign(0) = +1.
struct Threshold1d {};

struct LinearBall {
    std::size_t dim = 1;
    double radius = 1.0;
    bool with_offset = false;
};

struct KernelBall {
    KernelSpec kernel;
    double radius = 1.0;
};

// C codepoints, each in the ball of radius `radius` of R^dim.
struct Codebook {
    std::size_t codepoints = 1;
    std::size_t dim = 1;
    double radius = 1.0;
};

using ClassShape = std::variant<FiniteFunctions, Threshold1d, LinearBall, KernelBall, Codebook>;

class FunctionClass {
public:
    static FunctionClass finite(std::vector<double> grid, std::vector<std::vector<double>> values);
    static FunctionClass threshold1d();
    static FunctionClass linear_ball(std::size_t dim, double radius, bool with_offset = false);
    static FunctionClass kernel_ball(KernelSpec kernel, double radius);
    static FunctionClass codebook(std::size_t codepoints, std::size_t dim, double radius);

    const ClassShape& shape() const noexcept { return shape_; }
    std::optional<int> vc_dim() const noexcept { return vc_dim_; }
    Interval output_range() const noexcept { return range_; }
    std::string kind_name() const;

    template <typename T>
    const T* as() const noexcept { return std::get_if<T>(&shape_); }

private:
    FunctionClass(ClassShape shape, std::optional<int> vc_dim, Interval range)
        : shape_(std::move(shape)), vc_dim_(vc_dim), range_(range) {}

    ClassShape shape_;
    std::optional<int> vc_dim_;
    Interval range_;
};

// Index of `x` in the grid of a finite class; throws if absent.
std::size_t grid_index(const FiniteFunctions& f, double x);

// Number of distinct label vectors realized on `points` (finite and threshold1d only).
std::uint64_t growth_function_exact(const FunctionClass& cls, std::span<const double> points);

// Largest subset size of the grid shattered by a binary finite class.
int finite_vc_dimension(const FiniteFunctions& f);

double sauer_growth_bound(int d_vc, std::uint64_t n);

// Evaluations of a finite set of functions on points t_1..t_n.
class PseudoMetricSample {
public:
    PseudoMetricSample(std::size_t n_points, std::vector<std::vector<double>> evaluations);

    static PseudoMetricSample evaluate(const Points& points,
                                       const std::vector<std::function<double(std::span<const double>)>>& functions);
    // Restriction of a finite class to a subset of its grid.
    static PseudoMetricSample from_finite(const FiniteFunctions& f, std::span<const double> points);

    std::size_t n_points() const noexcept { return n_points_; }
    std::size_t n_functions() const noexcept { return evaluations_.size(); }
    std::span<const double> values(std::size_t f) const { return evaluations_[f]; }

    double distance(std::size_t f, std::size_t g) const;
    double diameter() const;

private:
    std::size_t n_points_;
    std::vector<std::vector<double>> evaluations_;
};

double pseudo_metric(std::span<const double> f_values, std::span<const double> g_values);

// Indices of a greedy farthest-point proper epsilon-net: every function lies at
// distance < epsilon from some member. The best traversal over all starting
// functions is returned.
std::vector<std::size_t> greedy_net(const PseudoMetricSample& sample, double epsilon);
std::size_t covering_number_greedy(const PseudoMetricSample& sample, double epsilon);

}  // namespace depbounds
