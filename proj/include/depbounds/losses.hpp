#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "depbounds/points.hpp"

namespace depbounds {

// A bounded loss with its range [0, B] and the Lipschitz constant of its scalar link.
class LossSpec {
public:
    enum class Kind { zero_one, margin, clipped_squared, vq_nearest };

    static LossSpec zero_one();
    static LossSpec margin(double gamma);
    static LossSpec clipped_squared(double clip_m);
    // Codepoints and inputs in the ball of radius `radius`.
    static LossSpec vq_nearest(std::size_t codepoints, double radius);

    Kind kind() const noexcept { return kind_; }
    double range() const noexcept { return range_; }
    double lipschitz() const noexcept { return lipschitz_; }
    double gamma() const noexcept { return param_; }
    double clip() const noexcept { return param_; }
    std::size_t codepoints() const noexcept { return codepoints_; }
    std::string name() const;

private:
    LossSpec(Kind kind, double range, double lipschitz, double param, std::size_t codepoints)
        : kind_(kind), range_(range), lipschitz_(lipschitz), param_(param), codepoints_(codepoints) {}

    Kind kind_;
    double range_;
    double lipschitz_;
    double param_;
    std::size_t codepoints_;
};

// Scalar-prediction losses. zero_one compares labels; margin takes a real score
// g(x); clipped_squared clips the prediction to [-M, M].
double eval_loss(const LossSpec& loss, double prediction, double y);

// Nearest-codepoint distortion min_k |x - f_k|^2.
double eval_loss(const LossSpec& loss, const Points& codebook, std::span<const double> x);

// Models evaluated through eval_loss.
struct ThresholdModel {
    double threshold = 0.0;
    double score(std::span<const double> x) const { return x[0] - threshold; }
    double predict(std::span<const double> x) const { return score(x) >= 0.0 ? 1.0 : -1.0; }
};

struct LinearModel {
    std::vector<double> weights;
    double offset = 0.0;
    double score(std::span<const double> x) const { return dot(weights, x) + offset; }
    double predict(std::span<const double> x) const { return score(x) >= 0.0 ? 1.0 : -1.0; }
};

struct CodebookModel {
    Points codepoints;
};

using Model = std::variant<ThresholdModel, LinearModel, CodebookModel>;

// Loss of `model` at z = (x, y); throws IncompatibleError for mismatched pairs.
double model_loss(const LossSpec& loss, const Model& model, std::span<const double> x, double y);

}  // namespace depbounds
