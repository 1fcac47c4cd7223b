#include "depbounds/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "depbounds/error.hpp"

namespace depbounds {

LossSpec LossSpec::zero_one() { return LossSpec(Kind::zero_one, 1.0, 1.0, 0.0, 0); }

LossSpec LossSpec::margin(double gamma) {
    require(gamma > 0.0, "margin loss: gamma must be > 0");
    return LossSpec(Kind::margin, 1.0, 1.0 / gamma, gamma, 0);
}

LossSpec LossSpec::clipped_squared(double clip_m) {
    require(clip_m > 0.0, "clipped squared loss: M must be > 0");
    // Labels are assumed to lie in [-M, M] as well.
    return LossSpec(Kind::clipped_squared, 4.0 * clip_m * clip_m, 4.0 * clip_m, clip_m, 0);
}

LossSpec LossSpec::vq_nearest(std::size_t codepoints, double radius) {
    require(codepoints >= 1, "vq loss: C must be >= 1");
    require(radius > 0.0, "vq loss: radius must be > 0");
    return LossSpec(Kind::vq_nearest, 4.0 * radius * radius, 4.0 * radius, radius, codepoints);
}

std::string LossSpec::name() const {
    switch (kind_) {
        case Kind::zero_one: return "zero_one";
        case Kind::margin: return "margin";
        case Kind::clipped_squared: return "clipped_squared";
        case Kind::vq_nearest: return "vq_nearest";
    }
    return "unknown";
}

double eval_loss(const LossSpec& loss, double prediction, double y) {
    switch (loss.kind()) {
        case LossSpec::Kind::zero_one:
            return prediction != y ? 1.0 : 0.0;
        case LossSpec::Kind::margin:
            return std::min(1.0, std::max(0.0, (1.0 - y * prediction) / loss.gamma()));
        case LossSpec::Kind::clipped_squared: {
            const double clipped = std::clamp(prediction, -loss.clip(), loss.clip());
            return (y - clipped) * (y - clipped);
        }
        case LossSpec::Kind::vq_nearest:
            throw IncompatibleError("vq_nearest loss needs a codebook, not a scalar prediction");
    }
    return 0.0;
}

double eval_loss(const LossSpec& loss, const Points& codebook, std::span<const double> x) {
    if (loss.kind() != LossSpec::Kind::vq_nearest)
        throw IncompatibleError("codebook model paired with non-quantization loss '" + loss.name() + "'");
    require(!codebook.empty(), "vq loss: empty codebook");
    require(codebook.dim() == x.size(), "vq loss: codebook and input dimensions differ");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < codebook.size(); ++k) {
        double sq = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) sq += (x[j] - codebook[k][j]) * (x[j] - codebook[k][j]);
        best = std::min(best, sq);
    }
    return best;
}

double model_loss(const LossSpec& loss, const Model& model, std::span<const double> x, double y) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CodebookModel>) {
                return eval_loss(loss, m.codepoints, x);
            } else {
                switch (loss.kind()) {
                    case LossSpec::Kind::zero_one: return eval_loss(loss, m.predict(x), y);
                    case LossSpec::Kind::margin:
                    case LossSpec::Kind::clipped_squared: return eval_loss(loss, m.score(x), y);
                    case LossSpec::Kind::vq_nearest: break;
                }
                throw IncompatibleError("vq_nearest loss requires a codebook model");
            }
        },
        model);
}

}  // namespace depbounds
