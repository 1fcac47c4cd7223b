#include "depbounds/processes.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "depbounds/error.hpp"

namespace depbounds {

namespace {

using Matrix = std::vector<double>;  // square, row-major

Matrix multiply(const Matrix& a, const Matrix& b, std::size_t d) {
    Matrix c(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            const double aik = a[i * d + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) c[i * d + j] += aik * b[k * d + j];
        }
    return c;
}

Matrix transpose(const Matrix& a, std::size_t d) {
    Matrix t(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) t[j * d + i] = a[i * d + j];
    return t;
}

Matrix cholesky(const Matrix& a, std::size_t d) {
    Matrix l(d * d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double s = a[j * d + j];
        for (std::size_t k = 0; k < j; ++k) s -= l[j * d + k] * l[j * d + k];
        require(s > 0.0, "stationary covariance is not positive definite");
        l[j * d + j] = std::sqrt(s);
        for (std::size_t i = j + 1; i < d; ++i) {
            double t = a[i * d + j];
            for (std::size_t k = 0; k < j; ++k) t -= l[i * d + k] * l[j * d + k];
            l[i * d + j] = t / l[j * d + j];
        }
    }
    return l;
}

double sign_label(double x, double b) { return x - b >= 0.0 ? 1.0 : -1.0; }

double threshold_label(double x, double b_star, double flip_p, CounterRng& rng) {
    double y = sign_label(x, b_star);
    if (flip_p > 0.0 && rng.uniform() < flip_p) y = -y;
    return y;
}

void clip_to_ball(std::span<double> x, const std::optional<double>& radius) {
    if (!radius) return;
    const double nrm = norm2(x);
    if (nrm > *radius)
        for (double& v : x) v *= *radius / nrm;
}

// Correlated Gaussian draw with covariance L L^T.
void draw_gaussian(const Matrix& chol, std::size_t d, std::normal_distribution<double>& normal, CounterRng& rng,
                   std::span<double> out) {
    std::vector<double> e(d);
    for (double& v : e) v = normal(rng);
    for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= i; ++k) s += chol[i * d + k] * e[k];
        out[i] = s;
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

std::vector<double> ar_state_covariance(const std::vector<double>& coefficients, double sigma) {
    const std::size_t d = coefficients.size();
    require(d >= 1, "AR(d) needs at least one coefficient");
    Matrix a(d * d, 0.0);
    for (std::size_t j = 0; j < d; ++j) a[j] = coefficients[j];
    for (std::size_t i = 1; i < d; ++i) a[i * d + (i - 1)] = 1.0;
    Matrix p(d * d, 0.0);
    p[0] = sigma * sigma;
    // Doubling iteration for P = A P A^T + Q: P <- P + A P A^T, A <- A^2.
    for (int it = 0; it < 200; ++it) {
        Matrix next = multiply(multiply(a, p, d), transpose(a, d), d);
        double change = 0.0;
        double scale = 0.0;
        for (std::size_t k = 0; k < d * d; ++k) {
            change = std::max(change, std::abs(next[k]));
            p[k] += next[k];
            scale = std::max(scale, std::abs(p[k]));
        }
        require(std::isfinite(scale) && scale < 1e12, "AR(d) coefficients are not stable (no stationary law)");
        if (change <= 1e-12 * std::max(1.0, scale)) return p;
        a = multiply(a, a, d);
    }
    throw ParameterError("AR(d) stationary covariance did not converge; coefficients are not stable");
}

void ProcessSpec::validate() const {
    std::visit(
        [](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Ar1Threshold>) {
                require(std::abs(k.a) < 1.0, "ar1: |a| must be < 1");
                require(k.sigma > 0.0, "ar1: sigma must be > 0");
                require(k.flip_p >= 0.0 && k.flip_p < 1.0, "ar1: flip_p must be in [0,1)");
            } else if constexpr (std::is_same_v<T, ArdLinearSystem>) {
                require(!k.coefficients.empty(), "ar_d: needs at least one coefficient");
                require(k.sigma > 0.0, "ar_d: sigma must be > 0");
                if (k.clip_radius) require(*k.clip_radius > 0.0, "ar_d: clip radius must be > 0");
                (void)ar_state_covariance(k.coefficients, k.sigma);
            } else if constexpr (std::is_same_v<T, MarkovBinary>) {
                require(k.rho >= 0.0 && k.rho < 1.0, "markov_binary: rho must be in [0,1)");
            } else {
                if (k.distribution == IidBaseline::Distribution::normal)
                    require(k.p2 > 0.0, "iid normal: standard deviation must be > 0");
                else
                    require(k.p2 > k.p1, "iid uniform: upper end must exceed lower end");
                require(k.flip_p >= 0.0 && k.flip_p < 1.0, "iid: flip_p must be in [0,1)");
            }
        },
        kind);
}

std::size_t ProcessSpec::input_dim() const {
    if (const auto* ard = std::get_if<ArdLinearSystem>(&kind)) return ard->coefficients.size();
    return 1;
}

std::string ProcessSpec::id() const {
    return std::visit(
        [](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Ar1Threshold>) {
                return "ar1(a=" + fmt(k.a) + ",sigma=" + fmt(k.sigma) + ",b=" + fmt(k.b_star) +
                       ",flip=" + fmt(k.flip_p) + ")";
            } else if constexpr (std::is_same_v<T, ArdLinearSystem>) {
                std::string s = "ar_d(theta=[";
                for (std::size_t i = 0; i < k.coefficients.size(); ++i)
                    s += (i ? "," : "") + fmt(k.coefficients[i]);
                s += "],sigma=" + fmt(k.sigma);
                if (k.clip_radius) s += ",clip=" + fmt(*k.clip_radius);
                return s + ")";
            } else if constexpr (std::is_same_v<T, MarkovBinary>) {
                return "markov_binary(rho=" + fmt(k.rho) + ")";
            } else {
                const bool normal = k.distribution == IidBaseline::Distribution::normal;
                return std::string("iid_") + (normal ? "normal(" : "uniform(") + fmt(k.p1) + "," + fmt(k.p2) +
                       ",b=" + fmt(k.b_star) + ",flip=" + fmt(k.flip_p) + ")";
            }
        },
        kind);
}

double MarginalLaw::cdf(double x) const {
    switch (kind) {
        case Kind::gaussian:
            return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
        case Kind::uniform_interval:
            return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
        case Kind::uniform_signs:
            return x < -1.0 ? 0.0 : (x < 1.0 ? 0.5 : 1.0);
        case Kind::gaussian_state:
            break;
    }
    throw UnsupportedError("cdf is only defined for scalar marginal laws");
}

MarginalLaw stationary_params(const ProcessSpec& spec) {
    spec.validate();
    MarginalLaw law;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Ar1Threshold>) {
                law.kind = MarginalLaw::Kind::gaussian;
                law.variance = k.sigma * k.sigma / (1.0 - k.a * k.a);
            } else if constexpr (std::is_same_v<T, ArdLinearSystem>) {
                law.kind = MarginalLaw::Kind::gaussian_state;
                law.state_dim = k.coefficients.size();
                law.covariance = ar_state_covariance(k.coefficients, k.sigma);
                law.variance = law.covariance[0];
            } else if constexpr (std::is_same_v<T, MarkovBinary>) {
                law.kind = MarginalLaw::Kind::uniform_signs;
                law.variance = 1.0;
            } else if (k.distribution == IidBaseline::Distribution::normal) {
                law.kind = MarginalLaw::Kind::gaussian;
                law.mean = k.p1;
                law.variance = k.p2 * k.p2;
            } else {
                law.kind = MarginalLaw::Kind::uniform_interval;
                law.lo = k.p1;
                law.hi = k.p2;
                law.mean = 0.5 * (k.p1 + k.p2);
                law.variance = (k.p2 - k.p1) * (k.p2 - k.p1) / 12.0;
            }
        },
        spec.kind);
    return law;
}

std::uint64_t stream_seed(std::uint64_t experiment_seed, std::uint64_t replication, StreamRole role) {
    return CounterRng::stream(experiment_seed, replication, role).key();
}

SequenceSample simulate_sequence(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "simulate_sequence: n must be >= 1");
    spec.validate();
    CounterRng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SequenceSample out{Points(spec.input_dim()), {}, seed, spec.id()};
    out.x.reserve(n);
    out.y.reserve(n);

    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Ar1Threshold>) {
                double x = std::sqrt(k.sigma * k.sigma / (1.0 - k.a * k.a)) * normal(rng);
                for (std::size_t i = 0; i < n; ++i) {
                    if (i > 0) x = k.a * x + k.sigma * normal(rng);
                    out.x.push_back(x);
                    out.y.push_back(threshold_label(x, k.b_star, k.flip_p, rng));
                }
            } else if constexpr (std::is_same_v<T, ArdLinearSystem>) {
                const std::size_t d = k.coefficients.size();
                const Matrix chol = cholesky(ar_state_covariance(k.coefficients, k.sigma), d);
                std::vector<double> state(d);
                draw_gaussian(chol, d, normal, rng, state);
                std::vector<double> lag(d);
                for (std::size_t i = 0; i < n; ++i) {
                    const double y = dot(k.coefficients, state) + k.sigma * normal(rng);
                    lag = state;
                    clip_to_ball(lag, k.clip_radius);
                    out.x.push_back(lag);
                    out.y.push_back(y);
                    std::rotate(state.rbegin(), state.rbegin() + 1, state.rend());
                    state[0] = y;
                }
            } else if constexpr (std::is_same_v<T, MarkovBinary>) {
                double x = rng.uniform() < 0.5 ? -1.0 : 1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i > 0 && rng.uniform() >= k.rho) x = rng.uniform() < 0.5 ? -1.0 : 1.0;
                    out.x.push_back(x);
                    out.y.push_back(x);
                }
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = k.distribution == IidBaseline::Distribution::normal
                                         ? k.p1 + k.p2 * normal(rng)
                                         : k.p1 + (k.p2 - k.p1) * rng.uniform();
                    out.x.push_back(x);
                    out.y.push_back(threshold_label(x, k.b_star, k.flip_p, rng));
                }
            }
        },
        spec.kind);
    return out;
}

SequenceSample sample_marginal(const ProcessSpec& spec, std::size_t m, std::uint64_t seed) {
    const MarginalLaw law = stationary_params(spec);
    CounterRng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SequenceSample out{Points(spec.input_dim()), {}, seed, spec.id() + "/marginal"};
    out.x.reserve(m);
    out.y.reserve(m);

    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Ar1Threshold>) {
                const double sd = std::sqrt(law.variance);
                for (std::size_t i = 0; i < m; ++i) {
                    const double x = sd * normal(rng);
                    out.x.push_back(x);
                    out.y.push_back(threshold_label(x, k.b_star, k.flip_p, rng));
                }
            } else if constexpr (std::is_same_v<T, ArdLinearSystem>) {
                const std::size_t d = law.state_dim;
                const Matrix chol = cholesky(law.covariance, d);
                std::vector<double> state(d);
                for (std::size_t i = 0; i < m; ++i) {
                    draw_gaussian(chol, d, normal, rng, state);
                    const double y = dot(k.coefficients, state) + k.sigma * normal(rng);
                    clip_to_ball(state, k.clip_radius);
                    out.x.push_back(state);
                    out.y.push_back(y);
                }
            } else if constexpr (std::is_same_v<T, MarkovBinary>) {
                for (std::size_t i = 0; i < m; ++i) {
                    const double x = rng.uniform() < 0.5 ? -1.0 : 1.0;
                    out.x.push_back(x);
                    out.y.push_back(x);
                }
            } else {
                for (std::size_t i = 0; i < m; ++i) {
                    const double x = k.distribution == IidBaseline::Distribution::normal
                                         ? k.p1 + k.p2 * normal(rng)
                                         : k.p1 + (k.p2 - k.p1) * rng.uniform();
                    out.x.push_back(x);
                    out.y.push_back(threshold_label(x, k.b_star, k.flip_p, rng));
                }
            }
        },
        spec.kind);
    return out;
}

double threshold_risk(const ProcessSpec& spec, double threshold) {
    double b_star = 0.0;
    double flip = 0.0;
    if (const auto* ar = std::get_if<Ar1Threshold>(&spec.kind)) {
        b_star = ar->b_star;
        flip = ar->flip_p;
    } else if (const auto* iid = std::get_if<IidBaseline>(&spec.kind)) {
        b_star = iid->b_star;
        flip = iid->flip_p;
    } else {
        throw UnsupportedError("threshold_risk: process '" + spec.id() + "' has no threshold labels");
    }
    const MarginalLaw law = stationary_params(spec);
    // The classifier disagrees with the noiseless label exactly between b and b*.
    double disagree = 0.0;
    if (std::isinf(threshold))
        disagree = threshold < 0 ? law.cdf(b_star) : 1.0 - law.cdf(b_star);
    else
        disagree = std::abs(law.cdf(threshold) - law.cdf(b_star));
    return flip + (1.0 - 2.0 * flip) * disagree;
}

void write_sequence_csv(const SequenceSample& sample, std::ostream& out) {
    const std::size_t d = sample.x.dim();
    out << "index";
    if (d == 1)
        out << ",x";
    else
        for (std::size_t j = 0; j < d; ++j) out << ",x" << (j + 1);
    out << ",y\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        out << i;
        for (double v : sample.x[i]) out << ',' << v;
        out << ',' << sample.y[i] << '\n';
    }
}

}  // namespace depbounds
