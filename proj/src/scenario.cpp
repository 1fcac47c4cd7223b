#include "depbounds/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "depbounds/error.hpp"

namespace depbounds {

void AffineMap::apply(std::span<const double> x, std::span<double> out) const {
    for (std::size_t r = 0; r < rows; ++r) {
        double s = offset.empty() ? 0.0 : offset[r];
        for (std::size_t j = 0; j < in_dim; ++j) s += matrix[r * in_dim + j] * x[j];
        out[r] = s;
    }
}

bool AffineMap::is_constant() const {
    return std::all_of(matrix.begin(), matrix.end(), [](double v) { return v == 0.0; });
}

double AffineScalar::operator()(std::span<const double> x) const {
    double s = offset;
    for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * x[j];
    return s;
}

std::size_t set_dim(const ConvexSet& set) {
    if (const auto* box = std::get_if<BoxSet>(&set)) return box->lo.size();
    return std::get<BallSet>(set).center.size();
}

bool set_contains(const ConvexSet& set, std::span<const double> v, double tol) {
    if (const auto* box = std::get_if<BoxSet>(&set)) {
        for (std::size_t j = 0; j < v.size(); ++j)
            if (v[j] < box->lo[j] - tol || v[j] > box->hi[j] + tol) return false;
        return true;
    }
    const auto& ball = std::get<BallSet>(set);
    double sq = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) sq += (v[j] - ball.center[j]) * (v[j] - ball.center[j]);
    return std::sqrt(sq) <= ball.radius + tol;
}

namespace {

void validate_set(const ConvexSet& set, std::size_t dim, const char* what) {
    if (const auto* box = std::get_if<BoxSet>(&set)) {
        require(box->lo.size() == dim && box->hi.size() == dim, std::string(what) + ": box dimension mismatch");
        for (std::size_t j = 0; j < dim; ++j)
            require(std::isfinite(box->lo[j]) && std::isfinite(box->hi[j]) && box->lo[j] < box->hi[j],
                    std::string(what) + ": box needs finite lo < hi");
    } else {
        const auto& ball = std::get<BallSet>(set);
        require(ball.center.size() == dim, std::string(what) + ": ball dimension mismatch");
        require(ball.radius > 0.0 && std::isfinite(ball.radius), std::string(what) + ": ball radius must be > 0");
    }
}

double spectral_norm(const AffineMap& map) {
    // Power iteration on A^T A.
    std::vector<double> v(map.in_dim, 1.0 / std::sqrt(static_cast<double>(map.in_dim)));
    std::vector<double> av(map.rows);
    double sigma = 0.0;
    for (int it = 0; it < 500; ++it) {
        for (std::size_t r = 0; r < map.rows; ++r) {
            av[r] = 0.0;
            for (std::size_t j = 0; j < map.in_dim; ++j) av[r] += map.matrix[r * map.in_dim + j] * v[j];
        }
        std::vector<double> atav(map.in_dim, 0.0);
        for (std::size_t r = 0; r < map.rows; ++r)
            for (std::size_t j = 0; j < map.in_dim; ++j) atav[j] += map.matrix[r * map.in_dim + j] * av[r];
        const double nrm = norm2(atav);
        if (nrm == 0.0) return 0.0;
        const double next = std::sqrt(nrm);
        for (std::size_t j = 0; j < map.in_dim; ++j) v[j] = atav[j] / nrm;
        if (std::abs(next - sigma) <= 1e-14 * next) return next;
        sigma = next;
    }
    return sigma;
}

// Dense symmetric solve by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0) throw std::runtime_error("singular Newton system");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
        x[i] = s / a[i * n + i];
    }
    return x;
}

// Log-barrier for  min c^T v  s.t.  G v <= h  and  |v_{0..q-1} - center| <= radius.
class Barrier {
public:
    Barrier(std::size_t dim, std::vector<double> g, std::vector<double> h, std::vector<double> cost,
            std::optional<BallSet> ball)
        : dim_(dim), g_(std::move(g)), h_(std::move(h)), cost_(std::move(cost)), ball_(std::move(ball)) {}

    std::size_t constraints() const { return h_.size() + (ball_ ? 1 : 0); }

    double ball_slack(std::span<const double> v) const {
        double sq = 0.0;
        for (std::size_t j = 0; j < ball_->center.size(); ++j) sq += (v[j] - ball_->center[j]) * (v[j] - ball_->center[j]);
        return ball_->radius * ball_->radius - sq;
    }

    // Barrier value; +inf outside the strict interior.
    double value(std::span<const double> v, double t) const {
        double f = t * dot(cost_, v);
        for (std::size_t r = 0; r < h_.size(); ++r) {
            const double s = h_[r] - dot(std::span<const double>(g_.data() + r * dim_, dim_), v);
            if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
            f -= std::log(s);
        }
        if (ball_) {
            const double u = ball_slack(v);
            if (!(u > 0.0)) return std::numeric_limits<double>::infinity();
            f -= std::log(u);
        }
        return f;
    }

    void derivatives(std::span<const double> v, double t, std::vector<double>& grad, std::vector<double>& hess) const {
        grad.assign(dim_, 0.0);
        hess.assign(dim_ * dim_, 0.0);
        for (std::size_t j = 0; j < dim_; ++j) grad[j] = t * cost_[j];
        for (std::size_t r = 0; r < h_.size(); ++r) {
            const double* row = g_.data() + r * dim_;
            const double s = h_[r] - dot(std::span<const double>(row, dim_), v);
            const double inv = 1.0 / s;
            for (std::size_t j = 0; j < dim_; ++j) {
                if (row[j] == 0.0) continue;
                grad[j] += row[j] * inv;
                for (std::size_t k = 0; k < dim_; ++k) hess[j * dim_ + k] += row[j] * row[k] * inv * inv;
            }
        }
        if (ball_) {
            const std::size_t q = ball_->center.size();
            const double u = ball_slack(v);
            for (std::size_t j = 0; j < q; ++j) {
                const double dj = v[j] - ball_->center[j];
                grad[j] += 2.0 * dj / u;
                hess[j * dim_ + j] += 2.0 / u;
                for (std::size_t k = 0; k < q; ++k) hess[j * dim_ + k] += 4.0 * dj * (v[k] - ball_->center[k]) / (u * u);
            }
        }
    }

    // Path-following; `stop` may end the run early at any Newton iterate.
    template <typename Stop>
    std::vector<double> minimize(std::vector<double> v, const SolverOptions& options, Stop&& stop) const {
        double t = 1.0;
        int steps = 0;
        std::vector<double> grad;
        std::vector<double> hess;
        std::vector<double> trial(dim_);
        while (true) {
            for (int it = 0; it < 200 && steps < options.max_newton_steps; ++it, ++steps) {
                derivatives(v, t, grad, hess);
                std::vector<double> neg(grad.size());
                for (std::size_t j = 0; j < grad.size(); ++j) neg[j] = -grad[j];
                std::vector<double> step = solve_dense(hess, neg);
                const double slope = dot(grad, step);
                if (-slope / 2.0 <= 1e-12) break;
                const double f0 = value(v, t);
                double alpha = 1.0;
                for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
                    for (std::size_t j = 0; j < dim_; ++j) trial[j] = v[j] + alpha * step[j];
                    if (value(trial, t) <= f0 + 0.25 * alpha * slope) break;
                }
                if (value(trial, t) >= f0) break;
                v = trial;
                if (stop(v)) return v;
            }
            if (stop(v)) return v;
            if (static_cast<double>(constraints()) / t < options.gap_tolerance || steps >= options.max_newton_steps)
                return v;
            t *= 20.0;
        }
    }

private:
    std::size_t dim_;
    std::vector<double> g_;
    std::vector<double> h_;
    std::vector<double> cost_;
    std::optional<BallSet> ball_;
};

double max_residual(const ScenarioProgramSpec& program, const Points& scenarios, std::span<const double> theta,
                    double margin) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scenarios.size(); ++i)
        worst = std::max(worst, program.constraint(scenarios[i], theta) + margin);
    return worst;
}

}  // namespace

void ScenarioProgramSpec::validate() const {
    const std::size_t p = cost.size();
    require(p >= 1, "scenario program: empty parameter vector");
    require(!pieces.empty(), "scenario program: needs at least one constraint piece");
    require(margin > 0.0, "scenario program: margin gamma must be > 0");
    require(input_dim >= 1, "scenario program: input_dim must be >= 1");
    for (const auto& piece : pieces) {
        require(piece.psi.rows == p, "scenario program: psi_k must map into R^p (phi_k is the identity)");
        require(piece.psi.in_dim == input_dim, "scenario program: psi_k input dimension mismatch");
        require(piece.psi.matrix.size() == p * input_dim, "scenario program: psi_k matrix has wrong size");
        require(piece.psi.offset.empty() || piece.psi.offset.size() == p, "scenario program: psi_k offset size");
        require(piece.eta.weights.empty() || piece.eta.weights.size() == input_dim,
                "scenario program: eta_k weight size");
    }
    validate_set(theta_set, p, "theta_set");
    if (uncertainty_set) validate_set(*uncertainty_set, input_dim, "uncertainty_set");
    if (vc_dim) require(*vc_dim >= 1, "scenario program: vc_dim must be >= 1");
}

double ScenarioProgramSpec::constraint(std::span<const double> x, std::span<const double> theta) const {
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<double> psi(theta.size());
    for (const auto& piece : pieces) {
        piece.psi.apply(x, psi);
        worst = std::max(worst, dot(psi, theta) + piece.eta(x));
    }
    return worst;
}

double ScenarioProgramSpec::objective(std::span<const double> theta) const { return dot(cost, theta); }

double PieceBounds::sum() const {
    double s = 0.0;
    for (std::size_t k = 0; k < tau.size(); ++k) s += tau[k] * lambda[k];
    return s;
}

PieceBounds tau_lambda(const ScenarioProgramSpec& program, const std::optional<ConvexSet>& domain) {
    program.validate();
    const std::optional<ConvexSet>& xset = domain ? domain : program.uncertainty_set;
    if (domain) validate_set(*domain, program.input_dim, "uncertainty domain");
    PieceBounds out;
    out.tau_method = "closed_form";

    double lambda = 0.0;
    if (const auto* box = std::get_if<BoxSet>(&program.theta_set)) {
        double sq = 0.0;
        for (std::size_t j = 0; j < box->lo.size(); ++j) {
            const double m = std::max(std::abs(box->lo[j]), std::abs(box->hi[j]));
            sq += m * m;
        }
        lambda = std::sqrt(sq);
    } else {
        const auto& ball = std::get<BallSet>(program.theta_set);
        lambda = norm2(ball.center) + ball.radius;
    }

    const std::size_t p = program.param_dim();
    for (const auto& piece : program.pieces) {
        std::vector<double> value(p);
        double tau = 0.0;
        bool exact = true;
        if (piece.psi.is_constant()) {
            std::vector<double> zero(program.input_dim, 0.0);
            piece.psi.apply(zero, value);
            tau = norm2(value);
        } else if (!xset) {
            throw ParameterError("tau_lambda: psi_k depends on x but the uncertainty domain is unbounded "
                                 "(declare uncertainty_set or use a clipped process)");
        } else if (const auto* box = std::get_if<BoxSet>(&*xset)) {
            // A convex function attains its maximum over a box at a vertex.
            const std::size_t d = program.input_dim;
            require(d <= 20, "tau_lambda: box vertex enumeration limited to 20 dimensions");
            std::vector<double> vertex(d);
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
                for (std::size_t j = 0; j < d; ++j) vertex[j] = (mask >> j & 1U) ? box->hi[j] : box->lo[j];
                piece.psi.apply(vertex, value);
                tau = std::max(tau, norm2(value));
            }
        } else {
            const auto& ball = std::get<BallSet>(*xset);
            piece.psi.apply(ball.center, value);
            const double at_center = norm2(value);
            const double sigma = spectral_norm(piece.psi);
            if (program.input_dim == 1) {
                std::vector<double> ends{ball.center[0] - ball.radius, ball.center[0] + ball.radius};
                for (double e : ends) {
                    piece.psi.apply(std::span<const double>(&e, 1), value);
                    tau = std::max(tau, norm2(value));
                }
            } else if (at_center == 0.0) {
                tau = ball.radius * sigma;
            } else {
                tau = at_center + ball.radius * sigma;
                exact = false;
                out.tau_method = "triangle_upper";
            }
        }
        out.tau.push_back(tau);
        out.lambda.push_back(lambda);
        out.tau_exact.push_back(exact);
    }
    return out;
}

namespace {

void check_unit(double v, const char* name) {
    require(v > 0.0 && v < 1.0, std::string(name) + " must lie in (0,1)");
}

}  // namespace

std::uint64_t plan_n_vc(double epsilon, double delta, int d_vc) {
    check_unit(epsilon, "epsilon");
    check_unit(delta, "delta");
    require(d_vc >= 1, "plan_n_vc: d_vc must be >= 1");
    const long double eps = epsilon;
    const long double n = (5.0L / eps) * (d_vc * std::log(40.0L / eps) + std::log(4.0L / static_cast<long double>(delta)));
    return static_cast<std::uint64_t>(std::ceil(n));
}

std::uint64_t plan_n_margin(double epsilon, double delta, double gamma, double tau_lambda_sum) {
    check_unit(epsilon, "epsilon");
    check_unit(delta, "delta");
    require(gamma > 0.0, "plan_n_margin: gamma must be > 0");
    require(tau_lambda_sum > 0.0, "plan_n_margin: sum of tau_k Lambda_k must be > 0");
    const long double eps = epsilon;
    const long double root = (2.0L / gamma) * tau_lambda_sum + std::sqrt(std::log(1.0L / static_cast<long double>(delta)));
    return static_cast<std::uint64_t>(std::ceil(root * root / (eps * eps)));
}

std::string method_name(CertificateMethod m) { return m == CertificateMethod::vc ? "vc" : "margin"; }

double violation_bound_vc(std::uint64_t n, int d_vc, double delta) {
    check_unit(delta, "delta");
    require(d_vc >= 1, "violation_bound_vc: d_vc must be >= 1");
    require(n >= static_cast<std::uint64_t>(d_vc), "violation_bound_vc: needs n >= d_vc");
    const double nn = static_cast<double>(n);
    const double d = d_vc;
    return (4.0 * d * std::log(2.0 * std::exp(1.0) * nn / d) + std::log(4.0 / delta)) / nn;
}

double violation_bound_margin(std::uint64_t n, double gamma, double tau_lambda_sum, double delta) {
    check_unit(delta, "delta");
    require(n >= 1, "violation_bound_margin: n must be >= 1");
    require(gamma > 0.0, "violation_bound_margin: gamma must be > 0");
    require(tau_lambda_sum >= 0.0, "violation_bound_margin: sum of tau_k Lambda_k must be >= 0");
    const double nn = static_cast<double>(n);
    return (2.0 / gamma) * tau_lambda_sum / std::sqrt(nn) + std::sqrt(std::log(1.0 / delta) / (2.0 * nn));
}

SolveResult solve_margin_program(const ScenarioProgramSpec& program, const Points& scenarios, SolveMode mode,
                                 std::optional<double> margin_override, const SolverOptions& options) {
    program.validate();
    require(!scenarios.empty(), "solve_margin_program: no scenarios");
    require(scenarios.dim() == program.input_dim, "solve_margin_program: scenario dimension mismatch");
    const double margin = margin_override.value_or(program.margin);
    require(margin >= 0.0, "solve_margin_program: margin must be >= 0");
    const std::size_t p = program.param_dim();

    // Rows a_j . theta + b_j <= 0, one per (scenario, piece).
    std::vector<double> a_rows;
    std::vector<double> b_rows;
    std::vector<double> psi(p);
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        for (const auto& piece : program.pieces) {
            piece.psi.apply(scenarios[i], psi);
            a_rows.insert(a_rows.end(), psi.begin(), psi.end());
            b_rows.push_back(piece.eta(scenarios[i]) + margin);
        }
    }
    const std::size_t rows = b_rows.size();

    std::optional<BallSet> ball;
    std::vector<double> theta0(p, 0.0);
    std::vector<std::pair<std::vector<double>, double>> box_rows;  // (row over theta, rhs)
    if (const auto* box = std::get_if<BoxSet>(&program.theta_set)) {
        for (std::size_t j = 0; j < p; ++j) {
            theta0[j] = 0.5 * (box->lo[j] + box->hi[j]);
            std::vector<double> up(p, 0.0), down(p, 0.0);
            up[j] = 1.0;
            down[j] = -1.0;
            box_rows.emplace_back(up, box->hi[j]);
            box_rows.emplace_back(down, -box->lo[j]);
        }
    } else {
        ball = std::get<BallSet>(program.theta_set);
        theta0 = ball->center;
    }

    // Phase I over (theta, s): minimize s s.t. a_j . theta + b_j <= s.
    const std::size_t q = p + 1;
    std::vector<double> g1;
    std::vector<double> h1;
    for (std::size_t r = 0; r < rows; ++r) {
        g1.insert(g1.end(), a_rows.begin() + static_cast<std::ptrdiff_t>(r * p),
                  a_rows.begin() + static_cast<std::ptrdiff_t>((r + 1) * p));
        g1.push_back(-1.0);
        h1.push_back(-b_rows[r]);
    }
    for (const auto& [row, rhs] : box_rows) {
        g1.insert(g1.end(), row.begin(), row.end());
        g1.push_back(0.0);
        h1.push_back(rhs);
    }
    std::vector<double> cost1(q, 0.0);
    cost1[p] = 1.0;
    std::vector<double> v0 = theta0;
    v0.push_back(max_residual(program, scenarios, theta0, margin) + 1.0);
    const double target = mode == SolveMode::feasibility ? std::max(options.slack_target, 0.0) : 1e-8;
    Barrier phase1(q, std::move(g1), std::move(h1), std::move(cost1), ball);
    std::vector<double> v = phase1.minimize(v0, options, [&](const std::vector<double>& cur) { return cur[p] < -target; });
    std::vector<double> theta(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(p));

    SolveResult result;
    double residual = max_residual(program, scenarios, theta, margin);
    if (!(residual < 0.0)) {
        result.theta = theta;
        result.feasible = residual <= 0.0 && set_contains(program.theta_set, theta);
        result.objective = program.objective(theta);
        result.max_residual = residual;
        result.status = result.feasible ? "feasible_on_boundary" : "infeasible";
        return result;
    }

    if (mode == SolveMode::optimize && std::any_of(program.cost.begin(), program.cost.end(), [](double c) { return c != 0.0; })) {
        std::vector<double> g2 = a_rows;
        std::vector<double> h2(rows);
        for (std::size_t r = 0; r < rows; ++r) h2[r] = -b_rows[r];
        for (const auto& [row, rhs] : box_rows) {
            g2.insert(g2.end(), row.begin(), row.end());
            h2.push_back(rhs);
        }
        Barrier phase2(p, std::move(g2), std::move(h2), program.cost, ball);
        theta = phase2.minimize(theta, options, [](const std::vector<double>&) { return false; });
        residual = max_residual(program, scenarios, theta, margin);
    }

    result.theta = theta;
    result.max_residual = residual;
    result.objective = program.objective(theta);
    result.feasible = residual <= 0.0 && set_contains(program.theta_set, theta);
    result.status = result.feasible ? (mode == SolveMode::optimize ? "optimal" : "feasible") : "infeasible";
    return result;
}

Certificate certify(const ScenarioProgramSpec& program, const ProcessSpec& process, double epsilon, double delta,
                    CertificateMethod method, std::uint64_t seed) {
    check_unit(epsilon, "epsilon");
    check_unit(delta, "delta");
    program.validate();
    require(process.input_dim() == program.input_dim, "certify: process and program input dimensions differ");

    Certificate cert;
    cert.epsilon = epsilon;
    cert.delta = delta;
    cert.method = method;
    cert.seed = seed;
    cert.process_id = process.id();

    std::optional<ConvexSet> domain;
    if (const auto* ard = std::get_if<ArdLinearSystem>(&process.kind); ard && ard->clip_radius && !program.uncertainty_set)
        domain = BallSet{std::vector<double>(program.input_dim, 0.0), *ard->clip_radius};

    if (method == CertificateMethod::vc) {
        require(program.vc_dim.has_value(), "certify: the vc method needs vc_dim of the violation indicator class");
        cert.capacity = *program.vc_dim;
        cert.n_planned = plan_n_vc(epsilon, delta, *program.vc_dim);
        cert.theorem_tag = "scenario_vc_dependent";
    } else {
        cert.capacity = tau_lambda(program, domain).sum();
        cert.n_planned = plan_n_margin(epsilon, delta, program.margin, cert.capacity);
        cert.theorem_tag = "scenario_margin_dependent";
    }
    cert.n_used = cert.n_planned;

    const SequenceSample path = simulate_sequence(process, cert.n_used, seed);
    const double margin = method == CertificateMethod::margin ? program.margin : 0.0;
    const SolveResult solved = solve_margin_program(program, path.x, SolveMode::optimize, margin);
    cert.theta_hat = solved.theta;
    cert.feasible = solved.feasible;
    cert.objective = solved.objective;
    cert.max_residual = solved.max_residual;
    if (cert.feasible) {
        cert.violation_bound = method == CertificateMethod::vc
                                   ? violation_bound_vc(cert.n_used, *program.vc_dim, delta)
                                   : violation_bound_margin(cert.n_used, program.margin, cert.capacity, delta);
    }
    return cert;
}

}  // namespace depbounds
