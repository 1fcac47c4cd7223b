#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "depbounds/points.hpp"
#include "depbounds/processes.hpp"

namespace depbounds {

// x -> A x + a with A of shape rows x in_dim (row-major).
struct AffineMap {
    std::size_t rows = 1;
    std::size_t in_dim = 1;
    std::vector<double> matrix;
    std::vector<double> offset;

    void apply(std::span<const double> x, std::span<double> out) const;
    bool is_constant() const;
};

// x -> <w, x> + w0
struct AffineScalar {
    std::vector<double> weights;
    double offset = 0.0;

    double operator()(std::span<const double> x) const;
};

// f_k(x, theta) = <psi_k(x), theta> + eta_k(x)
struct ConstraintPiece {
    AffineMap psi;
    AffineScalar eta;
};

struct BoxSet {
    std::vector<double> lo;
    std::vector<double> hi;
};

struct BallSet {
    std::vector<double> center;
    double radius = 1.0;
};

using ConvexSet = std::variant<BoxSet, BallSet>;

std::size_t set_dim(const ConvexSet& set);
bool set_contains(const ConvexSet& set, std::span<const double> v, double tol = 0.0);

// Pseudo-linear program: min <cost, theta> over theta in theta_set subject to
// f(x_i, theta) = max_k f_k(x_i, theta) <= -margin for every sampled scenario x_i.
struct ScenarioProgramSpec {
    std::vector<double> cost;
    std::vector<ConstraintPiece> pieces;
    ConvexSet theta_set = BoxSet{};
    double margin = 1.0;
    std::size_t input_dim = 1;
    std::optional<ConvexSet> uncertainty_set;  // X, needed when some psi_k depends on x
    std::optional<int> vc_dim;                 // VC dimension of {x -> 1{f(x,theta) > 0}}

    std::size_t param_dim() const noexcept { return cost.size(); }
    void validate() const;
    double constraint(std::span<const double> x, std::span<const double> theta) const;
    double objective(std::span<const double> theta) const;
};

struct PieceBounds {
    std::vector<double> tau;     // sup_x |psi_k(x)|
    std::vector<double> lambda;  // sup_theta |theta|
    std::vector<bool> tau_exact;
    std::string tau_method;      // "closed_form" or "triangle_upper"

    double sum() const;
};

// Suprema per piece. `domain` overrides the program's uncertainty set (e.g. a
// process clipping ball).
PieceBounds tau_lambda(const ScenarioProgramSpec& program, const std::optional<ConvexSet>& domain = std::nullopt);

std::uint64_t plan_n_vc(double epsilon, double delta, int d_vc);
std::uint64_t plan_n_margin(double epsilon, double delta, double gamma, double tau_lambda_sum);

enum class CertificateMethod { vc, margin };
std::string method_name(CertificateMethod m);

double violation_bound_vc(std::uint64_t n, int d_vc, double delta);
double violation_bound_margin(std::uint64_t n, double gamma, double tau_lambda_sum, double delta);

enum class SolveMode { optimize, feasibility };

struct SolverOptions {
    double slack_target = 1e-9;  // feasibility mode: aim for max_i f(x_i,theta) + margin <= -slack_target
    double gap_tolerance = 1e-10;
    int max_newton_steps = 2000;
};

struct SolveResult {
    std::vector<double> theta;
    bool feasible = false;        // exact check max_i f(x_i, theta) <= -margin
    double objective = 0.0;
    double max_residual = 0.0;    // max_i f(x_i, theta) + margin; best residual when infeasible
    std::string status;
};

// `margin` overrides program.margin (0 for the plain program of the VC method).
SolveResult solve_margin_program(const ScenarioProgramSpec& program, const Points& scenarios, SolveMode mode,
                                 std::optional<double> margin = std::nullopt, const SolverOptions& options = {});

struct Certificate {
    std::vector<double> theta_hat;
    std::uint64_t n_used = 0;
    std::uint64_t n_planned = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    CertificateMethod method = CertificateMethod::margin;
    std::optional<double> violation_bound;  // absent when infeasible
    bool feasible = false;
    double objective = 0.0;
    double max_residual = 0.0;
    double capacity = 0.0;  // d_vc (vc) or sum_k tau_k Lambda_k (margin)
    std::uint64_t seed = 0;
    std::string process_id;
    std::string theorem_tag;
};

Certificate certify(const ScenarioProgramSpec& program, const ProcessSpec& process, double epsilon, double delta,
                    CertificateMethod method, std::uint64_t seed);

}  // namespace depbounds
