#include "depbounds/json_io.hpp"

#include <cmath>

#include "depbounds/error.hpp"

namespace depbounds::json_io {

StrictObject::StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParameterError(path_ + ": expected an object");
}

bool StrictObject::has(const std::string& key) const { return j_.contains(key); }

const json* StrictObject::find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    read_.insert(key);
    return &*it;
}

const json& StrictObject::at(const std::string& key) {
    const json* v = find(key);
    if (!v) throw ParameterError(path(key) + ": missing");
    return *v;
}

double StrictObject::number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ParameterError(path(key) + ": expected a number");
    return v.get<double>();
}

double StrictObject::number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
}

std::uint64_t StrictObject::count(const std::string& key) {
    const json& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float()) {
        // Allow 1e5-style literals when they are whole numbers.
        const double d = v.get<double>();
        if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
    }
    throw ParameterError(path(key) + ": expected a non-negative integer");
}

std::uint64_t StrictObject::count(const std::string& key, std::uint64_t fallback) {
    return has(key) ? count(key) : fallback;
}

bool StrictObject::flag(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ParameterError(path(key) + ": expected true or false");
    return v->get<bool>();
}

std::string StrictObject::text(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ParameterError(path(key) + ": expected a string");
    return v.get<std::string>();
}

std::string StrictObject::text(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : fallback;
}

std::vector<double> StrictObject::numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) throw ParameterError(path(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ParameterError(path(key) + ": expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

StrictObject StrictObject::child(const std::string& key) { return StrictObject(at(key), path(key)); }

void StrictObject::finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
        if (!read_.count(it.key())) throw ParameterError(path(it.key()) + ": unknown field");
}

ProcessSpec parse_process(const json& j, const std::string& path) {
    StrictObject o(j, path);
    const std::string kind = o.text("kind");
    ProcessSpec spec{Ar1Threshold{}};
    if (kind == "ar1_threshold") {
        spec.kind = Ar1Threshold{o.number("a"), o.number("sigma", 1.0), o.number("b_star", 0.0), o.number("flip_p", 0.0)};
    } else if (kind == "ar_d_linear_system") {
        ArdLinearSystem s{o.numbers("coefficients"), o.number("sigma", 1.0), std::nullopt};
        if (o.has("clip_radius")) s.clip_radius = o.number("clip_radius");
        spec.kind = s;
    } else if (kind == "markov_binary") {
        spec.kind = MarkovBinary{o.number("rho")};
    } else if (kind == "iid_baseline") {
        IidBaseline b;
        const std::string dist = o.text("distribution", "normal");
        if (dist == "normal") {
            b.distribution = IidBaseline::Distribution::normal;
            b.p1 = o.number("mean", 0.0);
            b.p2 = o.number("sd", 1.0);
        } else if (dist == "uniform") {
            b.distribution = IidBaseline::Distribution::uniform;
            b.p1 = o.number("lo", 0.0);
            b.p2 = o.number("hi", 1.0);
        } else {
            throw ParameterError(o.path("distribution") + ": expected normal or uniform");
        }
        b.b_star = o.number("b_star", 0.0);
        b.flip_p = o.number("flip_p", 0.0);
        spec.kind = b;
    } else {
        throw ParameterError(o.path("kind") + ": unknown process kind '" + kind + "'");
    }
    o.finish();
    spec.validate();
    return spec;
}

FunctionClass parse_class(const json& j, const std::string& path) {
    StrictObject o(j, path);
    const std::string kind = o.text("kind");
    auto result = [&]() -> FunctionClass {
        if (kind == "threshold1d") return FunctionClass::threshold1d();
        if (kind == "finite") {
            std::vector<std::vector<double>> values;
            const json& v = o.at("values");
            if (!v.is_array()) throw ParameterError(o.path("values") + ": expected an array of rows");
            for (const auto& row : v) {
                if (!row.is_array()) throw ParameterError(o.path("values") + ": expected an array of rows");
                std::vector<double> r;
                for (const auto& e : row) {
                    if (!e.is_number()) throw ParameterError(o.path("values") + ": expected numbers");
                    r.push_back(e.get<double>());
                }
                values.push_back(std::move(r));
            }
            return FunctionClass::finite(o.numbers("grid"), std::move(values));
        }
        if (kind == "linear_ball")
            return FunctionClass::linear_ball(o.count("dim"), o.number("radius"), o.flag("with_offset", false));
        if (kind == "kernel_ball") {
            KernelSpec k;
            const std::string name = o.text("kernel", "gaussian");
            if (name == "gaussian") {
                k.kind = KernelSpec::Kind::gaussian;
                k.bandwidth = o.number("bandwidth", 1.0);
            } else if (name == "linear") {
                k.kind = KernelSpec::Kind::linear;
            } else {
                throw ParameterError(o.path("kernel") + ": expected gaussian or linear");
            }
            return FunctionClass::kernel_ball(k, o.number("radius"));
        }
        if (kind == "codebook") return FunctionClass::codebook(o.count("codepoints"), o.count("dim"), o.number("radius"));
        throw ParameterError(o.path("kind") + ": unknown class kind '" + kind + "'");
    }();
    o.finish();
    return result;
}

ConvexSet parse_set(const json& j, const std::string& path) {
    StrictObject o(j, path);
    ConvexSet set = BoxSet{};
    if (o.has("box") == o.has("ball")) throw ParameterError(path + ": expected exactly one of box or ball");
    if (o.has("box")) {
        auto b = o.child("box");
        set = BoxSet{b.numbers("lo"), b.numbers("hi")};
        b.finish();
    } else {
        auto b = o.child("ball");
        set = BallSet{b.numbers("center"), b.number("radius")};
        b.finish();
    }
    o.finish();
    return set;
}

ScenarioProgramSpec parse_program(const json& j, const std::string& path) {
    StrictObject o(j, path);
    ScenarioProgramSpec p;
    p.cost = o.numbers("cost");
    p.input_dim = o.count("input_dim", 1);
    const json& pieces = o.at("pieces");
    if (!pieces.is_array()) throw ParameterError(o.path("pieces") + ": expected an array");
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        StrictObject po(pieces[k], o.path("pieces") + "[" + std::to_string(k) + "]");
        auto psi = po.child("psi");
        AffineMap map;
        map.rows = p.cost.size();
        map.in_dim = p.input_dim;
        map.matrix = psi.has("matrix") ? psi.numbers("matrix") : std::vector<double>(map.rows * map.in_dim, 0.0);
        if (psi.has("offset")) map.offset = psi.numbers("offset");
        psi.finish();
        auto eta = po.child("eta");
        AffineScalar e{eta.has("weights") ? eta.numbers("weights") : std::vector<double>{}, eta.number("offset", 0.0)};
        eta.finish();
        po.finish();
        p.pieces.push_back({std::move(map), std::move(e)});
    }
    p.theta_set = parse_set(o.at("theta_set"), o.path("theta_set"));
    p.margin = o.number("margin", 1.0);
    if (o.has("uncertainty_set")) p.uncertainty_set = parse_set(o.at("uncertainty_set"), o.path("uncertainty_set"));
    if (o.has("vc_dim")) p.vc_dim = static_cast<int>(o.count("vc_dim"));
    o.finish();
    p.validate();
    return p;
}

CertificateMethod parse_method(const std::string& name) {
    if (name == "vc") return CertificateMethod::vc;
    if (name == "margin") return CertificateMethod::margin;
    throw ParameterError("method: expected vc or margin, got '" + name + "'");
}

Points parse_points(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ParameterError(path + ": expected a non-empty array of points");
    const bool scalar = j.front().is_number();
    const std::size_t dim = scalar ? 1 : j.front().size();
    if (dim == 0) throw ParameterError(path + ": empty point");
    std::vector<double> flat;
    for (const auto& p : j) {
        if (scalar) {
            if (!p.is_number()) throw ParameterError(path + ": mixed scalar and vector points");
            flat.push_back(p.get<double>());
            continue;
        }
        if (!p.is_array() || p.size() != dim) throw ParameterError(path + ": points must share one dimension");
        for (const auto& e : p) {
            if (!e.is_number()) throw ParameterError(path + ": expected numbers");
            flat.push_back(e.get<double>());
        }
    }
    return Points(dim, std::move(flat));
}

json to_json(const ProcessSpec& p) {
    return std::visit(
        [&](const auto& k) -> json {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Ar1Threshold>) {
                return {{"kind", "ar1_threshold"}, {"a", k.a}, {"sigma", k.sigma}, {"b_star", k.b_star}, {"flip_p", k.flip_p}};
            } else if constexpr (std::is_same_v<T, ArdLinearSystem>) {
                json out{{"kind", "ar_d_linear_system"}, {"coefficients", k.coefficients}, {"sigma", k.sigma}};
                if (k.clip_radius) out["clip_radius"] = *k.clip_radius;
                return out;
            } else if constexpr (std::is_same_v<T, MarkovBinary>) {
                return {{"kind", "markov_binary"}, {"rho", k.rho}};
            } else {
                json out{{"kind", "iid_baseline"}, {"b_star", k.b_star}, {"flip_p", k.flip_p}};
                if (k.distribution == IidBaseline::Distribution::normal) {
                    out["distribution"] = "normal";
                    out["mean"] = k.p1;
                    out["sd"] = k.p2;
                } else {
                    out["distribution"] = "uniform";
                    out["lo"] = k.p1;
                    out["hi"] = k.p2;
                }
                return out;
            }
        },
        p.kind);
}

json to_json(const FunctionClass& c) {
    json out = std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FiniteFunctions>) return {{"kind", "finite"}, {"grid", s.grid}, {"values", s.values}};
            else if constexpr (std::is_same_v<T, Threshold1d>) return {{"kind", "threshold1d"}};
            else if constexpr (std::is_same_v<T, LinearBall>)
                return {{"kind", "linear_ball"}, {"dim", s.dim}, {"radius", s.radius}, {"with_offset", s.with_offset}};
            else if constexpr (std::is_same_v<T, KernelBall>) {
                json k{{"kind", "kernel_ball"}, {"radius", s.radius}};
                if (s.kernel.kind == KernelSpec::Kind::gaussian) {
                    k["kernel"] = "gaussian";
                    k["bandwidth"] = s.kernel.bandwidth;
                } else {
                    k["kernel"] = "linear";
                }
                return k;
            } else
                return {{"kind", "codebook"}, {"codepoints", s.codepoints}, {"dim", s.dim}, {"radius", s.radius}};
        },
        c.shape());
    if (c.vc_dim()) out["vc_dim"] = *c.vc_dim();
    return out;
}

json to_json(const ConvexSet& s) {
    if (const auto* b = std::get_if<BoxSet>(&s)) return {{"box", {{"lo", b->lo}, {"hi", b->hi}}}};
    const auto& ball = std::get<BallSet>(s);
    return {{"ball", {{"center", ball.center}, {"radius", ball.radius}}}};
}

json to_json(const ScenarioProgramSpec& p) {
    json pieces = json::array();
    for (const auto& k : p.pieces)
        pieces.push_back({{"psi", {{"matrix", k.psi.matrix}, {"offset", k.psi.offset}}},
                          {"eta", {{"weights", k.eta.weights}, {"offset", k.eta.offset}}}});
    json out{{"cost", p.cost}, {"pieces", pieces}, {"theta_set", to_json(p.theta_set)},
             {"margin", p.margin}, {"input_dim", p.input_dim}};
    if (p.uncertainty_set) out["uncertainty_set"] = to_json(*p.uncertainty_set);
    if (p.vc_dim) out["vc_dim"] = *p.vc_dim;
    return out;
}

json to_json(const RiskBoundReport& r) {
    return {{"bound_value", r.bound_value},
            {"empirical_risk_term", r.empirical_risk_term},
            {"complexity_term", r.complexity_term},
            {"concentration_term", r.concentration_term},
            {"slack", r.slack()},
            {"delta", r.delta},
            {"n", r.n},
            {"theorem_tag", r.theorem_tag}};
}

json to_json(const MonteCarloEstimate& e) {
    return {{"value", e.value}, {"std_error", e.std_error}, {"replications", e.replications}, {"seed", e.seed}};
}

json to_json(const Certificate& c) {
    json out{{"theta_hat", c.theta_hat},
             {"n_used", c.n_used},
             {"n_planned", c.n_planned},
             {"epsilon", c.epsilon},
             {"delta", c.delta},
             {"method", method_name(c.method)},
             {"feasible", c.feasible},
             {"objective", c.objective},
             {"max_residual", c.max_residual},
             {"capacity", c.capacity},
             {"seed", c.seed},
             {"process_id", c.process_id},
             {"theorem_tag", c.theorem_tag}};
    out["violation_bound"] = c.violation_bound ? json(*c.violation_bound) : json(nullptr);
    return out;
}

json to_json(const PieceBounds& b) {
    std::vector<bool> exact(b.tau_exact.begin(), b.tau_exact.end());
    return {{"tau", b.tau}, {"lambda", b.lambda}, {"tau_exact", exact}, {"tau_method", b.tau_method}, {"sum", b.sum()}};
}

json to_json(const experiments::Result& r) {
    json summary = json::object();
    for (const auto& [k, v] : r.summary) summary[k] = v;
    return {{"experiment", r.name},
            {"replications", r.records.size()},
            {"holds_fraction", r.holds_fraction},
            {"required_fraction", r.required_fraction},
            {"passed", r.passed},
            {"summary", summary}};
}

}  // namespace depbounds::json_io
