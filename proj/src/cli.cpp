#include "depbounds/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "depbounds/bounds.hpp"
#include "depbounds/error.hpp"
#include "depbounds/estimators.hpp"
#include "depbounds/experiments.hpp"
#include "depbounds/json_io.hpp"
#include "depbounds/processes.hpp"
#include "depbounds/scenario.hpp"

namespace depbounds::cli {
namespace {

using json = nlohmann::json;
using json_io::StrictObject;
using json_io::to_json;

constexpr const char* kVersion = "0.1.0";

struct Common {
    std::uint64_t seed = 1;
    std::uint64_t replications = 200;
    std::size_t threads = 0;
};

Capacity parse_capacity(StrictObject& o) {
    if (o.has("d_vc") == o.has("growth_at_2n")) throw ParameterError("config: give exactly one of d_vc or growth_at_2n");
    if (o.has("d_vc")) return Capacity::vc(static_cast<int>(o.count("d_vc")));
    return Capacity::growth_at_2n(o.number("growth_at_2n"));
}

std::vector<std::uint64_t> parse_n_values(StrictObject& o) {
    if (o.has("n") == o.has("n_values")) throw ParameterError("config: give exactly one of n or n_values");
    if (o.has("n")) return {o.count("n")};
    std::vector<std::uint64_t> out;
    const json& v = o.at("n_values");
    if (!v.is_array() || v.empty()) throw ParameterError("config.n_values: expected a non-empty array");
    for (const auto& e : v) {
        if (!e.is_number() || e.get<double>() < 1.0 || std::floor(e.get<double>()) != e.get<double>())
            throw ParameterError("config.n_values: expected positive integers");
        out.push_back(static_cast<std::uint64_t>(e.get<double>()));
    }
    return out;
}

RadFamily parse_family(const std::string& s) {
    if (s == "linear") return RadFamily::linear;
    if (s == "kernel_gaussian") return RadFamily::kernel_gaussian;
    if (s == "margin_linear") return RadFamily::margin_linear;
    if (s == "vq") return RadFamily::vq;
    throw ParameterError("config.family: unknown family '" + s + "'");
}

MomentInput::Kind parse_moment(const std::string& s) {
    if (s == "sum_sq_norm") return MomentInput::Kind::sum_sq_norm;
    if (s == "sup_norm") return MomentInput::Kind::sup_norm;
    if (s == "sum_kernel_diag") return MomentInput::Kind::sum_kernel_diag;
    throw ParameterError("config.moment_kind: unknown moment kind '" + s + "'");
}

RademacherVariant parse_variant(const std::string& s) {
    if (s == "two_sided") return RademacherVariant::two_sided;
    if (s == "worst_case") return RademacherVariant::worst_case;
    if (s == "marginal") return RademacherVariant::marginal;
    throw ParameterError("config.variant: unknown variant '" + s + "'");
}

std::string sweep_csv(const std::vector<RiskBoundReport>& reports) {
    std::ostringstream out;
    out.precision(17);
    out << "n,bound,delta,theorem_tag\n";
    for (const auto& r : reports) out << r.n << ',' << r.bound_value << ',' << r.delta << ',' << r.theorem_tag << '\n';
    return out.str();
}

RunOutput run_bound(StrictObject& o, json& resolved) {
    const std::string kind = o.text("kind");
    RunOutput out;
    json result;
    std::vector<RiskBoundReport> reports;
    if (kind == "vc" || kind == "vc_relative" || kind == "regression_vc") {
        const double emp = o.number("emp_risk", 0.0);
        const double delta = o.number("delta");
        const auto ns = parse_n_values(o);
        resolved["emp_risk"] = emp;
        if (kind == "regression_vc") {
            int d_ind = 0;
            if (o.has("input_dim") == o.has("d_vc_induced"))
                throw ParameterError("config: give exactly one of input_dim or d_vc_induced");
            if (o.has("input_dim")) d_ind = induced_regression_vc_dim(static_cast<int>(o.count("input_dim")));
            else d_ind = static_cast<int>(o.count("d_vc_induced"));
            const double range_b = o.number("range_b");
            resolved["d_vc_induced"] = d_ind;
            for (auto n : ns) reports.push_back(regression_vc_bound(emp, n, d_ind, delta, range_b));
        } else {
            const Capacity cap = parse_capacity(o);
            const bool stationary = kind == "vc_relative" ? o.flag("stationary", true) : true;
            if (kind == "vc_relative") resolved["stationary"] = stationary;
            for (auto n : ns)
                reports.push_back(kind == "vc" ? vc_bound(emp, n, cap, delta)
                                               : vc_relative_bound(emp, n, cap, delta, stationary));
        }
    } else if (kind == "rademacher") {
        const auto variant = parse_variant(o.text("variant"));
        const auto terms = o.numbers("rad_terms");
        reports.push_back(rademacher_risk_bound(variant, o.number("emp_risk", 0.0), terms, o.number("range_b", 1.0),
                                                o.count("n"), o.number("delta")));
    } else if (kind == "mixing_reference") {
        const auto r = mixing_reference_bound(o.number("emp_risk", 0.0), o.number("rad_mu"), o.number("range_b", 1.0),
                                              o.count("mu"), o.count("a"), o.number("beta_a"), o.number("delta"));
        result["applicable"] = r.has_value();
        result["theorem_tag"] = "mixing_reference_beta";
        if (r) reports.push_back(*r);
    } else if (kind == "class_rad") {
        RadFamilyParams p;
        if (o.has("clip_m")) p.clip_m = o.number("clip_m");
        if (o.has("radius")) p.radius = o.number("radius");
        if (o.has("gamma")) p.gamma = o.number("gamma");
        if (o.has("codepoints")) p.codepoints = o.count("codepoints");
        const auto family = parse_family(o.text("family"));
        const MomentInput m{parse_moment(o.text("moment_kind")), o.number("moment_value")};
        result["rad_upper"] = class_rad_upper(family, p, m, o.count("n"));
    } else if (kind == "chaining") {
        const std::uint64_t n = o.count("n");
        const double lipschitz = o.number("lipschitz", 1.0);
        auto lc = o.child("log_covering");
        const std::string lk = lc.text("kind");
        LogCovering cover;
        std::optional<PseudoMetricSample> sample;
        double diameter = 0.0;
        if (lk == "spectral") {
            cover = spectral_log_covering(lc.number("a"), lc.number("sum_sq_norms"));
            diameter = o.number("diameter");
        } else if (lk == "greedy") {
            const auto cls = json_io::parse_class(lc.at("class"), lc.path("class"));
            const auto* f = cls.as<FiniteFunctions>();
            if (!f) throw ParameterError("config.log_covering.class: greedy covering needs a finite class");
            sample.emplace(PseudoMetricSample::from_finite(*f, lc.numbers("points")));
            cover = greedy_log_covering(*sample);
            diameter = o.number("diameter", sample->diameter());
        } else {
            throw ParameterError(lc.path("kind") + ": expected spectral or greedy");
        }
        lc.finish();
        resolved["diameter"] = diameter;
        resolved["lipschitz"] = lipschitz;
        if (o.has("depth")) {
            const int depth = static_cast<int>(o.count("depth"));
            result["rad_upper"] = chaining_rad_upper(diameter, depth, cover, n, lipschitz);
            result["depth"] = depth;
        } else {
            const auto best = chaining_rad_upper_best(diameter, cover, n, lipschitz);
            result["rad_upper"] = best.value;
            result["depth"] = best.depth;
        }
    } else {
        throw ParameterError("config.kind: unknown bound kind '" + kind + "'");
    }
    o.finish();
    if (!reports.empty()) {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        result["reports"] = arr;
    }
    if (reports.size() > 1) out.files.push_back({"bound_vs_n.csv", sweep_csv(reports)});
    out.summary["result"] = result;
    return out;
}

RunOutput run_plan(StrictObject& o, json& resolved) {
    const auto method = json_io::parse_method(o.text("method"));
    const double eps = o.number("epsilon");
    const double delta = o.number("delta");
    json result{{"method", method_name(method)}};
    if (method == CertificateMethod::vc) {
        int d = 0;
        if (o.has("program")) {
            const auto program = json_io::parse_program(o.at("program"));
            if (!program.vc_dim) throw ParameterError("config.program: the vc method needs program.vc_dim");
            d = *program.vc_dim;
        } else {
            d = static_cast<int>(o.count("d_vc"));
        }
        const auto n = plan_n_vc(eps, delta, d);
        resolved["d_vc"] = d;
        result["n"] = n;
        result["violation_bound_at_n"] = violation_bound_vc(n, d, delta);
        result["theorem_tag"] = "scenario_vc_dependent";
    } else {
        double gamma = 0.0;
        double sum = 0.0;
        if (o.has("program")) {
            const auto program = json_io::parse_program(o.at("program"));
            std::optional<ConvexSet> domain;
            if (o.has("domain")) domain = json_io::parse_set(o.at("domain"), "config.domain");
            const auto tl = tau_lambda(program, domain);
            gamma = o.number("gamma", program.margin);
            sum = tl.sum();
            result["tau_lambda"] = to_json(tl);
        } else {
            gamma = o.number("gamma");
            sum = o.number("tau_lambda_sum");
        }
        const auto n = plan_n_margin(eps, delta, gamma, sum);
        resolved["gamma"] = gamma;
        resolved["tau_lambda_sum"] = sum;
        result["n"] = n;
        result["violation_bound_at_n"] = violation_bound_margin(n, gamma, sum, delta);
        result["theorem_tag"] = "scenario_margin_dependent";
    }
    o.finish();
    RunOutput out;
    out.summary["result"] = result;
    return out;
}

RunOutput run_simulate(StrictObject& o, json& resolved, const Common& c) {
    const auto process = json_io::parse_process(o.at("process"));
    const auto n = o.count("n");
    require(n >= 1, "config.n: must be >= 1");
    o.finish();
    resolved["process"] = to_json(process);
    const auto sample = simulate_sequence(process, n, stream_seed(c.seed, 0, StreamRole::path));
    std::ostringstream csv;
    write_sequence_csv(sample, csv);
    RunOutput out;
    out.summary["result"] = {{"process_id", sample.process_id}, {"n", n}, {"path_seed", sample.seed},
                             {"file", "sequence.csv"}};
    out.files.push_back({"sequence.csv", csv.str()});
    return out;
}

RunOutput run_rad(StrictObject& o, json& resolved, const Common& c) {
    const auto cls = json_io::parse_class(o.at("class"));
    Points points(1, {});
    if (o.has("points") == o.has("process")) throw ParameterError("config: give exactly one of points or process");
    if (o.has("points")) {
        points = json_io::parse_points(o.at("points"), "config.points");
    } else {
        const auto process = json_io::parse_process(o.at("process"));
        points = simulate_sequence(process, o.count("n"), stream_seed(c.seed, 0, StreamRole::path)).x;
        resolved["process"] = to_json(process);
    }
    const bool exact = o.flag("exact", false);
    o.finish();
    resolved["class"] = to_json(cls);
    resolved["exact"] = exact;
    json result{{"class", cls.kind_name()}, {"n", points.size()}};
    result["estimate"] = to_json(empirical_rademacher(cls, points, c.replications, c.seed));
    if (exact) result["exact_value"] = exact_empirical_rademacher(cls, points);
    RunOutput out;
    out.summary["result"] = result;
    return out;
}

RunOutput run_validate(StrictObject& o, json& resolved, const Common& c) {
    const std::string name = o.text("experiment");
    std::vector<double> deltas;
    const bool sweep = o.has("delta_values");
    if (sweep && o.has("delta")) throw ParameterError("config: give delta or delta_values, not both");
    if (sweep) deltas = o.numbers("delta_values");
    else deltas = {o.number("delta", name == "scenario_coverage" ? 0.1 : 0.05)};
    if (deltas.empty()) throw ParameterError("config.delta_values: empty");

    experiments::CoverageSetup base;
    base.seed = c.seed;
    base.replications = c.replications;
    base.threads = c.threads;
    std::function<experiments::Result(double)> runner;

    if (name == "vc_coverage" || name == "relative_coverage" || name == "margin_coverage" ||
        name == "regression_coverage" || name == "symmetrization") {
        if (name == "regression_coverage") base.process = experiments::RegressionSetup{}.base.process;
        if (name == "symmetrization") base.n = 200;
        if (o.has("process")) base.process = json_io::parse_process(o.at("process"));
        base.n = o.count("n", base.n);
        resolved["process"] = to_json(base.process);
        resolved["n"] = base.n;
        if (name == "vc_coverage") {
            runner = [base](double d) { auto s = base; s.delta = d; return experiments::vc_coverage(s); };
        } else if (name == "relative_coverage") {
            runner = [base](double d) { auto s = base; s.delta = d; return experiments::relative_coverage(s); };
        } else if (name == "margin_coverage") {
            experiments::MarginSetup m;
            m.base = base;
            m.gamma = o.number("gamma", m.gamma);
            m.radius = o.number("radius", m.radius);
            m.weight_grid = o.count("weight_grid", m.weight_grid);
            resolved["gamma"] = m.gamma;
            resolved["radius"] = m.radius;
            resolved["weight_grid"] = m.weight_grid;
            runner = [m](double d) { auto s = m; s.base.delta = d; return experiments::margin_rademacher_coverage(s); };
        } else if (name == "regression_coverage") {
            experiments::RegressionSetup g;
            g.base = base;
            g.clip_m = o.number("clip_m", g.clip_m);
            g.weight_box = o.number("weight_box", g.weight_box);
            g.grid_per_dim = o.count("grid_per_dim", g.grid_per_dim);
            g.risk_draws = o.count("risk_draws", g.risk_draws);
            resolved["clip_m"] = g.clip_m;
            resolved["weight_box"] = g.weight_box;
            resolved["grid_per_dim"] = g.grid_per_dim;
            resolved["risk_draws"] = g.risk_draws;
            runner = [g](double d) { auto s = g; s.base.delta = d; return experiments::regression_coverage(s); };
        } else {
            experiments::SymmetrizationSetup y;
            y.base = base;
            y.epsilon = o.number("epsilon", y.epsilon);
            resolved["epsilon"] = y.epsilon;
            runner = [y](double d) { auto s = y; s.base.delta = d; return experiments::symmetrization(s); };
        }
    } else if (name == "scenario_coverage") {
        experiments::ScenarioSetup s;
        s.program = o.has("program") ? json_io::parse_program(o.at("program"))
                                     : experiments::one_dimensional_margin_program(2.0, -8.0, 8.0);
        if (o.has("process")) s.process = json_io::parse_process(o.at("process"));
        s.epsilon = o.number("epsilon", s.epsilon);
        s.method = json_io::parse_method(o.text("method", "margin"));
        s.marginal_draws = o.count("marginal_draws", s.marginal_draws);
        s.replications = c.replications;
        s.seed = c.seed;
        s.threads = c.threads;
        resolved["program"] = to_json(s.program);
        resolved["process"] = to_json(s.process);
        resolved["epsilon"] = s.epsilon;
        resolved["method"] = method_name(s.method);
        resolved["marginal_draws"] = s.marginal_draws;
        runner = [s](double d) { auto t = s; t.delta = d; return experiments::scenario_coverage(t); };
    } else {
        throw ParameterError("config.experiment: unknown experiment '" + name + "'");
    }
    o.finish();
    if (sweep) resolved["delta_values"] = deltas;
    else resolved["delta"] = deltas.front();

    RunOutput out;
    json results = json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "replication,seed,statistic,bound,holds" << (sweep ? ",delta" : "") << '\n';
    bool all_passed = true;
    for (double d : deltas) {
        const auto r = runner(d);
        json j = to_json(r);
        j["delta"] = d;
        results.push_back(j);
        all_passed = all_passed && r.passed;
        for (const auto& rec : r.records) {
            csv << rec.replication << ',' << rec.seed << ',' << rec.statistic << ',' << rec.bound << ','
                << (rec.holds ? 1 : 0);
            if (sweep) csv << ',' << d;
            csv << '\n';
        }
    }
    out.summary["result"] = {{"experiment", name}, {"runs", results}, {"passed", all_passed},
                             {"records_file", "replications.csv"}};
    out.files.push_back({"replications.csv", csv.str()});
    out.exit_code = all_passed ? exit_ok : exit_property;
    return out;
}

RunOutput run_scenario(StrictObject& o, json& resolved, const Common& c) {
    const auto program = json_io::parse_program(o.at("program"));
    const auto process = json_io::parse_process(o.at("process"));
    const auto method = json_io::parse_method(o.text("method", "margin"));
    const double eps = o.number("epsilon");
    const double delta = o.number("delta");
    o.finish();
    resolved["program"] = to_json(program);
    resolved["process"] = to_json(process);
    resolved["method"] = method_name(method);
    const auto cert = certify(program, process, eps, delta, method, c.seed);
    RunOutput out;
    out.summary["result"] = {{"certificate", to_json(cert)}};
    return out;
}

// Reported values carry 6 significant digits.
void round_reported(json& j) {
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::isfinite(v)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6g", v);
            j = std::strtod(buf, nullptr);
        }
    } else if (j.is_structured()) {
        for (auto& e : j) round_reported(e);
    }
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::optional<double> to_number(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

RunOutput execute(const json& config, const Overrides& overrides) {
    StrictObject o(config, "config");
    const std::string command = o.text("command");
    Common c;
    c.seed = overrides.seed.value_or(o.count("seed", c.seed));
    c.replications = overrides.replications.value_or(o.count("replications", c.replications));
    c.threads = static_cast<std::size_t>(overrides.threads.value_or(o.count("threads", c.threads)));
    require(c.replications >= 1, "config.replications: must be >= 1");

    json resolved = config;
    resolved["seed"] = c.seed;
    if (command == "validate" || command == "rad") resolved["replications"] = c.replications;
    resolved["threads"] = c.threads;

    RunOutput out;
    if (command == "bound") out = run_bound(o, resolved);
    else if (command == "plan") out = run_plan(o, resolved);
    else if (command == "simulate") out = run_simulate(o, resolved, c);
    else if (command == "rad") out = run_rad(o, resolved, c);
    else if (command == "validate") out = run_validate(o, resolved, c);
    else if (command == "scenario") out = run_scenario(o, resolved, c);
    else throw ParameterError("config.command: unknown command '" + command + "'");

    round_reported(out.summary["result"]);
    out.summary["command"] = command;
    out.summary["seed"] = c.seed;
    out.summary["config"] = resolved;
    out.summary["version"] = kVersion;
    return out;
}

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("DEPBOUNDS_OUT"); env && *env) return env;
    return "depbounds_out";
}

int run(const std::filesystem::path& config_path, const Overrides& overrides, const std::filesystem::path& out_dir,
        std::ostream& err) {
    const std::string started = utc_now();
    std::ifstream in(config_path);
    if (!in) {
        err << "error: cannot read config " << config_path << '\n';
        return exit_io;
    }
    RunOutput out;
    try {
        const json config = json::parse(in);
        out = execute(config, overrides);
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const ParameterError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const IncompatibleError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const UnsupportedError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        std::filesystem::create_directories(out_dir);
        auto write = [&](const std::string& name, const std::string& contents) {
            std::ofstream f(out_dir / name, std::ios::binary);
            f << contents;
            f.close();
            if (!f) throw std::runtime_error("failed to write " + (out_dir / name).string());
        };
        write("summary.json", out.summary.dump(2) + "\n");
        for (const auto& file : out.files) write(file.name, file.contents);
        const json meta{{"started_at", started}, {"finished_at", utc_now()}, {"version", kVersion},
                        {"config_path", config_path.string()}};
        write("metadata.json", meta.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "io error: " << e.what() << '\n';
        return exit_io;
    }
    if (out.exit_code == exit_property) err << "validation property failed; see summary.json\n";
    return out.exit_code;
}

int emit_plot_data(PlotMode mode, std::istream& in, std::ostream& sink, std::ostream& err) {
    std::ostringstream out;
    const bool bound = mode == PlotMode::bound_vs_n;
    std::string header;
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            header = line;
            first = false;
        } else {
            rows.push_back(split(line));
        }
    }
    out.precision(17);
    out << (bound ? "n,bound\n" : "delta,replications,holds_fraction\n");
    if (first) {
        sink << out.str();
        return exit_ok;
    }

    const auto cols = split(header);
    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(cols.begin(), cols.end(), name);
        if (it == cols.end()) return std::nullopt;
        return static_cast<std::size_t>(it - cols.begin());
    };
    const auto key = column(bound ? "n" : "delta");
    const auto val = column(bound ? "bound" : "holds");
    if (!key || !val) {
        err << "malformed records: missing column " << (bound ? "n or bound" : "delta or holds") << '\n';
        return exit_config;
    }
    std::vector<std::pair<double, double>> parsed;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != cols.size()) {
            err << "malformed records: row " << i + 1 << " has " << r.size() << " fields, expected " << cols.size()
                << '\n';
            return exit_config;
        }
        const auto k = to_number(r[*key]);
        const auto v = to_number(r[*val]);
        if (!k || !v || (!bound && *v != 0.0 && *v != 1.0)) {
            err << "malformed records: row " << i + 1 << " has a bad value\n";
            return exit_config;
        }
        parsed.emplace_back(*k, *v);
    }
    std::stable_sort(parsed.begin(), parsed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    if (bound) {
        for (const auto& [n, b] : parsed) out << static_cast<std::uint64_t>(n) << ',' << b << '\n';
        sink << out.str();
        return exit_ok;
    }
    std::size_t i = 0;
    while (i < parsed.size()) {
        const double d = parsed[i].first;
        double held = 0.0;
        std::size_t count = 0;
        for (; i < parsed.size() && parsed[i].first == d; ++i, ++count) held += parsed[i].second;
        out << d << ',' << count << ',' << held / static_cast<double>(count) << '\n';
    }
    sink << out.str();
    return exit_ok;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Uniform risk bounds and scenario sample sizes for dependent data"};
    app.set_version_flag("--version", kVersion);
    std::string config;
    std::string out_dir;
    Overrides ov;
    app.add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", ov.seed, "experiment seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory (default $DEPBOUNDS_OUT or ./depbounds_out)");
    app.add_option("--replications", ov.replications, "replications / sign draws (overrides the config)");
    app.add_option("--threads", ov.threads, "worker threads, 0 = all cores (overrides the config)");

    auto* plot = app.add_subcommand("plot-data", "turn per-replication CSV records into plot-ready CSV");
    std::string mode = "bound_vs_n";
    std::string input;
    std::string output;
    plot->add_option("--mode", mode, "bound_vs_n or coverage_vs_delta")
        ->check(CLI::IsMember({"bound_vs_n", "coverage_vs_delta"}));
    plot->add_option("--input", input, "records CSV")->required();
    plot->add_option("--output", output, "plot CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    if (plot->parsed()) {
        std::ifstream in(input);
        if (!in) {
            std::cerr << "error: cannot read " << input << '\n';
            return exit_io;
        }
        const auto m = mode == "bound_vs_n" ? PlotMode::bound_vs_n : PlotMode::coverage_vs_delta;
        if (output.empty()) return emit_plot_data(m, in, std::cout, std::cerr);
        std::ostringstream buf;
        const int code = emit_plot_data(m, in, buf, std::cerr);
        if (code != exit_ok) return code;
        std::ofstream f(output, std::ios::binary);
        f << buf.str();
        f.close();
        if (!f) {
            std::cerr << "error: cannot write " << output << '\n';
            return exit_io;
        }
        return exit_ok;
    }
    if (config.empty()) {
        std::cerr << "error: --config is required\n" << app.help();
        return exit_config;
    }
    return run(config, ov, out_dir.empty() ? default_out_dir() : std::filesystem::path(out_dir), std::cerr);
}

}  // namespace depbounds::cli
