#pragma once

#include <set>
#include <string>

#include "json.hpp"

#include "depbounds/bounds.hpp"
#include "depbounds/classes.hpp"
#include "depbounds/estimators.hpp"
#include "depbounds/experiments.hpp"
#include "depbounds/processes.hpp"
#include "depbounds/scenario.hpp"

namespace depbounds::json_io {

using nlohmann::json;

// Reads an object and refuses keys that were never asked for.
class StrictObject {
public:
    StrictObject(const json& j, std::string path);

    bool has(const std::string& key) const;
    const json& at(const std::string& key);
    const json* find(const std::string& key);
    double number(const std::string& key);
    double number(const std::string& key, double fallback);
    std::uint64_t count(const std::string& key);
    std::uint64_t count(const std::string& key, std::uint64_t fallback);
    bool flag(const std::string& key, bool fallback);
    std::string text(const std::string& key);
    std::string text(const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& key);
    StrictObject child(const std::string& key);
    std::string path(const std::string& key) const { return path_ + "." + key; }
    // Throws ParameterError naming the first unread key.
    void finish() const;

private:
    const json& j_;
    std::string path_;
    std::set<std::string> read_;
};

ProcessSpec parse_process(const json& j, const std::string& path = "process");
FunctionClass parse_class(const json& j, const std::string& path = "class");
ConvexSet parse_set(const json& j, const std::string& path);
ScenarioProgramSpec parse_program(const json& j, const std::string& path = "program");
CertificateMethod parse_method(const std::string& name);
Points parse_points(const json& j, const std::string& path);

json to_json(const ProcessSpec& p);
json to_json(const FunctionClass& c);
json to_json(const ConvexSet& s);
json to_json(const ScenarioProgramSpec& p);
json to_json(const RiskBoundReport& r);
json to_json(const MonteCarloEstimate& e);
json to_json(const Certificate& c);
json to_json(const PieceBounds& b);
json to_json(const experiments::Result& r);

}  // namespace depbounds::json_io
