#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace depbounds::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_property = 3, exit_io = 4 };

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> replications;
    std::optional<std::uint64_t> threads;
};

struct OutputFile {
    std::string name;
    std::string contents;
};

struct RunOutput {
    nlohmann::json summary;
    std::vector<OutputFile> files;  // extra CSV outputs
    int exit_code = exit_ok;        // exit_property when a validation property fails
};

// Parses, validates and executes one config. Throws ParameterError,
// IncompatibleError or UnsupportedError on a bad config.
RunOutput execute(const nlohmann::json& config, const Overrides& overrides);

// Full run: read the config, execute, write summary.json, metadata.json and any
// CSV files into out_dir. Nothing is written when the config is rejected.
int run(const std::filesystem::path& config_path, const Overrides& overrides, const std::filesystem::path& out_dir,
        std::ostream& err);

// Output directory: --out, else $DEPBOUNDS_OUT, else ./depbounds_out.
std::filesystem::path default_out_dir();

enum class PlotMode { bound_vs_n, coverage_vs_delta };

// bound_vs_n: needs columns n and bound; emits "n,bound" stably sorted by n.
// coverage_vs_delta: needs columns delta and holds; emits
// "delta,replications,holds_fraction", one row per distinct delta in increasing order.
int emit_plot_data(PlotMode mode, std::istream& in, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace depbounds::cli
