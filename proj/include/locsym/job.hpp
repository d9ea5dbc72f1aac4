#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "locsym/asymptotics.hpp"
#include "locsym/spectrum.hpp"

namespace locsym {

struct VolumeJob {
    std::vector<BallKind> kinds{BallKind::Polyhedral, BallKind::Classical};
    std::vector<double> small_radii;
    std::vector<double> large_radii;
    double relative_tolerance = 1e-4;
};

struct GreenJob {
    std::vector<double> zetas; // empty: 0.05, 0.10, ... up to 2|rho|
};

struct HeatJob {
    std::vector<HeatBoundParams> cases; // empty: every case admissible for the estimated delta''
    std::vector<double> times{0.25, 0.5, 1, 2, 4, 8, 16, 32, 64};
    std::optional<double> D;
};

struct ProjectJob {
    std::vector<std::pair<std::string, GroupElement>> elements;
    int samples = 0;    // random words in the generators, drawn with --seed
    int max_length = 8;
};

struct JobConfig {
    GroupSpec group;
    std::vector<GroupElement> generators;
    int max_word_length = 0;
    double radii_step = 0.25;
    double window_fraction = 0.5;
    std::optional<GroupElement> x, y;
    std::vector<std::string> analyses; // resolved, canonical order
    std::size_t max_elements = 10'000'000;
    VolumeJob volume;
    GreenJob green;
    HeatJob heat;
    ProjectJob project;
    LevelSeriesOptions series;
};

struct RunOptions {
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;
    bool include_torsion = false;
    std::uint64_t seed = 0;
};

inline const std::vector<std::string> kAnalyses{"project", "orbit", "count", "exponent", "lambda0", "volume", "green", "heatbound"};

// Adds dependencies (and exponent, lambda0, which every report carries);
// returns them in canonical order. Unknown names throw ConfigError.
std::vector<std::string> resolve_analyses(const std::vector<std::string>& requested);

JobConfig parse_job_config(const nlohmann::json& j);
JobConfig load_job_config(const std::filesystem::path& path);

// Runs the job, writes report.json and the CSV tables into out_dir.
// Library errors propagate; see run_command_line for the exit-code mapping.
nlohmann::json run_job(const JobConfig& config, const RunOptions& options, std::ostream& log);

int run_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string output_tables_help();

} // namespace locsym
