#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ratdense {

enum class JobMode { density, sequential, combinatorial, monoid };

/// Batch job read from an INI-style file:
///
///   [job]       mode, N, checkpoints, tolerance, output
///   [language]  regex + alphabet, or shift (the language of a shift spec file)
///   [measure]   spec (density, monoid)
///   [sequence]  spec (sequential)
///   [shift]     file (combinatorial)
///
/// Relative paths are resolved against the directory of the job file.
struct JobSpec {
    JobMode mode = JobMode::density;
    std::size_t n = 1000;
    std::vector<std::size_t> checkpoints;
    double tolerance = 1e-3;
    std::string output;
    std::string regex;
    std::string alphabet;
    std::filesystem::path language_shift;
    std::string measure;
    std::string sequence;
    std::filesystem::path shift;
    std::filesystem::path base_dir = ".";
};

/// Throws JobSpecError.
JobSpec parse_job_spec(std::string_view text, const std::filesystem::path& base_dir = ".");
JobSpec load_job_spec(const std::filesystem::path& path);

struct JobReport {
    std::string csv;
    std::string summary;
    double estimate = 0.0;
};

/// Runs the job in memory. Library errors propagate (CapExceededError and
/// NoConvergenceError are computation errors, everything else is a spec error).
JobReport run_job(const JobSpec& job);

struct RunOptions {
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::size_t> max_n;
    std::optional<double> tolerance;
    bool quiet = false;
};

/// Loads, runs and writes <out>/<output>.csv and <out>/<output>.summary.txt.
/// Nothing is written unless the computation succeeds. Returns 0 on success, 1 for
/// spec errors, 2 for computation errors.
int run(const std::filesystem::path& spec_file, const RunOptions& options);

std::string format_double(double x);

} // namespace ratdense
