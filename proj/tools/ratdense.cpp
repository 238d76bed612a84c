#include <CLI11.hpp>

#include "ratdense/job.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Densities of rational languages under measures and measure sequences"};
    std::string spec;
    std::string out_dir;
    std::size_t max_n = 0;
    double tol = 0.0;
    bool quiet = false;
    app.add_option("spec-file", spec, "Job file")->required();
    auto* out_opt = app.add_option("--out", out_dir, "Output directory (default: current directory)");
    auto* max_opt = app.add_option("--max-n", max_n, "Cap on the number of terms")->check(CLI::PositiveNumber);
    auto* tol_opt = app.add_option("--tol", tol, "Convergence tolerance")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", quiet, "Do not print the summary");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    ratdense::RunOptions options;
    if (*out_opt) {
        options.out_dir = out_dir;
    }
    if (*max_opt) {
        options.max_n = max_n;
    }
    if (*tol_opt) {
        options.tolerance = tol;
    }
    options.quiet = quiet;
    return ratdense::run(spec, options);
}
