#include "ratdense/job.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ratdense/combinatorial.hpp"
#include "ratdense/density.hpp"
#include "ratdense/error.hpp"
#include "ratdense/monoid.hpp"
#include "ratdense/sequential.hpp"

namespace ratdense {

namespace pt = boost::property_tree;

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::size_t parse_size(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw JobSpecError(key + ": expected a number, got '" + value + "'");
    }
    if (pos != value.size() || v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw JobSpecError(key + ": expected a positive integer, got '" + value + "'");
    }
    return static_cast<std::size_t>(v);
}

double parse_positive(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw JobSpecError(key + ": expected a number, got '" + value + "'");
    }
    if (pos != value.size() || !(v > 0.0)) {
        throw JobSpecError(key + ": expected a positive number, got '" + value + "'");
    }
    return v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
    std::filesystem::path p(file);
    return p.is_relative() ? base / p : p;
}

void require_file(const std::filesystem::path& p) {
    if (!std::filesystem::is_regular_file(p)) {
        throw JobSpecError("file not found: " + p.string());
    }
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw JobSpecError("cannot read " + p.string());
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Dfa job_language(const JobSpec& job) {
    if (!job.regex.empty()) {
        return minimize(parse_regex(job.regex, job.alphabet));
    }
    return language_dfa(load_shift_spec(job.language_shift));
}

void trace_csv(std::ostringstream& csv, const std::vector<double>& terms) {
    csv << "index,term,cesaro_partial\n";
    double sum = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        sum += terms[i];
        csv << i << ',' << format_double(terms[i]) << ',' << format_double(sum / static_cast<double>(i + 1)) << '\n';
    }
}

void checkpoints_summary(std::ostringstream& s, const std::vector<std::pair<std::size_t, double>>& cps) {
    for (const auto& [k, u] : cps) {
        s << "u_" << k << ": " << format_double(u) << '\n';
    }
}

JobReport run_density(const JobSpec& job, const Dfa& d) {
    const Measure m = parse_measure_spec(job.measure, job.base_dir.string());
    const Chain chain = lift_chain(d, m);
    const DensityResult r = density(d, m);
    JobReport report;
    report.estimate = r.value;
    std::ostringstream csv, s;
    trace_csv(csv, slice_masses(chain, job.n));
    s << "mode: density\n"
      << "delta: " << format_double(r.value) << '\n'
      << "limit: " << to_string(r.mode) << '\n'
      << "method: " << r.method << '\n'
      << "tail_oscillation: " << format_double(r.tail_oscillation) << '\n'
      << "terms_computed: " << r.terms_computed << '\n'
      << "aperiodic_language: "
      << (r.aperiodic_language ? (*r.aperiodic_language ? "yes" : "no") : "unknown") << '\n';
    for (const auto& [k, u] : r.partial_averages) {
        s << "partial_" << k << ": " << format_double(u) << '\n';
    }
    report.csv = csv.str();
    report.summary = s.str();
    return report;
}

JobReport run_sequential(const JobSpec& job, const Dfa& d) {
    const MeasureSequence seq = make_sequence(job.sequence, job.base_dir.string());
    SequentialOptions options;
    options.tolerance = job.tolerance;
    options.checkpoints = job.checkpoints;
    const SequentialResult r = sequential_density(seq, d, job.n, options);
    JobReport report;
    report.estimate = r.estimate;
    std::ostringstream csv, s;
    trace_csv(csv, r.terms);
    s << "mode: sequential\n"
      << "sequence: " << seq.description() << '\n'
      << "delta: " << format_double(r.estimate) << '\n'
      << "verdict: " << r.verdict() << '\n'
      << "strong: " << (r.strong ? "yes" : "no") << '\n'
      << "window: " << r.window << '\n'
      << "max_window_delta: " << format_double(r.max_window_delta) << '\n'
      << "term_oscillation: " << format_double(r.term_oscillation) << '\n';
    if (r.limit_density) {
        s << "limit_measure_density: " << format_double(*r.limit_density) << '\n';
    }
    if (r.closed_form_deviation) {
        s << "closed_form_deviation: " << format_double(*r.closed_form_deviation) << '\n';
    }
    checkpoints_summary(s, r.checkpoints);
    report.csv = csv.str();
    report.summary = s.str();
    return report;
}

JobReport run_combinatorial(const JobSpec& job, const Dfa& d) {
    const Sft x = load_shift_spec(job.shift);
    SequentialOptions options;
    options.tolerance = job.tolerance;
    options.checkpoints = job.checkpoints;
    const CombinatorialResult r = combinatorial_density(d, x, job.n, options);
    JobReport report;
    report.estimate = r.estimate;
    std::ostringstream csv, s;
    trace_csv(csv, r.ratios);
    s << "mode: combinatorial\n"
      << "delta: " << format_double(r.estimate) << '\n'
      << "verdict: " << r.verdict() << '\n'
      << "strong: " << (r.strong ? "yes" : "no") << '\n'
      << "window: " << r.window << '\n'
      << "max_window_delta: " << format_double(r.max_window_delta) << '\n'
      << "term_oscillation: " << format_double(r.term_oscillation) << '\n';
    checkpoints_summary(s, r.checkpoints);
    report.csv = csv.str();
    report.summary = s.str();
    return report;
}

JobReport run_monoid(const JobSpec& job, const Dfa& d) {
    const Measure m = parse_measure_spec(job.measure, job.base_dir.string());
    const Monoid mon = transition_monoid(d);
    const std::vector<double> nu = element_densities(mon, m);
    const CorollaryReport rep = check_corollary(mon, nu);
    JobReport report;
    std::ostringstream csv, s;
    csv << "element,witness,nu,in_ideal,d,nu_right,nu_left,predicted\n";
    std::string ideal;
    double language_mass = 0.0;
    for (const auto& row : rep.rows) {
        const std::string& w = mon.witness(row.element);
        csv << row.element << ',' << (w.empty() ? "ε" : w) << ',' << format_double(row.nu) << ','
            << (row.in_ideal ? 1 : 0) << ',' << row.d << ',' << format_double(row.nu_right) << ','
            << format_double(row.nu_left) << ',' << format_double(row.predicted) << '\n';
        if (row.in_ideal) {
            ideal += (ideal.empty() ? "" : " ") + std::to_string(row.element);
        }
        // the language is the union of the elements sending the initial state to a terminal one
        if (d.is_terminal(mon.transformation(row.element)[d.initial()])) {
            language_mass += row.nu;
        }
    }
    report.estimate = language_mass;
    s << "mode: monoid\n"
      << "elements: " << mon.size() << '\n'
      << "minimal_ideal: " << ideal << '\n'
      << "aperiodic: " << (rep.aperiodic ? "yes" : "no") << '\n'
      << "delta: " << format_double(language_mass) << '\n'
      << "total: " << format_double(rep.total) << '\n'
      << "ideal_identities: " << (rep.ok() ? "ok" : "violated") << '\n';
    for (const auto& v : rep.violations) {
        s << "violation: " << v << '\n';
    }
    report.csv = csv.str();
    report.summary = s.str();
    return report;
}

} // namespace

JobSpec parse_job_spec(std::string_view text, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw JobSpecError(std::string("malformed job file: ") + e.what());
    }
    static const std::map<std::string, std::vector<std::string>> known = {
        {"job", {"mode", "N", "checkpoints", "tolerance", "output"}},
        {"language", {"regex", "alphabet", "shift"}},
        {"measure", {"spec"}},
        {"sequence", {"spec"}},
        {"shift", {"file"}},
    };
    for (const auto& [section, body] : tree) {
        auto it = known.find(section);
        if (it == known.end()) {
            throw JobSpecError("unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
                throw JobSpecError("unknown key '" + key + "' in [" + section + "]");
            }
        }
    }
    auto get = [&](const std::string& path) { return tree.get<std::string>(path, ""); };

    JobSpec job;
    job.base_dir = base_dir;
    const std::string mode = get("job.mode");
    if (mode == "density") {
        job.mode = JobMode::density;
    } else if (mode == "sequential") {
        job.mode = JobMode::sequential;
    } else if (mode == "combinatorial") {
        job.mode = JobMode::combinatorial;
    } else if (mode == "monoid") {
        job.mode = JobMode::monoid;
    } else {
        throw JobSpecError("job.mode must be density, sequential, combinatorial or monoid, got '" + mode + "'");
    }
    if (auto v = get("job.N"); !v.empty()) {
        job.n = parse_size("N", v);
    }
    if (auto v = get("job.tolerance"); !v.empty()) {
        job.tolerance = parse_positive("tolerance", v);
    }
    if (auto v = get("job.checkpoints"); !v.empty()) {
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto b = item.find_first_not_of(" \t");
            auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) {
                continue;
            }
            job.checkpoints.push_back(parse_size("checkpoints", item.substr(b, e - b + 1)));
        }
    }
    job.output = get("job.output");

    job.regex = get("language.regex");
    job.alphabet = get("language.alphabet");
    if (auto v = get("language.shift"); !v.empty()) {
        job.language_shift = resolve(base_dir, v);
    }
    if (job.regex.empty() == job.language_shift.empty()) {
        throw JobSpecError("[language] needs exactly one of regex or shift");
    }
    if (!job.regex.empty() && job.alphabet.empty()) {
        throw JobSpecError("[language] regex needs an alphabet");
    }
    if (!job.language_shift.empty()) {
        require_file(job.language_shift);
    }

    job.measure = get("measure.spec");
    job.sequence = get("sequence.spec");
    if (auto v = get("shift.file"); !v.empty()) {
        job.shift = resolve(base_dir, v);
    }
    switch (job.mode) {
    case JobMode::density:
    case JobMode::monoid:
        if (job.measure.empty()) {
            throw JobSpecError("this mode needs [measure] spec");
        }
        if (job.measure.starts_with("maxent")) {
            std::istringstream r(job.measure.substr(6));
            std::string file;
            r >> file;
            require_file(resolve(base_dir, file));
        }
        break;
    case JobMode::sequential:
        if (job.sequence.empty()) {
            throw JobSpecError("sequential mode needs [sequence] spec");
        }
        break;
    case JobMode::combinatorial:
        if (job.shift.empty()) {
            throw JobSpecError("combinatorial mode needs [shift] file");
        }
        require_file(job.shift);
        break;
    }
    return job;
}

JobSpec load_job_spec(const std::filesystem::path& path) {
    require_file(path);
    JobSpec job = parse_job_spec(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
    if (job.output.empty()) {
        job.output = path.stem().string();
    }
    return job;
}

JobReport run_job(const JobSpec& job) {
    const Dfa d = job_language(job);
    switch (job.mode) {
    case JobMode::density:
        return run_density(job, d);
    case JobMode::sequential:
        return run_sequential(job, d);
    case JobMode::combinatorial:
        return run_combinatorial(job, d);
    case JobMode::monoid:
        return run_monoid(job, d);
    }
    throw JobSpecError("unknown mode");
}

int run(const std::filesystem::path& spec_file, const RunOptions& options) {
    JobReport report;
    JobSpec job;
    try {
        job = load_job_spec(spec_file);
        if (options.max_n) {
            job.n = std::min(job.n, *options.max_n);
        }
        if (options.tolerance) {
            if (!(*options.tolerance > 0.0)) {
                throw JobSpecError("--tol must be positive");
            }
            job.tolerance = *options.tolerance;
        }
        report = run_job(job);
    } catch (const CapExceededError& e) {
        std::cerr << "ratdense: computation error: " << e.what() << '\n';
        return 2;
    } catch (const NoConvergenceError& e) {
        std::cerr << "ratdense: computation error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ratdense: spec error: " << e.what() << '\n';
        return 1;
    }

    const std::filesystem::path dir = options.out_dir.value_or(".");
    const std::filesystem::path csv_path = dir / (job.output + ".csv");
    const std::filesystem::path summary_path = dir / (job.output + ".summary.txt");
    try {
        std::filesystem::create_directories(dir);
        for (const auto& [path, body] : {std::pair{csv_path, &report.csv}, std::pair{summary_path, &report.summary}}) {
            std::filesystem::path tmp = path;
            tmp += ".tmp";
            {
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                out << *body;
                if (!out) {
                    throw std::runtime_error("cannot write " + tmp.string());
                }
            }
            std::filesystem::rename(tmp, path);
        }
    } catch (const std::exception& e) {
        std::cerr << "ratdense: " << e.what() << '\n';
        return 1;
    }
    if (!options.quiet) {
        std::cout << report.summary;
        std::cout << "wrote " << csv_path.string() << " and " << summary_path.string() << '\n';
    }
    return 0;
}

} // namespace ratdense
