#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ratdense/combinatorial.hpp"
#include "ratdense/density.hpp"
#include "ratdense/error.hpp"
#include "ratdense/job.hpp"
#include "ratdense/measures.hpp"
#include "ratdense/monoid.hpp"
#include "ratdense/sequential.hpp"
#include "ratdense/sft.hpp"

namespace py = pybind11;
using namespace ratdense;

namespace {

std::vector<std::string> big_strings(const std::vector<BigInt>& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        out.push_back(x.str());
    }
    return out;
}

py::dict sequential_dict(const SequentialResult& r) {
    py::dict d;
    d["estimate"] = r.estimate;
    d["verdict"] = r.verdict();
    d["converged"] = r.converged;
    d["strong"] = r.strong;
    d["window"] = r.window;
    d["max_window_delta"] = r.max_window_delta;
    d["term_oscillation"] = r.term_oscillation;
    d["checkpoints"] = r.checkpoints;
    d["terms"] = r.terms;
    d["limit_density"] = r.limit_density;
    d["closed_form_deviation"] = r.closed_form_deviation;
    return d;
}

} // namespace

PYBIND11_MODULE(_ratdense, m) {
    m.doc() = "Densities of rational languages";

    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<SyntaxError>(m, "SyntaxError", base.ptr());
    py::register_exception<UnknownSymbolError>(m, "UnknownSymbolError", base.ptr());
    py::register_exception<AlphabetMismatchError>(m, "AlphabetMismatchError", base.ptr());
    py::register_exception<CapExceededError>(m, "CapExceededError", base.ptr());
    py::register_exception<InvalidArgumentError>(m, "InvalidArgumentError", base.ptr());
    py::register_exception<MeasureError>(m, "MeasureError", base.ptr());
    py::register_exception<EmptyShiftError>(m, "EmptyShiftError", base.ptr());
    py::register_exception<NotIrreducibleError>(m, "NotIrreducibleError", base.ptr());
    py::register_exception<NoConvergenceError>(m, "NoConvergenceError", base.ptr());
    py::register_exception<JobSpecError>(m, "JobSpecError", base.ptr());

    py::class_<Dfa>(m, "Dfa")
        .def_property_readonly("alphabet", &Dfa::alphabet)
        .def_property_readonly("num_states", &Dfa::num_states)
        .def("accepts", [](const Dfa& d, std::string_view w) { return accepts(d, w); })
        .def("__and__", [](const Dfa& a, const Dfa& b) { return intersect(a, b); })
        .def("__or__", [](const Dfa& a, const Dfa& b) { return unite(a, b); })
        .def("__invert__", [](const Dfa& a) { return complement(a); })
        .def("__eq__", [](const Dfa& a, const Dfa& b) { return equivalent(a, b); });

    m.def("parse_regex", &parse_regex, py::arg("regex"), py::arg("alphabet"));
    m.def("is_empty", &is_empty);

    py::class_<Measure>(m, "Measure")
        .def_static(
            "bernoulli",
            [](const std::string& alphabet, std::vector<double> p) { return Measure::bernoulli(alphabet, std::move(p)); },
            py::arg("alphabet"), py::arg("prob"))
        .def_static(
            "markov",
            [](const std::string& alphabet, std::vector<double> pi, const std::vector<std::vector<double>>& P) {
                std::vector<std::size_t> letters(alphabet.size());
                for (std::size_t i = 0; i < letters.size(); ++i) {
                    letters[i] = i;
                }
                return Measure::markov(alphabet, std::move(pi), P, letters);
            },
            py::arg("alphabet"), py::arg("pi"), py::arg("P"))
        .def_static("parse", [](std::string_view spec) { return parse_measure_spec(spec); })
        .def_property_readonly("alphabet", &Measure::alphabet)
        .def_property_readonly("num_states", &Measure::num_states)
        .def_property_readonly("initial", &Measure::initial)
        .def_property_readonly("is_invariant", &Measure::is_invariant)
        .def("letter_marginals", &Measure::letter_marginals)
        .def("mass", [](const Measure& mu, std::string_view w) { return word_mass(mu, w); })
        .def("transition", [](const Measure& mu) {
            std::vector<std::vector<double>> out(mu.num_states(), std::vector<double>(mu.num_states(), 0.0));
            for (int i = 0; i < mu.transition().outerSize(); ++i) {
                for (SparseMatrix::InnerIterator it(mu.transition(), i); it; ++it) {
                    out[static_cast<std::size_t>(i)][static_cast<std::size_t>(it.col())] = it.value();
                }
            }
            return out;
        });

    py::class_<Sft>(m, "Sft")
        .def_static(
            "from_blocks",
            [](const std::string& alphabet, const std::vector<std::string>& blocks) {
                return sft_from_forbidden_blocks(alphabet, blocks);
            },
            py::arg("alphabet"), py::arg("blocks"))
        .def_static(
            "from_adjacency",
            [](const std::string& alphabet, const std::vector<std::vector<int>>& a) {
                return sft_from_adjacency(alphabet, a);
            },
            py::arg("alphabet"), py::arg("matrix"))
        .def_static("parse", [](std::string_view text) { return parse_shift_spec(text); })
        .def_property_readonly("alphabet", &Sft::alphabet)
        .def_property_readonly("num_vertices", &Sft::num_vertices)
        .def("is_irreducible", [](const Sft& s) { return is_irreducible(s); })
        .def("language", [](const Sft& s) { return language_dfa(s); })
        .def("count_words", [](const Sft& s, std::size_t n) { return count_words(s, n).str(); })
        .def("factors", [](const Sft& s, std::size_t n) { return factors(s, n); });

    m.def("max_entropy", py::overload_cast<const Sft&>(&max_entropy));
    m.def("perron_eigenvalue", [](const Sft& s) { return perron_data(s).lambda; });
    m.def("counterexample_family", &counterexample_family, py::arg("family"), py::arg("n"));

    m.def(
        "slice_mass", [](const Dfa& d, const Measure& mu, std::size_t n) { return slice_mass(lift_chain(d, mu), n); },
        py::arg("dfa"), py::arg("measure"), py::arg("n"));
    m.def("brute_force_slice", &brute_force_slice, py::arg("dfa"), py::arg("measure"), py::arg("n"));
    m.def(
        "density",
        [](const Dfa& d, const Measure& mu) {
            DensityResult r = density(d, mu);
            py::dict out;
            out["value"] = r.value;
            out["mode"] = std::string(to_string(r.mode));
            out["method"] = r.method;
            out["tail_oscillation"] = r.tail_oscillation;
            out["partial_averages"] = r.partial_averages;
            out["aperiodic_language"] = r.aperiodic_language;
            return out;
        },
        py::arg("dfa"), py::arg("measure"));

    m.def(
        "sequential_density",
        [](const Dfa& d, const std::string& sequence, std::size_t n, double tolerance) {
            return sequential_dict(sequential_density(make_sequence(sequence), d, n, {tolerance, {}}));
        },
        py::arg("dfa"), py::arg("sequence"), py::arg("n"), py::arg("tolerance") = 1e-3);
    m.def(
        "sequential_term",
        [](const Dfa& d, const std::string& sequence, std::size_t i) {
            return sequential_term(make_sequence(sequence), d, i);
        },
        py::arg("dfa"), py::arg("sequence"), py::arg("i"));

    m.def(
        "combinatorial_density",
        [](const Dfa& d, const Sft& x, std::size_t n, double tolerance) {
            CombinatorialResult r = combinatorial_density(d, x, n, {tolerance, {}});
            py::dict out;
            out["estimate"] = r.estimate;
            out["verdict"] = r.verdict();
            out["converged"] = r.converged;
            out["strong"] = r.strong;
            out["max_window_delta"] = r.max_window_delta;
            out["ratios"] = r.ratios;
            out["language_counts"] = big_strings(r.language_counts);
            out["shift_counts"] = big_strings(r.shift_counts);
            return out;
        },
        py::arg("dfa"), py::arg("shift"), py::arg("n"), py::arg("tolerance") = 1e-3);
    m.def("prefix_counts", [](const Sft& x, const std::string& u, std::size_t n) {
        return big_strings(prefix_counts(x, u, n));
    });
    m.def("fibonacci_word", &fibonacci_word);
    m.def("factor_complexity", &factor_complexity, py::arg("word"), py::arg("max_len"));
    m.def(
        "sturmian_check",
        [](const std::string& u, std::size_t n, std::size_t big_n) {
            SturmianEstimate e = sturmian_check(u, n, big_n);
            return std::pair(e.right_special, e.frequency);
        },
        py::arg("u"), py::arg("n"), py::arg("N"));

    m.def(
        "monoid_report",
        [](const Dfa& d, const Measure& mu) {
            Monoid mon = transition_monoid(d);
            CorollaryReport rep = check_corollary(mon, element_densities(mon, mu));
            py::list rows;
            for (const auto& r : rep.rows) {
                py::dict row;
                row["element"] = r.element;
                row["witness"] = mon.witness(r.element);
                row["nu"] = r.nu;
                row["in_ideal"] = r.in_ideal;
                row["d"] = r.d;
                row["predicted"] = r.predicted;
                rows.append(row);
            }
            py::dict out;
            out["size"] = mon.size();
            out["aperiodic"] = rep.aperiodic;
            out["total"] = rep.total;
            out["violations"] = rep.violations;
            out["rows"] = rows;
            return out;
        },
        py::arg("dfa"), py::arg("measure"));

    m.def(
        "run_job",
        [](const std::filesystem::path& spec, std::optional<std::filesystem::path> out_dir, bool quiet) {
            RunOptions o;
            o.out_dir = std::move(out_dir);
            o.quiet = quiet;
            return run(spec, o);
        },
        py::arg("spec_file"), py::arg("out_dir") = py::none(), py::arg("quiet") = true);
}
