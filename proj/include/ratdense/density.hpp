#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ratdense/automata.hpp"
#include "ratdense/measures.hpp"
#include "ratdense/monoid.hpp"

namespace ratdense {

/// Finite Markov chain obtained by running a measure through an automaton.
///
/// slice_mass(n) = initial . P^(n - offset) . terminal for n >= offset; with offset 1
/// (Markov lifts, where the initial distribution has already consumed one letter) the
/// empty-word slice is `empty_word_mass`.
struct Chain {
    SparseMatrix transition;
    std::vector<double> initial;
    std::vector<double> terminal;
    std::size_t offset = 0;
    double empty_word_mass = 0.0;

    std::size_t num_states() const noexcept { return initial.size(); }
};

enum class DensityMode { cesaro, strong };

const char* to_string(DensityMode mode) noexcept;

struct DensityResult {
    double value = 0.0;
    DensityMode mode = DensityMode::cesaro;
    /// (N, (1/N) sum_{i<N} slice_i) at powers of two.
    std::vector<std::pair<std::size_t, double>> partial_averages;
    /// max - min of the slice masses over the final window.
    double tail_oscillation = 0.0;
    std::size_t terms_computed = 0;
    /// "structural" (recurrent classes + linear solves) or "iterative" (periodic-regime averaging).
    std::string method;
    /// Aperiodicity of the syntactic monoid, when the caller had the automaton.
    std::optional<bool> aperiodic_language;
};

struct CesaroOptions {
    std::size_t window = 256;
    double strong_tolerance = 1e-9;
    std::size_t max_steps = 1000000;
    /// Classes and transient sets up to this size are solved densely.
    std::size_t dense_limit = 3000;
};

/// Bernoulli: chain on Q with P_pq = sum of mu(a) over a with p.a = q.
/// Markov: chain on reachable pairs (q, s), initial weight pi_s on (i.letter(s), s),
/// step (q, s) -> (q.letter(t), t) with probability P_st.
/// Throws AlphabetMismatchError when the letter sets differ.
Chain lift_chain(const Dfa& d, const Measure& m);

double slice_mass(const Chain& c, std::size_t n);

/// x P for a row distribution x over the chain states.
std::vector<double> step_distribution(const Chain& c, const std::vector<double>& x);

/// slice_mass(c, 0), ..., slice_mass(c, count - 1) by vector iteration.
std::vector<double> slice_masses(const Chain& c, std::size_t count);

/// Cesàro limit of the averaged state distribution (sums to 1).
std::vector<double> cesaro_distribution(const Chain& c, const CesaroOptions& options = {});

DensityResult cesaro_limit(const Chain& c, const CesaroOptions& options = {});

/// lift_chain + cesaro_limit, with the syntactic monoid's aperiodicity attached.
DensityResult density(const Dfa& d, const Measure& m, const CesaroOptions& options = {});

/// Density of phi^{-1}(e) for every element, from the Cayley chain e -> e.phi(a).
/// Requires a Bernoulli measure on the monoid's alphabet.
std::vector<double> element_densities(const Monoid& mon, const Measure& m);

struct CorollaryRow {
    std::size_t element = 0;
    double nu = 0.0;
    bool in_ideal = false;
    std::size_t d = 0;           // Card(eM ∩ Me), in-ideal elements only
    double nu_right = 0.0;       // nu(eM)
    double nu_left = 0.0;        // nu(Me)
    double predicted = 0.0;      // nu(eM) nu(Me) / d, or 0 off the ideal
};

struct CorollaryReport {
    std::vector<CorollaryRow> rows;
    std::vector<std::string> violations;
    bool aperiodic = false;
    double total = 0.0;

    bool ok() const noexcept { return violations.empty(); }
};

/// Checks nu(e) <= tol off the minimal ideal, nu(e) = nu(eM) nu(Me) / d on it, d = 1 for
/// aperiodic monoids and that the densities sum to 1.
CorollaryReport check_corollary(const Monoid& mon, const std::vector<double>& nu, double tol = 1e-9);

/// Sum of word_mass over accepted words of length n, by enumeration.
/// Throws CapExceededError for n > 14 or alphabets larger than 4.
double brute_force_slice(const Dfa& d, const Measure& m, std::size_t n);

} // namespace ratdense
