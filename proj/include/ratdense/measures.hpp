#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "ratdense/sft.hpp"

namespace ratdense {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class MeasureKind { bernoulli, markov };

/// Bernoulli or stationary-Markov probability measure on bi-infinite sequences.
///
/// A Markov measure runs a chain on its own state space; state s emits the letter
/// `letter_of(s)`. For a Markov measure on the letters themselves the states are the
/// letters and `letter_of` is the identity. The measure of a word is the total mass of
/// the chain paths emitting it.
class Measure {
public:
    /// Probabilities in alphabet order. Throws MeasureError if an entry is negative or
    /// the sum is off by more than 1e-9; otherwise renormalizes.
    static Measure bernoulli(std::string alphabet, std::vector<double> prob);

    /// Throws MeasureError for negative entries, rows or initial vector not summing to 1
    /// (tolerance 1e-9), or mismatched dimensions. Rows are renormalized.
    static Measure markov(std::string alphabet, std::vector<double> initial, SparseMatrix transition,
                          std::vector<std::size_t> letter_of, std::vector<std::string> state_names = {});
    static Measure markov(std::string alphabet, std::vector<double> initial,
                          const std::vector<std::vector<double>>& transition, std::vector<std::size_t> letter_of,
                          std::vector<std::string> state_names = {});

    MeasureKind kind() const noexcept { return kind_; }
    const std::string& alphabet() const noexcept { return alphabet_; }

    /// Bernoulli letter probabilities (empty for Markov measures).
    const std::vector<double>& prob() const noexcept { return prob_; }
    double prob(char letter) const;

    std::size_t num_states() const noexcept { return initial_.size(); }
    const std::vector<double>& initial() const noexcept { return initial_; }
    const SparseMatrix& transition() const noexcept { return transition_; }
    const std::vector<std::size_t>& letter_of() const noexcept { return letter_of_; }
    const std::vector<std::string>& state_names() const noexcept { return state_names_; }

    /// Every letter has positive probability (Bernoulli) or every chain entry that the
    /// support graph allows is positive (Markov: initial vector positive).
    bool is_positive() const noexcept { return positive_; }
    /// Bernoulli measures are invariant; Markov ones iff ||piP - pi||_inf <= 1e-10.
    bool is_invariant() const noexcept { return invariant_; }

    /// Letter marginals mu(a) in alphabet order.
    std::vector<double> letter_marginals() const;

private:
    MeasureKind kind_ = MeasureKind::bernoulli;
    std::string alphabet_;
    std::vector<double> prob_;
    std::vector<double> initial_;
    SparseMatrix transition_;
    std::vector<std::size_t> letter_of_;
    std::vector<std::string> state_names_;
    bool positive_ = false;
    bool invariant_ = true;
};

/// Parses "a=0.5 b=0.5" style letter probabilities into a Bernoulli measure.
Measure bernoulli(std::string_view spec);

/// mu(word). The empty word has mass 1.
double word_mass(const Measure& m, std::string_view word);

struct PerronData {
    double lambda = 0.0;
    std::vector<double> left;  // v, with v . w = 1
    std::vector<double> right; // w
    std::size_t iterations = 0;
};

/// Dominant eigenvalue and eigenvectors of the vertex adjacency matrix, by power
/// iteration on M + I. Throws NotIrreducibleError, NoConvergenceError.
PerronData perron_data(const Sft& s, double tol = 1e-13, std::size_t max_iterations = 1000000);

/// Measure of maximal entropy of an irreducible shift.
///
/// When every vertex is entered by edges of a single label and there are no parallel
/// edges, the chain runs on the vertices: pi_i = v_i w_i, P_ij = w_j M_ij / (lambda w_i).
/// Otherwise it runs on the edges, with the same Perron data.
Measure max_entropy(const Sft& s);
Measure max_entropy(const Sft& s, const PerronData& perron);

/// Parses a measure spec: "bernoulli a=0.5 b=0.5",
/// "markov letters=ab pi=0.5,0.5 P=0.5,0.5;0.5,0.5", or "maxent <shift-spec-file>"
/// (the path resolved against `base_dir`).
Measure parse_measure_spec(std::string_view text, const std::string& base_dir = ".");

} // namespace ratdense
