#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ratdense/automata.hpp"
#include "ratdense/bigint.hpp"
#include "ratdense/sequential.hpp"
#include "ratdense/sft.hpp"

namespace ratdense {

struct CombinatorialResult {
    std::size_t n = 0;
    /// Card(L ∩ L_i(X)) and Card(L_i(X)) for i < n.
    std::vector<BigInt> language_counts;
    std::vector<BigInt> shift_counts;
    /// r_i = language_counts[i] / shift_counts[i].
    std::vector<double> ratios;
    std::vector<std::pair<std::size_t, double>> checkpoints;
    double estimate = 0.0;
    bool converged = false;
    std::size_t window = 0;
    double max_window_delta = 0.0;
    bool strong = false;
    double term_oscillation = 0.0;

    std::string verdict() const { return converged ? "converged" : "no-limit-detected"; }
};

/// Exact word counts through the product of d with the language automaton of X, then
/// the Cesàro average of the ratios with the same diagnostics as sequential_density.
/// The automaton and the shift must share their alphabet.
CombinatorialResult combinatorial_density(const Dfa& d, const Sft& x, std::size_t n,
                                          const SequentialOptions& options = {});

struct PrefixDensity {
    std::string word;
    double estimate = 0.0;
    bool converged = false;
    double max_window_delta = 0.0;
    /// Sum over letters a of the estimate for word + a.
    double children_sum = 0.0;
    /// sum_a Card(uaA* ∩ L_i(X)) == Card(uA* ∩ L_i(X)) for every |u| < i < n.
    bool additive = true;
};

/// Combinatorial density of uA* for every u in L(X) with |u| <= max_len (at most 8),
/// truncated at n terms, in length-then-radix order.
std::vector<PrefixDensity> ideal_density_measure(const Sft& x, std::size_t max_len, std::size_t n = 1000,
                                                 const SequentialOptions& options = {});

/// Card(uA* ∩ L_i(X)) for i < n.
std::vector<BigInt> prefix_counts(const Sft& x, const std::string& u, std::size_t n);

/// Prefix of length n of the fixed point of 0 -> 01, 1 -> 0.
std::string fibonacci_word(std::size_t n);

/// result[k] = number of distinct factors of length k in w, for k <= max_len
/// (suffix array + LCP).
std::vector<std::size_t> factor_complexity(const std::string& w, std::size_t max_len);

/// Occurrences of u in w, overlaps included.
std::size_t count_occurrences(const std::string& w, const std::string& u);

struct SturmianEstimate {
    /// (1 + f_n(x, u)) / (n + 1), x_(-n,0] the reversed length-n prefix.
    double right_special = 0.0;
    /// Occurrences of u in the length-N prefix divided by N - |u| + 1.
    double frequency = 0.0;
};

/// Throws InvalidArgumentError when u is not a factor of the Fibonacci word, or for
/// n > 10^5, N > 10^6.
SturmianEstimate sturmian_check(const std::string& u, std::size_t n, std::size_t big_n);

} // namespace ratdense
