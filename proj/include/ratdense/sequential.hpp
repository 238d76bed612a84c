#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ratdense/automata.hpp"
#include "ratdense/measures.hpp"
#include "ratdense/sft.hpp"

namespace ratdense {

enum class SequenceKind { bernoulli_formula, constant, explicit_list, maxent_family, generator };

/// Lazily evaluated sequence of measures (mu_n).
///
/// Indices below n_min() use the measure at n_min(). Copies share their cache, which is
/// guarded by a mutex, so at() may be called from several threads.
class MeasureSequence {
public:
    /// mu_n(alphabet[0]) = clamp(c n^-alpha, 0, 1) for n >= 1; the other letters share
    /// the rest equally. Throws InvalidArgumentError for c < 0, non-finite parameters or
    /// fewer than two letters.
    static MeasureSequence bernoulli_formula(std::string alphabet, double c, double alpha);
    static MeasureSequence constant(Measure m);
    /// Index i uses list[min(i, size - 1)].
    static MeasureSequence explicit_list(std::vector<Measure> list);
    /// `before` for n < switch_at, `after` from then on.
    static MeasureSequence eventually_constant(Measure before, Measure after, std::size_t switch_at);
    /// Maximal-entropy measures of counterexample_family(family, n).
    static MeasureSequence maxent_family(int family, std::size_t max_index = 1000);
    static MeasureSequence from_generator(std::function<Measure(std::size_t)> generator, std::size_t n_min,
                                          std::string description, std::optional<Measure> limit = std::nullopt);

    SequenceKind kind() const noexcept;
    const std::string& description() const noexcept;
    const std::string& alphabet() const noexcept;
    std::size_t n_min() const noexcept;

    /// Shared pointers compare equal for indices that use the same measure object.
    std::shared_ptr<const Measure> at(std::size_t i) const;
    Measure operator()(std::size_t i) const { return *at(i); }

    /// Weak limit, when known.
    const std::optional<Measure>& limit() const noexcept;
    /// mu_n(alphabet[0]) for Bernoulli formula sequences.
    std::optional<double> first_letter_probability(std::size_t i) const;

private:
    struct State;
    explicit MeasureSequence(std::shared_ptr<State> state);
    std::shared_ptr<State> state_;
};

/// Parses "bernoulli p_n = 1.0*n^-1 over a,b", "constant <measure-spec>",
/// "maxent family1 gap=n", "maxent family2", "list <measure-spec> | <measure-spec> ..."
/// and "eventually n0=100 <measure-spec> | <measure-spec>".
MeasureSequence make_sequence(std::string_view text, const std::string& base_dir = ".");

/// mu_i(L ∩ A^i).
double sequential_term(const MeasureSequence& seq, const Dfa& d, std::size_t i);

struct SequentialOptions {
    double tolerance = 1e-3;
    /// Indices at which to report u_N; N itself is always reported.
    std::vector<std::size_t> checkpoints;
};

struct SequentialResult {
    std::size_t n = 0;
    /// term i = mu_i(L ∩ A^i), i < n.
    std::vector<double> terms;
    /// (N, u_N) with u_N = (1/N) sum_{i<N} term i.
    std::vector<std::pair<std::size_t, double>> checkpoints;
    double estimate = 0.0;
    bool converged = false;
    std::size_t window = 0;
    /// max |u_j - u_n| over the last `window` indices.
    double max_window_delta = 0.0;
    /// The raw terms stabilize: max - min of the last `window` terms <= tolerance.
    bool strong = false;
    double term_oscillation = 0.0;
    /// Density under the limit measure, when the sequence has one.
    std::optional<double> limit_density;
    /// Largest |term i - (1 - (1 - p_i)^i)| when the language is "contains the first
    /// letter" and the sequence is a Bernoulli formula.
    std::optional<double> closed_form_deviation;

    std::string verdict() const { return converged ? "converged" : "no-limit-detected"; }
};

/// Cesàro partials and convergence diagnostics of a term trace.
struct TraceSummary {
    std::vector<std::pair<std::size_t, double>> checkpoints;
    double estimate = 0.0;
    bool converged = false;
    std::size_t window = 0;
    double max_window_delta = 0.0;
    bool strong = false;
    double term_oscillation = 0.0;
};

TraceSummary summarize_trace(const std::vector<double>& terms, const SequentialOptions& options = {});

SequentialResult sequential_density(const MeasureSequence& seq, const Dfa& d, std::size_t n,
                                    const SequentialOptions& options = {});

/// u_N from a term trace, summed in index order.
double cesaro_partial(const std::vector<double>& terms, std::size_t n);

/// Family 1: blocks a A^i a with i <= n forbidden (a's at least n + 1 letters apart),
/// presented by n + 2 gap-counter vertices; n >= 1.
/// Family 2: a A^(n-2) a forbidden when floor(log2 n) is even, a A^(n-2) b otherwise,
/// presented by the a-positions among the last n - 1 letters; 2 <= n <= 16.
/// Throws InvalidArgumentError, CapExceededError.
Sft counterexample_family(int family, std::size_t n);

} // namespace ratdense
