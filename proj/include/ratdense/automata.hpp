#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ratdense {

using State = std::uint32_t;

/// Complete deterministic automaton (Q, i, T) over an alphabet of single-character symbols.
///
/// The transition table is total and stored row-major: `next(q, a)` for letter index `a`
/// in alphabet order. Values are immutable once constructed.
class Dfa {
public:
    /// Validates totality and index ranges; throws InvalidArgumentError otherwise.
    Dfa(std::string alphabet, std::vector<State> transitions, State initial, std::vector<bool> terminal);

    const std::string& alphabet() const noexcept { return alphabet_; }
    std::size_t alphabet_size() const noexcept { return alphabet_.size(); }
    std::size_t num_states() const noexcept { return terminal_.size(); }
    State initial() const noexcept { return initial_; }
    bool is_terminal(State q) const { return terminal_[q]; }
    const std::vector<bool>& terminals() const noexcept { return terminal_; }

    State next(State q, std::size_t letter) const { return transitions_[q * alphabet_.size() + letter]; }
    std::span<const State> row(State q) const {
        return {transitions_.data() + q * alphabet_.size(), alphabet_.size()};
    }
    const std::vector<State>& transitions() const noexcept { return transitions_; }

    /// Index of `symbol` in the alphabet, or -1.
    int letter_index(char symbol) const noexcept;

    /// State reached from `from` after reading `word`; throws UnknownSymbolError.
    State run(std::string_view word, State from) const;
    State run(std::string_view word) const { return run(word, initial_); }

    bool operator==(const Dfa&) const = default;

private:
    std::string alphabet_;
    std::vector<State> transitions_;
    State initial_;
    std::vector<bool> terminal_;
};

/// Checks an alphabet for duplicates and reserved regex characters.
void validate_alphabet(std::string_view alphabet);

/// Minimal complete DFA for a regular expression.
///
/// Grammar: single-character literals, juxtaposition for concatenation, `|`, `*`,
/// parentheses, `.` for any symbol, `ε` or `%e` for the empty word, `∅` or `%0` for
/// the empty set. Spaces are ignored.
/// Throws SyntaxError (with byte position) or UnknownSymbolError.
Dfa parse_regex(std::string_view text, std::string_view alphabet);

/// Minimal complete DFA of the same language, states numbered breadth-first from the
/// initial state with alphabet-order tie breaking.
Dfa minimize(const Dfa& d);

/// Product constructions followed by minimization; throw AlphabetMismatchError.
Dfa intersect(const Dfa& d1, const Dfa& d2);
Dfa unite(const Dfa& d1, const Dfa& d2);
Dfa complement(const Dfa& d);

bool accepts(const Dfa& d, std::string_view word);

/// True iff the language is empty.
bool is_empty(const Dfa& d);

/// True iff L(d1) = L(d2).
bool equivalent(const Dfa& d1, const Dfa& d2);

/// Single-state automaton for A* (terminal) or the empty set.
Dfa universal_dfa(std::string_view alphabet);
Dfa empty_dfa(std::string_view alphabet);

/// Automaton of the words beginning with `prefix`.
Dfa prefix_dfa(std::string_view prefix, std::string_view alphabet);

} // namespace ratdense
