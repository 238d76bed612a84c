#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ratdense/automata.hpp"

namespace ratdense {

/// A transformation of the state set: `image[q]` is q acted on by the element.
using Transformation = std::vector<State>;

struct TransformationHash {
    std::size_t operator()(const Transformation& t) const noexcept;
};

/// Transition monoid of a complete DFA, with morphism letter -> generator element.
///
/// Element 0 is the identity. Elements are numbered in the order they are discovered
/// by a breadth-first closure, so `witness(m)` is the radix-least word mapping to m.
/// Products follow word concatenation: `multiply(x, y)` is the element of uv when
/// x is the element of u and y that of v.
class Monoid {
public:
    static constexpr std::size_t default_cap = 100000;

    std::size_t size() const noexcept { return elements_.size(); }
    const std::string& alphabet() const noexcept { return alphabet_; }
    std::size_t identity() const noexcept { return 0; }
    std::size_t generator(std::size_t letter) const { return generators_[letter]; }

    const Transformation& transformation(std::size_t m) const { return elements_[m]; }
    const std::string& witness(std::size_t m) const { return witnesses_[m]; }

    /// Element whose transformation is `t`, if any.
    std::optional<std::size_t> find(const Transformation& t) const;

    std::size_t multiply(std::size_t x, std::size_t y) const;

    /// Element of a word; throws UnknownSymbolError.
    std::size_t element_of(std::string_view word) const;

    /// x * a and a * x for letter index a.
    std::size_t right_letter(std::size_t x, std::size_t a) const { return right_[x * alphabet_.size() + a]; }
    std::size_t left_letter(std::size_t a, std::size_t x) const { return left_[x * alphabet_.size() + a]; }

    /// mM and Mm as sorted element lists.
    std::vector<std::size_t> right_ideal(std::size_t m) const;
    std::vector<std::size_t> left_ideal(std::size_t m) const;
    /// MmM as a sorted element list.
    std::vector<std::size_t> two_sided_ideal(std::size_t m) const;

    /// Full multiplication table (row x, column y); intended for small monoids.
    std::vector<std::vector<std::size_t>> mult_table() const;

    /// One element per line: index, witness word (ε for the empty word), transformation.
    void dump(std::ostream& out) const;

    friend Monoid transition_monoid(const Dfa& d, std::size_t cap);

private:
    std::string alphabet_;
    std::vector<Transformation> elements_;
    std::vector<std::string> witnesses_;
    std::vector<std::size_t> generators_;
    std::vector<std::size_t> right_; // element-major, letter-minor
    std::vector<std::size_t> left_;
    std::unordered_map<Transformation, std::size_t, TransformationHash> index_;
};

/// Throws CapExceededError when the closure grows beyond `cap` elements.
Monoid transition_monoid(const Dfa& d, std::size_t cap = Monoid::default_cap);

struct IdealInfo {
    std::vector<std::size_t> minimal_ideal; // sorted
    bool aperiodic = false;
    /// Smallest n with m^n = m^{n+1} for all m; set iff aperiodic.
    std::optional<std::size_t> stabilization_exponent;

    bool contains(std::size_t m) const;
};

IdealInfo minimal_ideal(const Monoid& m);

bool is_aperiodic(const Monoid& m);

/// Card(eM ∩ Me) for e in the minimal ideal; throws InvalidArgumentError otherwise.
std::size_t h_intersection_size(const Monoid& m, std::size_t e);

} // namespace ratdense
