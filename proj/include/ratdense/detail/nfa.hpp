#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ratdense/automata.hpp"

namespace ratdense::detail {

/// Nondeterministic automaton with epsilon moves. Internal to the library.
struct Nfa {
    struct Edge {
        std::size_t letter; // alphabet index
        State target;
    };

    std::string alphabet;
    std::vector<std::vector<Edge>> edges;
    std::vector<std::vector<State>> epsilon;
    std::vector<State> start;
    std::vector<bool> accepting;

    State add_state(bool accept = false) {
        edges.emplace_back();
        epsilon.emplace_back();
        accepting.push_back(accept);
        return static_cast<State>(accepting.size() - 1);
    }
    std::size_t size() const { return accepting.size(); }
};

/// Subset construction. Subsets are kept as sorted vectors; new subsets are numbered in
/// discovery order (breadth first, alphabet order). The empty subset becomes the sink.
/// Throws CapExceededError when more than `max_states` subsets appear.
Dfa determinize(const Nfa& nfa, std::size_t max_states = 1u << 22);

} // namespace ratdense::detail
