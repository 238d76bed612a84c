#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ratdense/automata.hpp"
#include "ratdense/bigint.hpp"

namespace ratdense {

struct LabeledEdge {
    std::size_t from;
    std::size_t to;
    std::size_t label; // alphabet index

    bool operator==(const LabeledEdge&) const = default;
};

/// Shift of finite type presented by an essential labeled graph.
///
/// In the normal form built from forbidden blocks, vertices are the allowed words of
/// length `memory` and the edge (w, a) goes to the suffix of wa of length `memory`.
/// Other presentations (the counterexample families) use vertices that are functions
/// of the last `memory` symbols; `memory` is then an upper bound on the step of the
/// shift, which is all that block constructions need.
class Sft {
public:
    /// Builds the graph and trims it to its essential part.
    /// Throws EmptyShiftError when nothing survives trimming.
    Sft(std::string alphabet, std::size_t memory, std::vector<std::string> vertex_names,
        std::vector<LabeledEdge> edges);

    const std::string& alphabet() const noexcept { return alphabet_; }
    std::size_t memory() const noexcept { return memory_; }
    std::size_t num_vertices() const noexcept { return vertex_names_.size(); }
    const std::string& vertex_name(std::size_t v) const { return vertex_names_[v]; }
    const std::vector<LabeledEdge>& edges() const noexcept { return edges_; }
    /// Indices into edges() of the edges leaving v, ordered by label.
    const std::vector<std::size_t>& out_edges(std::size_t v) const { return out_[v]; }

    /// Number of edges from i to j.
    std::uint64_t adjacency(std::size_t i, std::size_t j) const;
    /// Dense adjacency matrix; intended for small graphs.
    std::vector<std::vector<std::uint64_t>> adjacency_matrix() const;

    /// True iff distinct out-edges of every vertex carry distinct labels.
    bool is_deterministic() const;

    /// Human-readable names of the alphabet symbols (the blocks, for block presentations).
    const std::vector<std::string>& symbol_names() const noexcept { return symbol_names_; }
    void set_symbol_names(std::vector<std::string> names);

private:
    std::string alphabet_;
    std::size_t memory_;
    std::vector<std::string> vertex_names_;
    std::vector<LabeledEdge> edges_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::string> symbol_names_;
};

/// Normal-form presentation of the shift avoiding `blocks`; memory = max length - 1.
/// Throws EmptyShiftError, CapExceededError (more than `max_vertices` memory words).
Sft sft_from_forbidden_blocks(std::string_view alphabet, const std::vector<std::string>& blocks,
                              std::size_t max_vertices = 1u << 20);

/// Vertex shift on the letters: ab is allowed iff matrix[a][b] != 0.
Sft sft_from_adjacency(std::string_view alphabet, const std::vector<std::vector<int>>& matrix);

/// k-block presentation over a fresh alphabet with one symbol per word of L_k(X).
/// Vertices are the allowed words of length max(1, memory - k + 1) over the new
/// symbols, so for memory <= k they are exactly L_k(X).
Sft k_block_presentation(const Sft& s, std::size_t k);

bool is_irreducible(const Sft& s);

/// Minimal DFA of L(X), factor-closed (every live state terminal) plus a sink.
Dfa language_dfa(const Sft& s);

/// Card(L_n(X)), exact.
BigInt count_words(const Sft& s, std::size_t n);

/// L_n(X) in radix order.
std::vector<std::string> factors(const Sft& s, std::size_t n, std::size_t cap = 1u << 20);

/// Parses the shift spec text: an `alphabet <symbols>` line, then either one forbidden
/// block per line or an `adjacency` line followed by one matrix row per letter.
/// Lines starting with '#' are comments.
Sft parse_shift_spec(std::string_view text);
Sft load_shift_spec(const std::filesystem::path& path);

/// Backward word counts: result[m][q] = number of accepted words of length m read from q.
std::vector<std::vector<BigInt>> accepted_counts(const Dfa& d, std::size_t max_len);

} // namespace ratdense
