#include "ratdense/sft.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "ratdense/detail/nfa.hpp"
#include "ratdense/error.hpp"

namespace ratdense {

double big_ratio(const BigInt& num, const BigInt& den) {
    if (den == 0) {
        throw InvalidArgumentError("division by zero count");
    }
    if (num == 0) {
        return 0.0;
    }
    const std::size_t bits = boost::multiprecision::msb(den);
    const std::size_t shift = bits > 62 ? bits - 62 : 0;
    BigInt n = num >> shift;
    BigInt d = den >> shift;
    return n.convert_to<double>() / d.convert_to<double>();
}

Sft::Sft(std::string alphabet, std::size_t memory, std::vector<std::string> vertex_names,
         std::vector<LabeledEdge> edges)
    : alphabet_(std::move(alphabet)), memory_(memory) {
    const std::size_t n = vertex_names.size();
    for (const auto& e : edges) {
        if (e.from >= n || e.to >= n || e.label >= alphabet_.size()) {
            throw InvalidArgumentError("edge refers to an unknown vertex or symbol");
        }
    }
    // Iteratively drop vertices lacking an incoming or an outgoing edge.
    std::vector<bool> alive(n, true);
    std::vector<std::size_t> indeg(n, 0), outdeg(n, 0);
    for (const auto& e : edges) {
        ++outdeg[e.from];
        ++indeg[e.to];
    }
    std::vector<std::vector<std::size_t>> in_edges(n), out_edges(n);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        out_edges[edges[i].from].push_back(i);
        in_edges[edges[i].to].push_back(i);
    }
    std::vector<std::size_t> stack;
    for (std::size_t v = 0; v < n; ++v) {
        if (indeg[v] == 0 || outdeg[v] == 0) {
            alive[v] = false;
            stack.push_back(v);
        }
    }
    while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t i : out_edges[v]) {
            std::size_t w = edges[i].to;
            if (w != v && alive[w] && --indeg[w] == 0) {
                alive[w] = false;
                stack.push_back(w);
            }
        }
        for (std::size_t i : in_edges[v]) {
            std::size_t u = edges[i].from;
            if (u != v && alive[u] && --outdeg[u] == 0) {
                alive[u] = false;
                stack.push_back(u);
            }
        }
    }
    std::vector<std::size_t> renumber(n, SIZE_MAX);
    for (std::size_t v = 0; v < n; ++v) {
        if (alive[v]) {
            renumber[v] = vertex_names_.size();
            vertex_names_.push_back(std::move(vertex_names[v]));
        }
    }
    if (vertex_names_.empty()) {
        throw EmptyShiftError("the shift is empty");
    }
    for (const auto& e : edges) {
        if (alive[e.from] && alive[e.to]) {
            edges_.push_back({renumber[e.from], renumber[e.to], e.label});
        }
    }
    std::stable_sort(edges_.begin(), edges_.end(), [](const LabeledEdge& x, const LabeledEdge& y) {
        return std::tie(x.from, x.label, x.to) < std::tie(y.from, y.label, y.to);
    });
    out_.resize(vertex_names_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        out_[edges_[i].from].push_back(i);
    }
    for (char c : alphabet_) {
        symbol_names_.emplace_back(1, c);
    }
}

std::uint64_t Sft::adjacency(std::size_t i, std::size_t j) const {
    std::uint64_t count = 0;
    for (std::size_t e : out_[i]) {
        count += edges_[e].to == j;
    }
    return count;
}

std::vector<std::vector<std::uint64_t>> Sft::adjacency_matrix() const {
    std::vector<std::vector<std::uint64_t>> m(num_vertices(), std::vector<std::uint64_t>(num_vertices(), 0));
    for (const auto& e : edges_) {
        ++m[e.from][e.to];
    }
    return m;
}

bool Sft::is_deterministic() const {
    for (const auto& out : out_) {
        for (std::size_t i = 1; i < out.size(); ++i) {
            if (edges_[out[i]].label == edges_[out[i - 1]].label) {
                return false;
            }
        }
    }
    return true;
}

void Sft::set_symbol_names(std::vector<std::string> names) {
    if (names.size() != alphabet_.size()) {
        throw InvalidArgumentError("one name per symbol is required");
    }
    symbol_names_ = std::move(names);
}

namespace {

bool has_forbidden_factor(std::string_view word, const std::vector<std::string>& blocks) {
    for (const auto& b : blocks) {
        if (word.find(b) != std::string_view::npos) {
            return true;
        }
    }
    return false;
}

// Words of length `len` over `alphabet` in radix order, filtered by `keep`.
template <typename Keep>
std::vector<std::string> enumerate_words(std::string_view alphabet, std::size_t len, std::size_t cap, Keep keep) {
    std::vector<std::string> out;
    std::vector<std::string> level{std::string()};
    for (std::size_t l = 0; l < len; ++l) {
        std::vector<std::string> next;
        for (const auto& w : level) {
            for (char c : alphabet) {
                std::string x = w + c;
                // Every prefix of a kept word must survive, so prune early.
                if (keep(x)) {
                    next.push_back(std::move(x));
                    if (next.size() > cap) {
                        throw CapExceededError("too many words of length " + std::to_string(l + 1));
                    }
                }
            }
        }
        level = std::move(next);
    }
    return level;
}

// Symbols for block presentations: printable ASCII not reserved by the regex grammar.
const std::string& symbol_pool() {
    static const std::string pool = [] {
        std::string p;
        for (char c = 'A'; c <= 'Z'; ++c) p += c;
        for (char c = 'a'; c <= 'z'; ++c) p += c;
        for (char c = '0'; c <= '9'; ++c) p += c;
        p += "!\"#$&',-/:;<=>?@[\\]^_`{}~+";
        return p;
    }();
    return pool;
}

} // namespace

Sft sft_from_forbidden_blocks(std::string_view alphabet, const std::vector<std::string>& blocks,
                              std::size_t max_vertices) {
    validate_alphabet(alphabet);
    std::size_t k = 1;
    for (const auto& b : blocks) {
        if (b.empty()) {
            throw InvalidArgumentError("forbidden blocks must be nonempty");
        }
        for (char c : b) {
            if (alphabet.find(c) == std::string_view::npos) {
                throw UnknownSymbolError(c);
            }
        }
        k = std::max(k, b.size());
    }
    const std::size_t memory = k - 1;
    auto allowed = [&](const std::string& w) { return !has_forbidden_factor(w, blocks); };
    std::vector<std::string> vertices = enumerate_words(alphabet, memory, max_vertices, allowed);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        index.emplace(vertices[i], i);
    }
    std::vector<LabeledEdge> edges;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        for (std::size_t a = 0; a < alphabet.size(); ++a) {
            std::string block = vertices[v] + alphabet[a];
            if (!allowed(block)) {
                continue;
            }
            auto it = index.find(block.substr(1));
            if (it != index.end()) {
                edges.push_back({v, it->second, a});
            }
        }
    }
    return Sft(std::string(alphabet), memory, std::move(vertices), std::move(edges));
}

Sft sft_from_adjacency(std::string_view alphabet, const std::vector<std::vector<int>>& matrix) {
    validate_alphabet(alphabet);
    const std::size_t n = alphabet.size();
    if (matrix.size() != n) {
        throw InvalidArgumentError("adjacency matrix must have one row per letter");
    }
    std::vector<std::string> names;
    std::vector<LabeledEdge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        names.emplace_back(1, alphabet[i]);
        if (matrix[i].size() != n) {
            throw InvalidArgumentError("adjacency matrix must be square");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (matrix[i][j] < 0 || matrix[i][j] > 1) {
                throw InvalidArgumentError("adjacency entries must be 0 or 1");
            }
            if (matrix[i][j]) {
                edges.push_back({i, j, j});
            }
        }
    }
    return Sft(std::string(alphabet), 1, std::move(names), std::move(edges));
}

Dfa language_dfa(const Sft& s) {
    detail::Nfa nfa;
    nfa.alphabet = s.alphabet();
    for (std::size_t v = 0; v < s.num_vertices(); ++v) {
        nfa.add_state(true);
        nfa.start.push_back(static_cast<State>(v));
    }
    for (const auto& e : s.edges()) {
        nfa.edges[e.from].push_back({e.label, static_cast<State>(e.to)});
    }
    return minimize(detail::determinize(nfa));
}

std::vector<std::vector<BigInt>> accepted_counts(const Dfa& d, std::size_t max_len) {
    const std::size_t n = d.num_states();
    std::vector<std::vector<BigInt>> out(max_len + 1, std::vector<BigInt>(n));
    for (std::size_t q = 0; q < n; ++q) {
        out[0][q] = d.is_terminal(static_cast<State>(q)) ? 1 : 0;
    }
    for (std::size_t m = 1; m <= max_len; ++m) {
        for (std::size_t q = 0; q < n; ++q) {
            BigInt sum = 0;
            for (State t : d.row(static_cast<State>(q))) {
                sum += out[m - 1][t];
            }
            out[m][q] = std::move(sum);
        }
    }
    return out;
}

BigInt count_words(const Sft& s, std::size_t n) {
    const Dfa d = language_dfa(s);
    std::vector<BigInt> paths(d.num_states(), 0);
    paths[d.initial()] = 1;
    for (std::size_t step = 0; step < n; ++step) {
        std::vector<BigInt> next(d.num_states(), 0);
        for (std::size_t q = 0; q < d.num_states(); ++q) {
            if (paths[q] == 0) {
                continue;
            }
            for (State t : d.row(static_cast<State>(q))) {
                next[t] += paths[q];
            }
        }
        paths = std::move(next);
    }
    BigInt total = 0;
    for (std::size_t q = 0; q < d.num_states(); ++q) {
        if (d.is_terminal(static_cast<State>(q))) {
            total += paths[q];
        }
    }
    return total;
}

std::vector<std::string> factors(const Sft& s, std::size_t n, std::size_t cap) {
    const Dfa d = language_dfa(s);
    // Prune on the live states: language_dfa is factor closed, so live = terminal.
    std::vector<std::pair<std::string, State>> level{{std::string(), d.initial()}};
    for (std::size_t l = 0; l < n; ++l) {
        std::vector<std::pair<std::string, State>> next;
        for (const auto& [w, q] : level) {
            for (std::size_t a = 0; a < d.alphabet_size(); ++a) {
                State t = d.next(q, a);
                if (d.is_terminal(t)) {
                    next.emplace_back(w + d.alphabet()[a], t);
                    if (next.size() > cap) {
                        throw CapExceededError("too many factors of length " + std::to_string(l + 1));
                    }
                }
            }
        }
        level = std::move(next);
    }
    std::vector<std::string> out;
    out.reserve(level.size());
    for (auto& [w, q] : level) {
        out.push_back(std::move(w));
    }
    return out;
}

Sft k_block_presentation(const Sft& s, std::size_t k) {
    if (k == 0) {
        throw InvalidArgumentError("block length must be at least 1");
    }
    const std::size_t m = std::max<std::size_t>(1, s.memory() >= k ? s.memory() - k + 1 : 1);
    const std::vector<std::string> blocks = factors(s, k);
    if (blocks.size() > symbol_pool().size()) {
        throw CapExceededError("k-block alphabet needs " + std::to_string(blocks.size()) + " symbols");
    }
    std::string alphabet = symbol_pool().substr(0, blocks.size());
    std::unordered_map<std::string, std::size_t> symbol_of;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        symbol_of.emplace(blocks[i], i);
    }
    // A vertex is a word of L_{m+k-1}(X) read as m overlapping k-blocks.
    const std::vector<std::string> words = factors(s, m + k - 1);
    const std::vector<std::string> longer = factors(s, m + k);
    std::unordered_map<std::string, std::size_t> vertex_of;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < words.size(); ++i) {
        vertex_of.emplace(words[i], i);
        std::string name;
        for (std::size_t j = 0; j < m; ++j) {
            name += alphabet[symbol_of.at(words[i].substr(j, k))];
        }
        names.push_back(std::move(name));
    }
    std::vector<LabeledEdge> edges;
    for (const auto& w : longer) {
        std::size_t from = vertex_of.at(w.substr(0, m + k - 1));
        std::size_t to = vertex_of.at(w.substr(1));
        edges.push_back({from, to, symbol_of.at(w.substr(m))});
    }
    Sft out(std::move(alphabet), m, std::move(names), std::move(edges));
    out.set_symbol_names(blocks);
    return out;
}

bool is_irreducible(const Sft& s) {
    const std::size_t n = s.num_vertices();
    std::vector<std::vector<std::size_t>> fwd(n), bwd(n);
    for (const auto& e : s.edges()) {
        fwd[e.from].push_back(e.to);
        bwd[e.to].push_back(e.from);
    }
    auto reaches_all = [n](const std::vector<std::vector<std::size_t>>& g) {
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w : g[v]) {
                if (!seen[w]) {
                    seen[w] = true;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == n;
    };
    return reaches_all(fwd) && reaches_all(bwd);
}

Sft parse_shift_spec(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::string alphabet;
    bool have_alphabet = false;
    std::vector<std::string> blocks;
    std::vector<std::vector<int>> matrix;
    bool reading_matrix = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::istringstream fields(line);
        std::string head;
        if (!(fields >> head) || head[0] == '#') {
            continue;
        }
        if (!have_alphabet) {
            if (head != "alphabet" || !(fields >> alphabet)) {
                throw InvalidArgumentError("line " + std::to_string(line_no) + ": expected 'alphabet <symbols>'");
            }
            validate_alphabet(alphabet);
            have_alphabet = true;
            continue;
        }
        if (head == "adjacency") {
            if (!blocks.empty() || reading_matrix) {
                throw InvalidArgumentError("line " + std::to_string(line_no) + ": mixed block and matrix forms");
            }
            reading_matrix = true;
            continue;
        }
        if (reading_matrix) {
            std::vector<int> row;
            std::istringstream values(line);
            int x;
            while (values >> x) {
                row.push_back(x);
            }
            if (!values.eof()) {
                throw InvalidArgumentError("line " + std::to_string(line_no) + ": bad matrix entry");
            }
            matrix.push_back(std::move(row));
        } else {
            blocks.push_back(head);
        }
    }
    if (!have_alphabet) {
        throw InvalidArgumentError("shift spec has no alphabet line");
    }
    if (reading_matrix) {
        return sft_from_adjacency(alphabet, matrix);
    }
    return sft_from_forbidden_blocks(alphabet, blocks);
}

Sft load_shift_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgumentError("cannot open shift spec '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_shift_spec(buffer.str());
}

} // namespace ratdense
