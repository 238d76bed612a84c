#include "ratdense/automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <queue>
#include <unordered_map>

#include "ratdense/detail/nfa.hpp"
#include "ratdense/error.hpp"

namespace ratdense {

namespace {

constexpr std::string_view kReserved = "()|*.%";

} // namespace

Dfa::Dfa(std::string alphabet, std::vector<State> transitions, State initial, std::vector<bool> terminal)
    : alphabet_(std::move(alphabet)),
      transitions_(std::move(transitions)),
      initial_(initial),
      terminal_(std::move(terminal)) {
    const std::size_t n = terminal_.size();
    if (n == 0) {
        throw InvalidArgumentError("automaton needs at least one state");
    }
    if (transitions_.size() != n * alphabet_.size()) {
        throw InvalidArgumentError("transition table is not total");
    }
    if (initial_ >= n) {
        throw InvalidArgumentError("initial state out of range");
    }
    for (State t : transitions_) {
        if (t >= n) {
            throw InvalidArgumentError("transition target out of range");
        }
    }
}

int Dfa::letter_index(char symbol) const noexcept {
    auto pos = alphabet_.find(symbol);
    return pos == std::string::npos ? -1 : static_cast<int>(pos);
}

State Dfa::run(std::string_view word, State from) const {
    State q = from;
    for (char c : word) {
        int a = letter_index(c);
        if (a < 0) {
            throw UnknownSymbolError(c);
        }
        q = next(q, static_cast<std::size_t>(a));
    }
    return q;
}

void validate_alphabet(std::string_view alphabet) {
    if (alphabet.empty()) {
        throw InvalidArgumentError("alphabet must not be empty");
    }
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        char c = alphabet[i];
        if (kReserved.find(c) != std::string_view::npos || c == ' ' || static_cast<unsigned char>(c) >= 0x80 ||
            c < 0x21) {
            throw InvalidArgumentError(std::string("symbol '") + c + "' cannot be used in an alphabet");
        }
        if (alphabet.find(c, i + 1) != std::string_view::npos) {
            throw InvalidArgumentError(std::string("duplicate symbol '") + c + "' in alphabet");
        }
    }
}

// ---------------------------------------------------------------------------
// Regex parsing

namespace {

struct RegexNode {
    enum class Kind { empty_set, epsilon, symbols, concat, alternation, star };
    Kind kind;
    std::vector<std::size_t> letters; // for symbols
    std::unique_ptr<RegexNode> left, right;
};

using NodePtr = std::unique_ptr<RegexNode>;

NodePtr make_node(RegexNode::Kind kind, NodePtr left = nullptr, NodePtr right = nullptr) {
    auto n = std::make_unique<RegexNode>();
    n->kind = kind;
    n->left = std::move(left);
    n->right = std::move(right);
    return n;
}

class RegexParser {
public:
    RegexParser(std::string_view text, std::string_view alphabet) : text_(text), alphabet_(alphabet) {}

    NodePtr parse() {
        skip_spaces();
        NodePtr n = parse_alternation();
        skip_spaces();
        if (pos_ != text_.size()) {
            if (text_[pos_] == ')') {
                throw SyntaxError("unbalanced ')'", pos_);
            }
            throw SyntaxError("unexpected character", pos_);
        }
        return n;
    }

private:
    void skip_spaces() {
        while (pos_ < text_.size() && text_[pos_] == ' ') {
            ++pos_;
        }
    }

    bool at_end() {
        skip_spaces();
        return pos_ >= text_.size();
    }

    bool starts_with(std::string_view token) const { return text_.substr(pos_).starts_with(token); }

    NodePtr parse_alternation() {
        NodePtr left = parse_concat();
        while (!at_end() && text_[pos_] == '|') {
            ++pos_;
            NodePtr right = parse_concat();
            left = make_node(RegexNode::Kind::alternation, std::move(left), std::move(right));
        }
        return left;
    }

    bool atom_starts() {
        if (at_end()) {
            return false;
        }
        char c = text_[pos_];
        return c != '|' && c != ')' && c != '*';
    }

    NodePtr parse_concat() {
        if (!atom_starts()) {
            if (!at_end() && text_[pos_] == '*') {
                throw SyntaxError("'*' without operand", pos_);
            }
            throw SyntaxError("empty expression", pos_);
        }
        NodePtr left = parse_repeat();
        while (atom_starts()) {
            NodePtr right = parse_repeat();
            left = make_node(RegexNode::Kind::concat, std::move(left), std::move(right));
        }
        return left;
    }

    NodePtr parse_repeat() {
        NodePtr n = parse_atom();
        while (!at_end() && text_[pos_] == '*') {
            ++pos_;
            n = make_node(RegexNode::Kind::star, std::move(n));
        }
        return n;
    }

    NodePtr parse_atom() {
        skip_spaces();
        std::size_t start = pos_;
        if (starts_with("ε") || starts_with("%e")) {
            pos_ += starts_with("ε") ? std::string_view("ε").size() : 2;
            return make_node(RegexNode::Kind::epsilon);
        }
        if (starts_with("∅") || starts_with("%0")) {
            pos_ += starts_with("∅") ? std::string_view("∅").size() : 2;
            return make_node(RegexNode::Kind::empty_set);
        }
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_alternation();
            if (at_end() || text_[pos_] != ')') {
                throw SyntaxError("missing ')'", at_end() ? text_.size() : pos_);
            }
            ++pos_;
            return inner;
        }
        if (c == '.') {
            ++pos_;
            auto n = make_node(RegexNode::Kind::symbols);
            for (std::size_t a = 0; a < alphabet_.size(); ++a) {
                n->letters.push_back(a);
            }
            return n;
        }
        if (c == '%') {
            throw SyntaxError("unknown escape", start);
        }
        if (static_cast<unsigned char>(c) >= 0x80) {
            throw SyntaxError("unexpected non-ASCII character", start);
        }
        auto idx = alphabet_.find(c);
        if (idx == std::string_view::npos) {
            throw UnknownSymbolError(c);
        }
        ++pos_;
        auto n = make_node(RegexNode::Kind::symbols);
        n->letters.push_back(idx);
        return n;
    }

    std::string_view text_;
    std::string_view alphabet_;
    std::size_t pos_ = 0;
};

struct Fragment {
    State in;
    State out;
};

// Thompson construction: each fragment has one entry and one exit state.
Fragment build_thompson(const RegexNode& node, detail::Nfa& nfa) {
    using Kind = RegexNode::Kind;
    switch (node.kind) {
    case Kind::empty_set: {
        State in = nfa.add_state();
        State out = nfa.add_state();
        return {in, out};
    }
    case Kind::epsilon: {
        State in = nfa.add_state();
        State out = nfa.add_state();
        nfa.epsilon[in].push_back(out);
        return {in, out};
    }
    case Kind::symbols: {
        State in = nfa.add_state();
        State out = nfa.add_state();
        for (std::size_t a : node.letters) {
            nfa.edges[in].push_back({a, out});
        }
        return {in, out};
    }
    case Kind::concat: {
        Fragment l = build_thompson(*node.left, nfa);
        Fragment r = build_thompson(*node.right, nfa);
        nfa.epsilon[l.out].push_back(r.in);
        return {l.in, r.out};
    }
    case Kind::alternation: {
        Fragment l = build_thompson(*node.left, nfa);
        Fragment r = build_thompson(*node.right, nfa);
        State in = nfa.add_state();
        State out = nfa.add_state();
        nfa.epsilon[in].push_back(l.in);
        nfa.epsilon[in].push_back(r.in);
        nfa.epsilon[l.out].push_back(out);
        nfa.epsilon[r.out].push_back(out);
        return {in, out};
    }
    case Kind::star: {
        Fragment body = build_thompson(*node.left, nfa);
        State in = nfa.add_state();
        State out = nfa.add_state();
        nfa.epsilon[in].push_back(body.in);
        nfa.epsilon[in].push_back(out);
        nfa.epsilon[body.out].push_back(body.in);
        nfa.epsilon[body.out].push_back(out);
        return {in, out};
    }
    }
    return {0, 0};
}

Dfa trim_unreachable(const Dfa& d) {
    std::vector<State> order;
    std::vector<int> index(d.num_states(), -1);
    order.push_back(d.initial());
    index[d.initial()] = 0;
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (State t : d.row(order[head])) {
            if (index[t] < 0) {
                index[t] = static_cast<int>(order.size());
                order.push_back(t);
            }
        }
    }
    const std::size_t k = d.alphabet_size();
    std::vector<State> trans(order.size() * k);
    std::vector<bool> term(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        term[i] = d.is_terminal(order[i]);
        for (std::size_t a = 0; a < k; ++a) {
            trans[i * k + a] = static_cast<State>(index[d.next(order[i], a)]);
        }
    }
    return Dfa(d.alphabet(), std::move(trans), 0, std::move(term));
}

template <typename Combine>
Dfa product(const Dfa& d1, const Dfa& d2, Combine combine) {
    if (d1.alphabet() != d2.alphabet()) {
        throw AlphabetMismatchError("alphabets differ: '" + d1.alphabet() + "' vs '" + d2.alphabet() + "'");
    }
    const std::size_t k = d1.alphabet_size();
    const std::size_t n2 = d2.num_states();
    std::unordered_map<std::size_t, State> index;
    std::vector<std::pair<State, State>> states;
    auto intern = [&](State p, State q) {
        auto [it, fresh] = index.try_emplace(p * n2 + q, static_cast<State>(states.size()));
        if (fresh) {
            states.emplace_back(p, q);
        }
        return it->second;
    };
    intern(d1.initial(), d2.initial());
    std::vector<State> trans;
    for (std::size_t head = 0; head < states.size(); ++head) {
        auto [p, q] = states[head];
        for (std::size_t a = 0; a < k; ++a) {
            trans.push_back(intern(d1.next(p, a), d2.next(q, a)));
        }
    }
    std::vector<bool> term(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        term[i] = combine(d1.is_terminal(states[i].first), d2.is_terminal(states[i].second));
    }
    return minimize(Dfa(d1.alphabet(), std::move(trans), 0, std::move(term)));
}

} // namespace

namespace detail {

Dfa determinize(const Nfa& nfa, std::size_t max_states) {
    const std::size_t k = nfa.alphabet.size();
    auto closure = [&](std::vector<State> set) {
        std::vector<bool> seen(nfa.size(), false);
        std::vector<State> stack;
        for (State s : set) {
            if (!seen[s]) {
                seen[s] = true;
                stack.push_back(s);
            }
        }
        std::vector<State> out;
        while (!stack.empty()) {
            State s = stack.back();
            stack.pop_back();
            out.push_back(s);
            for (State t : nfa.epsilon[s]) {
                if (!seen[t]) {
                    seen[t] = true;
                    stack.push_back(t);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    };

    std::map<std::vector<State>, State> index;
    std::vector<std::vector<State>> subsets;
    auto intern = [&](std::vector<State> set) {
        auto [it, fresh] = index.try_emplace(set, static_cast<State>(subsets.size()));
        if (fresh) {
            if (subsets.size() >= max_states) {
                throw CapExceededError("subset construction exceeded " + std::to_string(max_states) + " states");
            }
            subsets.push_back(std::move(set));
        }
        return it->second;
    };
    intern(closure(nfa.start));
    std::vector<State> trans;
    std::vector<std::vector<State>> targets(k);
    for (std::size_t head = 0; head < subsets.size(); ++head) {
        for (auto& t : targets) {
            t.clear();
        }
        for (State s : subsets[head]) {
            for (const auto& e : nfa.edges[s]) {
                targets[e.letter].push_back(e.target);
            }
        }
        for (std::size_t a = 0; a < k; ++a) {
            trans.push_back(intern(closure(targets[a])));
        }
    }
    std::vector<bool> term(subsets.size(), false);
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        for (State s : subsets[i]) {
            if (nfa.accepting[s]) {
                term[i] = true;
                break;
            }
        }
    }
    return Dfa(nfa.alphabet, std::move(trans), 0, std::move(term));
}

} // namespace detail

Dfa parse_regex(std::string_view text, std::string_view alphabet) {
    validate_alphabet(alphabet);
    NodePtr ast = RegexParser(text, alphabet).parse();
    detail::Nfa nfa;
    nfa.alphabet = std::string(alphabet);
    Fragment f = build_thompson(*ast, nfa);
    nfa.start = {f.in};
    nfa.accepting[f.out] = true;
    return minimize(detail::determinize(nfa));
}

Dfa minimize(const Dfa& input) {
    const Dfa d = trim_unreachable(input);
    const std::size_t n = d.num_states();
    const std::size_t k = d.alphabet_size();

    // Moore refinement: split classes by (class, successor classes) signatures.
    std::vector<std::size_t> cls(n);
    for (std::size_t q = 0; q < n; ++q) {
        cls[q] = d.is_terminal(static_cast<State>(q)) ? 1 : 0;
    }
    std::size_t num_classes = 0;
    while (true) {
        std::map<std::vector<std::size_t>, std::size_t> sig_index;
        std::vector<std::size_t> next_cls(n);
        std::vector<std::size_t> sig(k + 1);
        for (std::size_t q = 0; q < n; ++q) {
            sig[0] = cls[q];
            for (std::size_t a = 0; a < k; ++a) {
                sig[a + 1] = cls[d.next(static_cast<State>(q), a)];
            }
            auto [it, fresh] = sig_index.try_emplace(sig, sig_index.size());
            next_cls[q] = it->second;
        }
        cls = std::move(next_cls);
        if (sig_index.size() == num_classes) {
            break;
        }
        num_classes = sig_index.size();
    }

    // Canonical breadth-first numbering of the quotient.
    std::vector<int> number(num_classes, -1);
    std::vector<State> rep;
    std::vector<State> representative(num_classes);
    for (std::size_t q = n; q-- > 0;) {
        representative[cls[q]] = static_cast<State>(q);
    }
    number[cls[d.initial()]] = 0;
    rep.push_back(representative[cls[d.initial()]]);
    for (std::size_t head = 0; head < rep.size(); ++head) {
        for (State t : d.row(rep[head])) {
            if (number[cls[t]] < 0) {
                number[cls[t]] = static_cast<int>(rep.size());
                rep.push_back(representative[cls[t]]);
            }
        }
    }
    std::vector<State> trans(rep.size() * k);
    std::vector<bool> term(rep.size());
    for (std::size_t i = 0; i < rep.size(); ++i) {
        term[i] = d.is_terminal(rep[i]);
        for (std::size_t a = 0; a < k; ++a) {
            trans[i * k + a] = static_cast<State>(number[cls[d.next(rep[i], a)]]);
        }
    }
    return Dfa(d.alphabet(), std::move(trans), 0, std::move(term));
}

Dfa intersect(const Dfa& d1, const Dfa& d2) {
    return product(d1, d2, [](bool x, bool y) { return x && y; });
}

Dfa unite(const Dfa& d1, const Dfa& d2) {
    return product(d1, d2, [](bool x, bool y) { return x || y; });
}

Dfa complement(const Dfa& d) {
    std::vector<bool> term(d.num_states());
    for (std::size_t q = 0; q < d.num_states(); ++q) {
        term[q] = !d.is_terminal(static_cast<State>(q));
    }
    return minimize(Dfa(d.alphabet(), d.transitions(), d.initial(), std::move(term)));
}

bool accepts(const Dfa& d, std::string_view word) {
    return d.is_terminal(d.run(word));
}

bool is_empty(const Dfa& d) {
    const Dfa m = minimize(d);
    for (bool t : m.terminals()) {
        if (t) {
            return false;
        }
    }
    return true;
}

bool equivalent(const Dfa& d1, const Dfa& d2) {
    return minimize(d1) == minimize(d2);
}

Dfa universal_dfa(std::string_view alphabet) {
    validate_alphabet(alphabet);
    return Dfa(std::string(alphabet), std::vector<State>(alphabet.size(), 0), 0, {true});
}

Dfa empty_dfa(std::string_view alphabet) {
    validate_alphabet(alphabet);
    return Dfa(std::string(alphabet), std::vector<State>(alphabet.size(), 0), 0, {false});
}

Dfa prefix_dfa(std::string_view prefix, std::string_view alphabet) {
    validate_alphabet(alphabet);
    const std::size_t k = alphabet.size();
    const std::size_t m = prefix.size();
    // states 0..m track the matched prefix length, m+1 is the sink
    const State sink = static_cast<State>(m + 1);
    std::vector<State> trans((m + 2) * k, sink);
    for (std::size_t i = 0; i < m; ++i) {
        auto a = alphabet.find(prefix[i]);
        if (a == std::string_view::npos) {
            throw UnknownSymbolError(prefix[i]);
        }
        trans[i * k + a] = static_cast<State>(i + 1);
    }
    for (std::size_t a = 0; a < k; ++a) {
        trans[m * k + a] = static_cast<State>(m);
    }
    std::vector<bool> term(m + 2, false);
    term[m] = true;
    return minimize(Dfa(std::string(alphabet), std::move(trans), 0, std::move(term)));
}

} // namespace ratdense
