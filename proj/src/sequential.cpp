#include "ratdense/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>

#include "ratdense/density.hpp"
#include "ratdense/error.hpp"

namespace ratdense {

struct MeasureSequence::State {
    SequenceKind kind = SequenceKind::generator;
    std::string description;
    std::string alphabet;
    std::size_t n_min = 0;
    std::size_t max_index = SIZE_MAX;
    std::optional<Measure> limit;

    // bernoulli_formula
    double c = 0.0;
    double alpha = 0.0;

    // explicit_list / constant
    std::vector<std::shared_ptr<const Measure>> list;

    // generator / maxent_family
    std::function<Measure(std::size_t)> generator;
    std::mutex mutex;
    std::map<std::size_t, std::shared_ptr<const Measure>> cache;

    double formula_p(std::size_t n) const {
        double p = c * std::pow(static_cast<double>(n), -alpha);
        return std::clamp(p, 0.0, 1.0);
    }
};

namespace {

Measure first_letter_bernoulli(const std::string& alphabet, double p) {
    std::vector<double> prob(alphabet.size(), (1.0 - p) / static_cast<double>(alphabet.size() - 1));
    prob[0] = p;
    return Measure::bernoulli(alphabet, std::move(prob));
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_bar(std::string_view s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find('|', start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

} // namespace

MeasureSequence::MeasureSequence(std::shared_ptr<State> state) : state_(std::move(state)) {}

MeasureSequence MeasureSequence::bernoulli_formula(std::string alphabet, double c, double alpha) {
    validate_alphabet(alphabet);
    if (alphabet.size() < 2) {
        throw InvalidArgumentError("a Bernoulli formula needs at least two letters");
    }
    if (!std::isfinite(c) || !std::isfinite(alpha) || c < 0.0) {
        throw InvalidArgumentError("invalid Bernoulli formula parameters");
    }
    auto st = std::make_shared<State>();
    st->kind = SequenceKind::bernoulli_formula;
    st->alphabet = alphabet;
    st->c = c;
    st->alpha = alpha;
    st->n_min = 1;
    std::ostringstream desc;
    desc << "p_n(" << alphabet[0] << ") = " << c << "*n^" << -alpha;
    st->description = desc.str();
    double limit_p = alpha > 0.0 ? 0.0 : (alpha == 0.0 ? std::min(c, 1.0) : (c > 0.0 ? 1.0 : 0.0));
    st->limit = first_letter_bernoulli(alphabet, limit_p);
    return MeasureSequence(st);
}

MeasureSequence MeasureSequence::constant(Measure m) {
    auto st = std::make_shared<State>();
    st->kind = SequenceKind::constant;
    st->alphabet = m.alphabet();
    st->description = "constant";
    st->limit = m;
    st->list.push_back(std::make_shared<const Measure>(std::move(m)));
    return MeasureSequence(st);
}

MeasureSequence MeasureSequence::explicit_list(std::vector<Measure> list) {
    if (list.empty()) {
        throw InvalidArgumentError("empty measure list");
    }
    auto st = std::make_shared<State>();
    st->kind = SequenceKind::explicit_list;
    st->alphabet = list.front().alphabet();
    for (auto& m : list) {
        if (m.alphabet() != st->alphabet) {
            throw AlphabetMismatchError("measure list mixes alphabets");
        }
        st->list.push_back(std::make_shared<const Measure>(std::move(m)));
    }
    st->limit = *st->list.back();
    st->description = "list of " + std::to_string(st->list.size()) + " measures";
    return MeasureSequence(st);
}

MeasureSequence MeasureSequence::eventually_constant(Measure before, Measure after, std::size_t switch_at) {
    if (before.alphabet() != after.alphabet()) {
        throw AlphabetMismatchError("measures over different alphabets");
    }
    auto st = std::make_shared<State>();
    st->kind = SequenceKind::explicit_list;
    st->alphabet = before.alphabet();
    auto first = std::make_shared<const Measure>(std::move(before));
    st->list.assign(switch_at, first);
    st->list.push_back(std::make_shared<const Measure>(std::move(after)));
    st->limit = *st->list.back();
    st->description = "switch at " + std::to_string(switch_at);
    return MeasureSequence(st);
}

MeasureSequence MeasureSequence::maxent_family(int family, std::size_t max_index) {
    if (family != 1 && family != 2) {
        throw InvalidArgumentError("unknown family " + std::to_string(family));
    }
    std::optional<Measure> limit;
    if (family == 1) {
        limit = Measure::bernoulli("abc", {0.0, 0.5, 0.5});
    } else {
        limit = Measure::bernoulli("abc", {1.0 / 3, 1.0 / 3, 1.0 / 3});
        max_index = std::min<std::size_t>(max_index, 16);
    }
    MeasureSequence seq = from_generator(
        [family](std::size_t n) { return max_entropy(counterexample_family(family, n)); }, family == 1 ? 1 : 2,
        "maxent family" + std::to_string(family), std::move(limit));
    seq.state_->kind = SequenceKind::maxent_family;
    seq.state_->alphabet = "abc";
    seq.state_->max_index = max_index;
    return seq;
}

MeasureSequence MeasureSequence::from_generator(std::function<Measure(std::size_t)> generator, std::size_t n_min,
                                                std::string description, std::optional<Measure> limit) {
    auto st = std::make_shared<State>();
    st->kind = SequenceKind::generator;
    st->generator = std::move(generator);
    st->n_min = n_min;
    st->description = std::move(description);
    st->limit = std::move(limit);
    if (st->limit) {
        st->alphabet = st->limit->alphabet();
    } else {
        st->alphabet = st->generator(n_min).alphabet();
    }
    return MeasureSequence(st);
}

SequenceKind MeasureSequence::kind() const noexcept { return state_->kind; }
const std::string& MeasureSequence::description() const noexcept { return state_->description; }
const std::string& MeasureSequence::alphabet() const noexcept { return state_->alphabet; }
std::size_t MeasureSequence::n_min() const noexcept { return state_->n_min; }
const std::optional<Measure>& MeasureSequence::limit() const noexcept { return state_->limit; }

std::optional<double> MeasureSequence::first_letter_probability(std::size_t i) const {
    if (state_->kind != SequenceKind::bernoulli_formula) {
        return std::nullopt;
    }
    return state_->formula_p(std::max(i, state_->n_min));
}

std::shared_ptr<const Measure> MeasureSequence::at(std::size_t i) const {
    State& st = *state_;
    i = std::max(i, st.n_min);
    switch (st.kind) {
    case SequenceKind::bernoulli_formula:
        return std::make_shared<const Measure>(first_letter_bernoulli(st.alphabet, st.formula_p(i)));
    case SequenceKind::constant:
    case SequenceKind::explicit_list:
        return st.list[std::min(i, st.list.size() - 1)];
    case SequenceKind::maxent_family:
    case SequenceKind::generator:
        break;
    }
    if (i > st.max_index) {
        throw CapExceededError(st.description + ": index " + std::to_string(i) + " exceeds cap " +
                               std::to_string(st.max_index));
    }
    {
        std::lock_guard lock(st.mutex);
        auto it = st.cache.find(i);
        if (it != st.cache.end()) {
            return it->second;
        }
    }
    auto m = std::make_shared<const Measure>(st.generator(i));
    std::lock_guard lock(st.mutex);
    return st.cache.try_emplace(i, std::move(m)).first->second;
}

MeasureSequence make_sequence(std::string_view text, const std::string& base_dir) {
    std::string spec = trim(text);
    std::istringstream in(spec);
    std::string kind;
    in >> kind;
    std::string rest;
    std::getline(in, rest);
    rest = trim(rest);
    if (kind == "bernoulli") {
        static const std::regex formula(
            R"(p_n\s*=\s*(?:([0-9.eE+-]+)\s*\*?\s*)?(?:n\s*\^\s*([-+0-9.eE]+))?\s+over\s+([A-Za-z0-9_,\s]+))");
        std::smatch match;
        if (!std::regex_match(rest, match, formula) || (!match[1].matched && !match[2].matched)) {
            throw InvalidArgumentError("expected 'p_n = c*n^e over a,b', got '" + rest + "'");
        }
        double c = 1.0, e = 0.0;
        try {
            if (match[1].matched) {
                c = std::stod(match[1].str());
            }
            if (match[2].matched) {
                e = std::stod(match[2].str());
            }
        } catch (const std::exception&) {
            throw InvalidArgumentError("bad number in '" + rest + "'");
        }
        std::string letters;
        for (char ch : match[3].str()) {
            if (ch != ',' && !std::isspace(static_cast<unsigned char>(ch))) {
                letters.push_back(ch);
            }
        }
        return MeasureSequence::bernoulli_formula(letters, c, -e);
    }
    if (kind == "constant") {
        return MeasureSequence::constant(parse_measure_spec(rest, base_dir));
    }
    if (kind == "maxent") {
        std::istringstream r(rest);
        std::string family, option;
        r >> family;
        std::size_t fixed = 0;
        while (r >> option) {
            if (option == "gap=n") {
                continue;
            }
            if (option.starts_with("gap=")) {
                try {
                    fixed = std::stoul(option.substr(4));
                } catch (const std::exception&) {
                    throw InvalidArgumentError("bad gap '" + option + "'");
                }
                continue;
            }
            throw InvalidArgumentError("unknown maxent option '" + option + "'");
        }
        int id = family == "family1" ? 1 : family == "family2" ? 2 : 0;
        if (id == 0) {
            throw InvalidArgumentError("unknown family '" + family + "'");
        }
        if (fixed > 0) {
            return MeasureSequence::constant(max_entropy(counterexample_family(id, fixed)));
        }
        return MeasureSequence::maxent_family(id);
    }
    if (kind == "list") {
        std::vector<Measure> list;
        for (const auto& part : split_bar(rest)) {
            list.push_back(parse_measure_spec(part, base_dir));
        }
        return MeasureSequence::explicit_list(std::move(list));
    }
    if (kind == "eventually") {
        static const std::regex head(R"(n0\s*=\s*([0-9]+)\s+(.*))");
        std::smatch match;
        if (!std::regex_match(rest, match, head)) {
            throw InvalidArgumentError("expected 'eventually n0=K <measure> | <measure>'");
        }
        auto parts = split_bar(match[2].str());
        if (parts.size() != 2) {
            throw InvalidArgumentError("expected two measures separated by '|'");
        }
        return MeasureSequence::eventually_constant(parse_measure_spec(parts[0], base_dir),
                                                    parse_measure_spec(parts[1], base_dir),
                                                    std::stoul(match[1].str()));
    }
    throw InvalidArgumentError("unknown sequence kind '" + kind + "'");
}

double sequential_term(const MeasureSequence& seq, const Dfa& d, std::size_t i) {
    return std::clamp(slice_mass(lift_chain(d, seq(i)), i), 0.0, 1.0);
}

double cesaro_partial(const std::vector<double>& terms, std::size_t n) {
    if (n == 0 || n > terms.size()) {
        throw InvalidArgumentError("partial index out of range");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += terms[i];
    }
    return sum / static_cast<double>(n);
}

namespace {

bool is_contains_first_letter(const Dfa& d, const std::string& seq_alphabet) {
    std::string a = d.alphabet(), b = seq_alphabet;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
        return false;
    }
    std::string any = "(";
    for (std::size_t i = 0; i < d.alphabet().size(); ++i) {
        if (i > 0) {
            any += '|';
        }
        any += d.alphabet()[i];
    }
    any += ")*";
    return equivalent(d, parse_regex(any + seq_alphabet[0] + any, d.alphabet()));
}

} // namespace

TraceSummary summarize_trace(const std::vector<double>& terms, const SequentialOptions& options) {
    const std::size_t n = terms.size();
    if (n == 0) {
        throw InvalidArgumentError("empty term trace");
    }
    std::vector<std::size_t> checkpoints;
    for (std::size_t k : options.checkpoints) {
        if (k >= 1 && k <= n) {
            checkpoints.push_back(k);
        }
    }
    checkpoints.push_back(n);
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

    TraceSummary s;
    s.window = std::max<std::size_t>(1, std::min<std::size_t>(n / 4, 1000));
    const std::size_t first = n - s.window;
    std::vector<double> tail; // u_j for j in (first, n]
    tail.reserve(s.window);
    double sum = 0.0;
    std::size_t next_cp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += terms[i];
        const double u = sum / static_cast<double>(i + 1);
        if (i >= first) {
            tail.push_back(u);
        }
        if (next_cp < checkpoints.size() && checkpoints[next_cp] == i + 1) {
            s.checkpoints.emplace_back(i + 1, u);
            ++next_cp;
        }
    }
    s.estimate = tail.back();
    double lo = terms[first], hi = terms[first];
    for (std::size_t j = 0; j < s.window; ++j) {
        s.max_window_delta = std::max(s.max_window_delta, std::abs(tail[j] - s.estimate));
        lo = std::min(lo, terms[first + j]);
        hi = std::max(hi, terms[first + j]);
    }
    s.term_oscillation = hi - lo;
    s.converged = s.max_window_delta <= options.tolerance;
    s.strong = s.term_oscillation <= options.tolerance;
    return s;
}

SequentialResult sequential_density(const MeasureSequence& seq, const Dfa& d, std::size_t n,
                                    const SequentialOptions& options) {
    if (n == 0) {
        throw InvalidArgumentError("N must be at least 1");
    }
    SequentialResult r;
    r.n = n;
    r.terms.reserve(n);

    std::shared_ptr<const Measure> current;
    Chain chain;
    std::vector<double> x;
    std::size_t x_index = 0; // x holds the distribution whose terminal mass is term x_index
    bool tracking = false;
    for (std::size_t i = 0; i < n; ++i) {
        auto m = seq.at(i);
        if (m != current) {
            current = m;
            chain = lift_chain(d, *m);
            tracking = false;
        }
        double term;
        if (i < chain.offset) {
            term = chain.empty_word_mass;
        } else if (tracking) {
            while (x_index < i) {
                x = step_distribution(chain, x);
                ++x_index;
            }
            term = 0.0;
            for (std::size_t s = 0; s < x.size(); ++s) {
                term += x[s] * chain.terminal[s];
            }
        } else if (i + 1 < n && seq.at(i + 1) == m) {
            x = chain.initial;
            x_index = chain.offset;
            while (x_index < i) {
                x = step_distribution(chain, x);
                ++x_index;
            }
            tracking = true;
            term = 0.0;
            for (std::size_t s = 0; s < x.size(); ++s) {
                term += x[s] * chain.terminal[s];
            }
        } else {
            term = slice_mass(chain, i);
        }
        r.terms.push_back(std::clamp(term, 0.0, 1.0));
    }

    TraceSummary summary = summarize_trace(r.terms, options);
    r.checkpoints = std::move(summary.checkpoints);
    r.estimate = summary.estimate;
    r.converged = summary.converged;
    r.window = summary.window;
    r.max_window_delta = summary.max_window_delta;
    r.strong = summary.strong;
    r.term_oscillation = summary.term_oscillation;

    if (seq.limit()) {
        r.limit_density = density(d, *seq.limit()).value;
    }
    if (seq.kind() == SequenceKind::bernoulli_formula && is_contains_first_letter(d, seq.alphabet())) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double q = 1.0 - *seq.first_letter_probability(i);
            double closed = 1.0 - std::pow(q, static_cast<double>(i));
            worst = std::max(worst, std::abs(closed - r.terms[i]));
        }
        r.closed_form_deviation = worst;
    }
    return r;
}

Sft counterexample_family(int family, std::size_t n) {
    const std::string alphabet = "abc";
    std::vector<LabeledEdge> edges;
    std::vector<std::string> names;
    if (family == 1) {
        if (n < 1) {
            throw InvalidArgumentError("family 1 needs n >= 1");
        }
        if (n > 100000) {
            throw CapExceededError("family 1 index above 100000");
        }
        // vertex s = letters read since the last a, saturating at n + 1
        const std::size_t top = n + 1;
        for (std::size_t s = 0; s <= top; ++s) {
            names.push_back(std::to_string(s));
            const std::size_t next = std::min(s + 1, top);
            if (s == top) {
                edges.push_back({s, 0, 0});
            }
            edges.push_back({s, next, 1});
            edges.push_back({s, next, 2});
        }
        Sft s(alphabet, n + 1, std::move(names), std::move(edges));
        if (!is_irreducible(s)) {
            throw NotIrreducibleError("family 1 presentation is not irreducible");
        }
        return s;
    }
    if (family != 2) {
        throw InvalidArgumentError("unknown family " + std::to_string(family));
    }
    if (n < 2) {
        throw InvalidArgumentError("family 2 needs n >= 2");
    }
    if (n > 16) {
        throw CapExceededError("family 2 index above 16");
    }
    const std::size_t width = n - 1;
    const std::size_t count = std::size_t{1} << width;
    const std::size_t mask = count - 1;
    const std::size_t oldest = std::size_t{1} << (width - 1);
    std::size_t log2n = 0;
    while ((std::size_t{2} << log2n) <= n) {
        ++log2n;
    }
    const std::size_t forbidden = log2n % 2 == 0 ? 0 : 1;
    for (std::size_t v = 0; v < count; ++v) {
        // bit j set: the letter j + 1 positions back is a
        std::string name(width, '.');
        for (std::size_t j = 0; j < width; ++j) {
            if (v & (std::size_t{1} << j)) {
                name[width - 1 - j] = 'a';
            }
        }
        names.push_back(std::move(name));
        for (std::size_t letter = 0; letter < 3; ++letter) {
            if ((v & oldest) && letter == forbidden) {
                continue;
            }
            edges.push_back({v, ((v << 1) | (letter == 0 ? 1u : 0u)) & mask, letter});
        }
    }
    Sft s(alphabet, width, std::move(names), std::move(edges));
    if (!is_irreducible(s)) {
        throw NotIrreducibleError("family 2 presentation is not irreducible");
    }
    return s;
}

} // namespace ratdense
