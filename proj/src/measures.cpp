#include "ratdense/measures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "ratdense/error.hpp"

namespace ratdense {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kInvarianceTolerance = 1e-10;

void check_probability_vector(const std::vector<double>& p, const std::string& what) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw MeasureError(what + " has a negative or non-finite entry");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        std::ostringstream msg;
        msg << what << " sums to " << sum << ", not 1";
        throw MeasureError(msg.str());
    }
}

void normalize(std::vector<double>& p) {
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) {
        x /= sum;
    }
}

} // namespace

Measure Measure::bernoulli(std::string alphabet, std::vector<double> prob) {
    validate_alphabet(alphabet);
    if (prob.size() != alphabet.size()) {
        throw MeasureError("one probability per letter is required");
    }
    check_probability_vector(prob, "letter distribution");
    normalize(prob);
    Measure m;
    m.kind_ = MeasureKind::bernoulli;
    m.alphabet_ = std::move(alphabet);
    m.positive_ = std::all_of(prob.begin(), prob.end(), [](double x) { return x > 0.0; });
    m.prob_ = std::move(prob);
    m.invariant_ = true;
    return m;
}

Measure Measure::markov(std::string alphabet, std::vector<double> initial, SparseMatrix transition,
                        std::vector<std::size_t> letter_of, std::vector<std::string> state_names) {
    validate_alphabet(alphabet);
    const std::size_t n = initial.size();
    if (n == 0 || static_cast<std::size_t>(transition.rows()) != n ||
        static_cast<std::size_t>(transition.cols()) != n || letter_of.size() != n) {
        throw MeasureError("Markov measure dimensions disagree");
    }
    for (std::size_t s : letter_of) {
        if (s >= alphabet.size()) {
            throw MeasureError("chain state emits a letter outside the alphabet");
        }
    }
    if (!state_names.empty() && state_names.size() != n) {
        throw MeasureError("one name per chain state is required");
    }
    check_probability_vector(initial, "initial vector");
    normalize(initial);
    transition.makeCompressed();
    for (Eigen::Index i = 0; i < transition.outerSize(); ++i) {
        double sum = 0.0;
        for (SparseMatrix::InnerIterator it(transition, i); it; ++it) {
            if (!(it.value() >= 0.0) || !std::isfinite(it.value())) {
                throw MeasureError("transition matrix has a negative entry in row " + std::to_string(i));
            }
            sum += it.value();
        }
        if (std::abs(sum - 1.0) > kSumTolerance) {
            std::ostringstream msg;
            msg << "transition row " << i << " sums to " << sum << ", not 1";
            throw MeasureError(msg.str());
        }
        for (SparseMatrix::InnerIterator it(transition, i); it; ++it) {
            it.valueRef() /= sum;
        }
    }
    transition.prune(0.0);

    Measure m;
    m.kind_ = MeasureKind::markov;
    m.alphabet_ = std::move(alphabet);
    m.positive_ = std::all_of(initial.begin(), initial.end(), [](double x) { return x > 0.0; });

    Eigen::VectorXd pi = Eigen::Map<const Eigen::VectorXd>(initial.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd pi_p = transition.transpose() * pi;
    m.invariant_ = (pi_p - pi).lpNorm<Eigen::Infinity>() <= kInvarianceTolerance;

    m.initial_ = std::move(initial);
    m.transition_ = std::move(transition);
    m.letter_of_ = std::move(letter_of);
    m.state_names_ = std::move(state_names);
    return m;
}

Measure Measure::markov(std::string alphabet, std::vector<double> initial,
                        const std::vector<std::vector<double>>& transition, std::vector<std::size_t> letter_of,
                        std::vector<std::string> state_names) {
    const auto n = static_cast<Eigen::Index>(transition.size());
    SparseMatrix p(n, n);
    std::vector<Eigen::Triplet<double>> entries;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(transition[i].size()) != n) {
            throw MeasureError("transition matrix must be square");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            double x = transition[i][j];
            if (x != 0.0) {
                entries.emplace_back(i, j, x);
            }
        }
    }
    p.setFromTriplets(entries.begin(), entries.end());
    return markov(std::move(alphabet), std::move(initial), std::move(p), std::move(letter_of),
                  std::move(state_names));
}

double Measure::prob(char letter) const {
    auto a = alphabet_.find(letter);
    if (a == std::string::npos) {
        throw UnknownSymbolError(letter);
    }
    if (kind_ == MeasureKind::bernoulli) {
        return prob_[a];
    }
    return letter_marginals()[a];
}

std::vector<double> Measure::letter_marginals() const {
    if (kind_ == MeasureKind::bernoulli) {
        return prob_;
    }
    std::vector<double> out(alphabet_.size(), 0.0);
    for (std::size_t s = 0; s < initial_.size(); ++s) {
        out[letter_of_[s]] += initial_[s];
    }
    return out;
}

Measure bernoulli(std::string_view spec) {
    std::istringstream in{std::string(spec)};
    std::string item;
    std::string alphabet;
    std::vector<double> prob;
    while (in >> item) {
        auto eq = item.find('=');
        if (eq != 1 || item.size() < 3) {
            throw InvalidArgumentError("expected letter=probability, got '" + item + "'");
        }
        alphabet += item[0];
        try {
            std::size_t used = 0;
            prob.push_back(std::stod(item.substr(2), &used));
            if (used != item.size() - 2) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::logic_error&) {
            throw InvalidArgumentError("bad probability in '" + item + "'");
        }
    }
    return Measure::bernoulli(std::move(alphabet), std::move(prob));
}

double word_mass(const Measure& m, std::string_view word) {
    const std::string& alphabet = m.alphabet();
    std::vector<std::size_t> letters;
    letters.reserve(word.size());
    for (char c : word) {
        auto a = alphabet.find(c);
        if (a == std::string::npos) {
            throw UnknownSymbolError(c);
        }
        letters.push_back(a);
    }
    if (letters.empty()) {
        return 1.0;
    }
    if (m.kind() == MeasureKind::bernoulli) {
        double mass = 1.0;
        for (std::size_t a : letters) {
            mass *= m.prob()[a];
        }
        return mass;
    }
    // Forward recursion over chain states consistent with the emitted letters.
    const std::size_t n = m.num_states();
    std::vector<double> alpha(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        if (m.letter_of()[s] == letters[0]) {
            alpha[s] = m.initial()[s];
        }
    }
    const SparseMatrix& p = m.transition();
    for (std::size_t k = 1; k < letters.size(); ++k) {
        std::vector<double> next(n, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            if (alpha[s] == 0.0) {
                continue;
            }
            for (SparseMatrix::InnerIterator it(p, static_cast<Eigen::Index>(s)); it; ++it) {
                auto t = static_cast<std::size_t>(it.col());
                if (m.letter_of()[t] == letters[k]) {
                    next[t] += alpha[s] * it.value();
                }
            }
        }
        alpha = std::move(next);
    }
    return std::accumulate(alpha.begin(), alpha.end(), 0.0);
}

PerronData perron_data(const Sft& s, double tol, std::size_t max_iterations) {
    if (!is_irreducible(s)) {
        throw NotIrreducibleError("maximal-entropy measure needs an irreducible shift");
    }
    const std::size_t n = s.num_vertices();
    const auto& edges = s.edges();

    // (M + I) x for the right vector, x (M + I) for the left one; sum-normalized.
    auto iterate = [&](bool left, std::size_t& iterations) {
        std::vector<double> x(n, 1.0 / static_cast<double>(n));
        std::vector<double> y(n);
        for (iterations = 1; iterations <= max_iterations; ++iterations) {
            y = x;
            for (const auto& e : edges) {
                if (left) {
                    y[e.to] += x[e.from];
                } else {
                    y[e.from] += x[e.to];
                }
            }
            double sum = std::accumulate(y.begin(), y.end(), 0.0);
            double change = 0.0;
            double scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                y[i] /= sum;
                change = std::max(change, std::abs(y[i] - x[i]));
                scale = std::max(scale, y[i]);
            }
            x.swap(y);
            if (change <= tol * scale) {
                return x;
            }
        }
        throw NoConvergenceError("power iteration did not converge in " + std::to_string(max_iterations) +
                                 " iterations");
    };

    PerronData out;
    std::size_t it_right = 0, it_left = 0;
    out.right = iterate(false, it_right);
    out.left = iterate(true, it_left);
    out.iterations = std::max(it_right, it_left);

    // Rayleigh quotient x^T M x / x^T x on the right vector.
    double num = 0.0, den = 0.0;
    for (const auto& e : edges) {
        num += out.right[e.from] * out.right[e.to];
    }
    for (double x : out.right) {
        den += x * x;
    }
    out.lambda = num / den;

    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dot += out.left[i] * out.right[i];
    }
    for (double& v : out.left) {
        v /= dot;
    }
    return out;
}

Measure max_entropy(const Sft& s) {
    return max_entropy(s, perron_data(s));
}

Measure max_entropy(const Sft& s, const PerronData& perron) {
    const std::size_t n = s.num_vertices();
    const auto& edges = s.edges();
    const double lambda = perron.lambda;
    const auto& v = perron.left;
    const auto& w = perron.right;

    // Vertex chain when each vertex determines the letter read on entering it.
    constexpr std::size_t unset = SIZE_MAX;
    std::vector<std::size_t> entry_label(n, unset);
    bool vertex_labeled = true;
    for (std::size_t i = 0; i < edges.size() && vertex_labeled; ++i) {
        const auto& e = edges[i];
        if (entry_label[e.to] == unset) {
            entry_label[e.to] = e.label;
        } else if (entry_label[e.to] != e.label) {
            vertex_labeled = false;
        }
    }
    if (vertex_labeled) {
        for (std::size_t u = 0; u < n && vertex_labeled; ++u) {
            std::vector<std::size_t> targets;
            for (std::size_t e : s.out_edges(u)) {
                targets.push_back(edges[e].to);
            }
            std::sort(targets.begin(), targets.end());
            vertex_labeled = std::adjacent_find(targets.begin(), targets.end()) == targets.end();
        }
    }

    std::vector<Eigen::Triplet<double>> entries;
    std::vector<double> pi;
    std::vector<std::size_t> letter_of;
    std::vector<std::string> names;
    if (vertex_labeled) {
        pi.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            pi[i] = v[i] * w[i];
        }
        for (const auto& e : edges) {
            entries.emplace_back(e.from, e.to, w[e.to] / (lambda * w[e.from]));
        }
        letter_of = entry_label;
        for (std::size_t i = 0; i < n; ++i) {
            names.push_back(s.vertex_name(i));
        }
    } else {
        const std::size_t m = edges.size();
        pi.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            pi[i] = v[edges[i].from] * w[edges[i].to] / lambda;
            letter_of.push_back(edges[i].label);
            names.push_back(s.vertex_name(edges[i].from) + "-" + s.alphabet()[edges[i].label] + "->" +
                            s.vertex_name(edges[i].to));
        }
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t mid = edges[i].to;
            for (std::size_t j : s.out_edges(mid)) {
                entries.emplace_back(i, j, w[edges[j].to] / (lambda * w[mid]));
            }
        }
    }
    const auto dim = static_cast<Eigen::Index>(pi.size());
    SparseMatrix p(dim, dim);
    p.setFromTriplets(entries.begin(), entries.end());
    normalize(pi);
    return Measure::markov(s.alphabet(), std::move(pi), std::move(p), std::move(letter_of), std::move(names));
}

namespace {

std::vector<double> parse_numbers(const std::string& text, char sep) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, sep)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument("trailing");
            }
        } catch (const std::logic_error&) {
            throw InvalidArgumentError("bad number '" + item + "'");
        }
    }
    return out;
}

} // namespace

Measure parse_measure_spec(std::string_view text, const std::string& base_dir) {
    std::istringstream in{std::string(text)};
    std::string kind;
    in >> kind;
    std::string rest;
    std::getline(in, rest);
    if (kind == "bernoulli") {
        return bernoulli(rest);
    }
    if (kind == "maxent") {
        std::istringstream r(rest);
        std::string file;
        if (!(r >> file)) {
            throw InvalidArgumentError("maxent needs a shift spec file");
        }
        std::filesystem::path path(file);
        if (path.is_relative()) {
            path = std::filesystem::path(base_dir) / path;
        }
        return max_entropy(load_shift_spec(path));
    }
    if (kind == "markov") {
        std::istringstream r(rest);
        std::string item, letters;
        std::vector<double> pi;
        std::vector<std::vector<double>> rows;
        while (r >> item) {
            if (item.starts_with("letters=")) {
                letters = item.substr(8);
            } else if (item.starts_with("pi=")) {
                pi = parse_numbers(item.substr(3), ',');
            } else if (item.starts_with("P=")) {
                std::stringstream rs(item.substr(2));
                std::string row;
                while (std::getline(rs, row, ';')) {
                    rows.push_back(parse_numbers(row, ','));
                }
            } else {
                throw InvalidArgumentError("unknown markov field '" + item + "'");
            }
        }
        if (letters.empty() || pi.empty() || rows.empty()) {
            throw InvalidArgumentError("markov spec needs letters=, pi= and P=");
        }
        std::vector<std::size_t> identity(letters.size());
        std::iota(identity.begin(), identity.end(), std::size_t{0});
        return Measure::markov(letters, std::move(pi), rows, std::move(identity));
    }
    throw InvalidArgumentError("unknown measure kind '" + kind + "'");
}

} // namespace ratdense
