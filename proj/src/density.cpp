#include "ratdense/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <Eigen/Dense>

#include "ratdense/error.hpp"

namespace ratdense {

const char* to_string(DensityMode mode) noexcept {
    return mode == DensityMode::strong ? "strong" : "cesaro";
}

namespace {

// measure letter index for each automaton letter index
std::vector<std::size_t> letter_map(const Dfa& d, const Measure& m) {
    const std::string& da = d.alphabet();
    const std::string& ma = m.alphabet();
    if (da.size() != ma.size()) {
        throw AlphabetMismatchError("automaton alphabet '" + da + "' vs measure alphabet '" + ma + "'");
    }
    std::vector<std::size_t> map(da.size());
    for (std::size_t a = 0; a < da.size(); ++a) {
        auto pos = ma.find(da[a]);
        if (pos == std::string::npos) {
            throw AlphabetMismatchError("automaton alphabet '" + da + "' vs measure alphabet '" + ma + "'");
        }
        map[a] = pos;
    }
    return map;
}

SparseMatrix from_triplets(std::size_t n, std::vector<Eigen::Triplet<double>>& entries) {
    SparseMatrix p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    p.setFromTriplets(entries.begin(), entries.end());
    p.prune(0.0);
    p.makeCompressed();
    return p;
}

// y = x P
void step(const SparseMatrix& p, const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (Eigen::Index i = 0; i < p.outerSize(); ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        if (xi == 0.0) {
            continue;
        }
        for (SparseMatrix::InnerIterator it(p, i); it; ++it) {
            y[static_cast<std::size_t>(it.col())] += xi * it.value();
        }
    }
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += x[i] * y[i];
    }
    return s;
}

struct ClassStructure {
    std::vector<std::size_t> component;                // SCC id per state
    std::vector<std::vector<std::size_t>> recurrent;   // closed SCCs
    std::vector<std::size_t> periods;                  // per recurrent class
    std::vector<std::size_t> transient;
};

ClassStructure analyze(const SparseMatrix& p) {
    const auto n = static_cast<std::size_t>(p.rows());
    // Iterative Tarjan.
    constexpr std::size_t unvisited = SIZE_MAX;
    std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, Eigen::Index>> call; // (vertex, next inner offset)
    std::size_t counter = 0, num_comp = 0;
    const int* outer = p.outerIndexPtr();
    const int* inner = p.innerIndexPtr();
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) {
            continue;
        }
        call.emplace_back(root, outer[root]);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            if (pos < outer[v + 1]) {
                auto w = static_cast<std::size_t>(inner[pos++]);
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.emplace_back(w, outer[w]);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            call.pop_back();
            if (!call.empty()) {
                low[call.back().first] = std::min(low[call.back().first], low[done]);
            }
            if (low[done] == index[done]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = num_comp;
                } while (w != done);
                ++num_comp;
            }
        }
    }

    std::vector<bool> closed(num_comp, true);
    for (std::size_t v = 0; v < n; ++v) {
        for (int k = outer[v]; k < outer[v + 1]; ++k) {
            if (comp[static_cast<std::size_t>(inner[k])] != comp[v]) {
                closed[comp[v]] = false;
            }
        }
    }
    ClassStructure out;
    out.component = comp;
    std::vector<std::size_t> class_of(num_comp, SIZE_MAX);
    for (std::size_t v = 0; v < n; ++v) {
        if (!closed[comp[v]]) {
            out.transient.push_back(v);
            continue;
        }
        if (class_of[comp[v]] == SIZE_MAX) {
            class_of[comp[v]] = out.recurrent.size();
            out.recurrent.emplace_back();
        }
        out.recurrent[class_of[comp[v]]].push_back(v);
    }

    // Period: gcd of level[u] + 1 - level[v] over class edges, levels from a BFS.
    std::vector<std::size_t> level(n, SIZE_MAX);
    for (const auto& cls : out.recurrent) {
        std::vector<std::size_t> queue{cls.front()};
        level[cls.front()] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            std::size_t u = queue[head];
            for (int k = outer[u]; k < outer[u + 1]; ++k) {
                auto w = static_cast<std::size_t>(inner[k]);
                if (level[w] == SIZE_MAX) {
                    level[w] = level[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        std::size_t g = 0;
        for (std::size_t u : cls) {
            for (int k = outer[u]; k < outer[u + 1]; ++k) {
                auto w = static_cast<std::size_t>(inner[k]);
                auto diff = static_cast<long long>(level[u]) + 1 - static_cast<long long>(level[w]);
                g = std::gcd(g, static_cast<std::size_t>(std::llabs(diff)));
            }
        }
        out.periods.push_back(std::max<std::size_t>(g, 1));
    }
    return out;
}

// Limit distribution from recurrent-class stationary vectors and absorption masses.
std::optional<std::vector<double>> structural_limit(const Chain& c, const ClassStructure& cs,
                                                    const CesaroOptions& options) {
    const std::size_t n = c.num_states();
    if (cs.transient.size() > options.dense_limit) {
        return std::nullopt;
    }
    for (const auto& cls : cs.recurrent) {
        if (cls.size() > options.dense_limit) {
            return std::nullopt;
        }
    }
    const SparseMatrix& p = c.transition;

    std::vector<double> absorbed(cs.recurrent.size(), 0.0);
    std::vector<std::size_t> class_of(n, SIZE_MAX);
    for (std::size_t k = 0; k < cs.recurrent.size(); ++k) {
        for (std::size_t v : cs.recurrent[k]) {
            class_of[v] = k;
            absorbed[k] += c.initial[v];
        }
    }
    if (!cs.transient.empty()) {
        const auto t = static_cast<Eigen::Index>(cs.transient.size());
        std::unordered_map<std::size_t, Eigen::Index> pos;
        for (Eigen::Index i = 0; i < t; ++i) {
            pos.emplace(cs.transient[static_cast<std::size_t>(i)], i);
        }
        Eigen::MatrixXd b = Eigen::MatrixXd::Identity(t, t);
        Eigen::VectorXd alpha(t);
        for (Eigen::Index i = 0; i < t; ++i) {
            const std::size_t v = cs.transient[static_cast<std::size_t>(i)];
            alpha(i) = c.initial[v];
            for (SparseMatrix::InnerIterator it(p, static_cast<Eigen::Index>(v)); it; ++it) {
                auto found = pos.find(static_cast<std::size_t>(it.col()));
                if (found != pos.end()) {
                    b(i, found->second) -= it.value();
                }
            }
        }
        // Expected visits x solve x (I - P_TT) = alpha_T.
        Eigen::VectorXd visits = b.transpose().partialPivLu().solve(alpha);
        for (Eigen::Index i = 0; i < t; ++i) {
            const std::size_t v = cs.transient[static_cast<std::size_t>(i)];
            for (SparseMatrix::InnerIterator it(p, static_cast<Eigen::Index>(v)); it; ++it) {
                std::size_t k = class_of[static_cast<std::size_t>(it.col())];
                if (k != SIZE_MAX) {
                    absorbed[k] += visits(i) * it.value();
                }
            }
        }
    }

    std::vector<double> limit(n, 0.0);
    for (std::size_t k = 0; k < cs.recurrent.size(); ++k) {
        const auto& cls = cs.recurrent[k];
        const auto m = static_cast<Eigen::Index>(cls.size());
        std::unordered_map<std::size_t, Eigen::Index> pos;
        for (Eigen::Index i = 0; i < m; ++i) {
            pos.emplace(cls[static_cast<std::size_t>(i)], i);
        }
        // pi (Q - I) = 0 with the last equation replaced by sum(pi) = 1.
        Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (SparseMatrix::InnerIterator it(p, static_cast<Eigen::Index>(cls[static_cast<std::size_t>(i)])); it;
                 ++it) {
                a(i, pos.at(static_cast<std::size_t>(it.col()))) += it.value();
            }
        }
        Eigen::MatrixXd system = a.transpose();
        system.row(m - 1).setOnes();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
        rhs(m - 1) = 1.0;
        Eigen::VectorXd pi = system.fullPivLu().solve(rhs);
        for (Eigen::Index i = 0; i < m; ++i) {
            limit[cls[static_cast<std::size_t>(i)]] = absorbed[k] * std::max(0.0, pi(i));
        }
    }
    return limit;
}

std::size_t common_period(const ClassStructure& cs, std::size_t cap) {
    std::size_t d = 1;
    for (std::size_t p : cs.periods) {
        d = std::lcm(d, p);
        if (d > cap) {
            return cap;
        }
    }
    return d;
}

struct IterationOutcome {
    DensityMode mode = DensityMode::cesaro;
    double periodic_mean = 0.0;
    double oscillation = 0.0;
    std::size_t terms = 0;
    std::vector<std::pair<std::size_t, double>> partials;
    std::vector<double> periodic_distribution; // averaged over one check period
};

// Runs the slice sequence until it settles (strong) or the distribution repeats with
// the chain's common period, then reports the tail behaviour.
IterationOutcome iterate_tail(const Chain& c, std::size_t period, std::optional<double> known_value,
                              const CesaroOptions& options, bool want_distribution) {
    IterationOutcome out;
    const std::size_t w = options.window;
    const std::size_t check = period * ((w + period - 1) / period);
    std::vector<double> x = c.initial, y(x.size());
    std::vector<double> snapshot;
    std::size_t snapshot_at = 0;
    std::vector<double> recent; // ring of the last `check` slices
    recent.reserve(check);
    double running = 0.0;
    std::size_t next_partial = 1;

    auto record = [&](double s) {
        if (recent.size() < check) {
            recent.push_back(s);
        } else {
            recent[out.terms % check] = s;
        }
        running += s;
        ++out.terms;
        if (out.terms == next_partial) {
            out.partials.emplace_back(out.terms, running / static_cast<double>(out.terms));
            next_partial *= 2;
        }
    };
    auto oscillation = [&]() {
        auto [lo, hi] = std::minmax_element(recent.begin(), recent.end());
        return *hi - *lo;
    };
    auto window_settled = [&](double s) {
        if (recent.size() < check) {
            return false;
        }
        double osc = oscillation();
        if (osc > options.strong_tolerance) {
            return false;
        }
        return !known_value || std::abs(s - *known_value) <= options.strong_tolerance;
    };

    if (c.offset == 1) {
        record(c.empty_word_mass);
    }
    while (out.terms < options.max_steps) {
        const double s = dot(x, c.terminal);
        record(s);
        const std::size_t steps = out.terms - c.offset; // steps of P applied to reach x
        if (window_settled(s)) {
            out.mode = DensityMode::strong;
            break;
        }
        if (steps % check == 0) {
            if (!snapshot.empty() && steps - snapshot_at == check) {
                double diff = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    diff += std::abs(x[i] - snapshot[i]);
                }
                if (diff <= 1e-13 && recent.size() == check) {
                    out.mode = oscillation() <= options.strong_tolerance ? DensityMode::strong : DensityMode::cesaro;
                    break;
                }
            }
            snapshot = x;
            snapshot_at = steps;
        }
        step(c.transition, x, y);
        x.swap(y);
    }
    if (out.terms >= options.max_steps) {
        out.mode = oscillation() <= options.strong_tolerance ? DensityMode::strong : DensityMode::cesaro;
    }
    out.oscillation = oscillation();
    out.periodic_mean = std::accumulate(recent.begin(), recent.end(), 0.0) / static_cast<double>(recent.size());
    if (want_distribution) {
        // Average the distribution over one full check period.
        std::vector<double> avg(x.size(), 0.0);
        for (std::size_t r = 0; r < check; ++r) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                avg[i] += x[i];
            }
            step(c.transition, x, y);
            x.swap(y);
        }
        for (double& a : avg) {
            a /= static_cast<double>(check);
        }
        out.periodic_distribution = std::move(avg);
    }
    return out;
}

} // namespace

Chain lift_chain(const Dfa& d, const Measure& m) {
    const std::vector<std::size_t> map = letter_map(d, m);
    const std::size_t k = d.alphabet_size();
    Chain c;
    if (m.kind() == MeasureKind::bernoulli) {
        const std::size_t n = d.num_states();
        std::vector<Eigen::Triplet<double>> entries;
        for (std::size_t q = 0; q < n; ++q) {
            for (std::size_t a = 0; a < k; ++a) {
                double p = m.prob()[map[a]];
                if (p > 0.0) {
                    entries.emplace_back(q, d.next(static_cast<State>(q), a), p);
                }
            }
        }
        c.transition = from_triplets(n, entries);
        c.initial.assign(n, 0.0);
        c.initial[d.initial()] = 1.0;
        c.terminal.resize(n);
        for (std::size_t q = 0; q < n; ++q) {
            c.terminal[q] = d.is_terminal(static_cast<State>(q)) ? 1.0 : 0.0;
        }
        c.offset = 0;
        c.empty_word_mass = c.terminal[d.initial()];
        return c;
    }

    // automaton letter index for each measure letter
    std::vector<std::size_t> inverse(k);
    for (std::size_t a = 0; a < k; ++a) {
        inverse[map[a]] = a;
    }
    const std::size_t s_count = m.num_states();
    const SparseMatrix& p = m.transition();
    std::unordered_map<std::size_t, std::size_t> index;
    std::vector<std::pair<State, std::size_t>> states;
    auto intern = [&](State q, std::size_t s) {
        auto [it, fresh] = index.try_emplace(static_cast<std::size_t>(q) * s_count + s, states.size());
        if (fresh) {
            states.emplace_back(q, s);
        }
        return it->second;
    };
    std::vector<std::pair<std::size_t, double>> init;
    for (std::size_t s = 0; s < s_count; ++s) {
        if (m.initial()[s] > 0.0) {
            State q = d.next(d.initial(), inverse[m.letter_of()[s]]);
            init.emplace_back(intern(q, s), m.initial()[s]);
        }
    }
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t head = 0; head < states.size(); ++head) {
        auto [q, s] = states[head];
        for (SparseMatrix::InnerIterator it(p, static_cast<Eigen::Index>(s)); it; ++it) {
            auto t = static_cast<std::size_t>(it.col());
            State r = d.next(q, inverse[m.letter_of()[t]]);
            entries.emplace_back(head, intern(r, t), it.value());
        }
    }
    const std::size_t n = states.size();
    c.transition = from_triplets(n, entries);
    c.initial.assign(n, 0.0);
    for (auto [i, w] : init) {
        c.initial[i] += w;
    }
    c.terminal.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.terminal[i] = d.is_terminal(states[i].first) ? 1.0 : 0.0;
    }
    c.offset = 1;
    c.empty_word_mass = d.is_terminal(d.initial()) ? 1.0 : 0.0;
    return c;
}

double slice_mass(const Chain& c, std::size_t n) {
    if (n < c.offset) {
        return c.empty_word_mass;
    }
    const std::size_t steps = n - c.offset;
    const auto dim = static_cast<double>(c.num_states());
    const double sparse_cost = static_cast<double>(steps) * static_cast<double>(c.transition.nonZeros() + c.num_states());
    const double dense_cost = 2.0 * dim * dim * dim * std::log2(static_cast<double>(steps) + 2.0);
    if (sparse_cost <= dense_cost || c.num_states() > 256) {
        std::vector<double> x = c.initial, y(x.size());
        for (std::size_t i = 0; i < steps; ++i) {
            step(c.transition, x, y);
            x.swap(y);
        }
        return dot(x, c.terminal);
    }
    // Binary exponentiation of the dense matrix.
    Eigen::MatrixXd base = Eigen::MatrixXd(c.transition);
    Eigen::RowVectorXd x = Eigen::Map<const Eigen::RowVectorXd>(c.initial.data(), c.initial.size());
    std::size_t e = steps;
    while (e > 0) {
        if (e & 1u) {
            x = x * base;
        }
        e >>= 1u;
        if (e > 0) {
            base = base * base;
        }
    }
    Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(c.terminal.data(), c.terminal.size());
    return x.dot(t);
}

std::vector<double> step_distribution(const Chain& c, const std::vector<double>& x) {
    std::vector<double> y(x.size());
    step(c.transition, x, y);
    return y;
}

std::vector<double> slice_masses(const Chain& c, std::size_t count) {
    std::vector<double> out;
    out.reserve(count);
    if (count > 0 && c.offset == 1) {
        out.push_back(c.empty_word_mass);
    }
    std::vector<double> x = c.initial, y(x.size());
    while (out.size() < count) {
        out.push_back(dot(x, c.terminal));
        step(c.transition, x, y);
        x.swap(y);
    }
    return out;
}

std::vector<double> cesaro_distribution(const Chain& c, const CesaroOptions& options) {
    const ClassStructure cs = analyze(c.transition);
    if (auto limit = structural_limit(c, cs, options)) {
        return *limit;
    }
    return iterate_tail(c, common_period(cs, 4096), std::nullopt, options, true).periodic_distribution;
}

DensityResult cesaro_limit(const Chain& c, const CesaroOptions& options) {
    const ClassStructure cs = analyze(c.transition);
    DensityResult r;
    std::optional<double> value;
    if (auto limit = structural_limit(c, cs, options)) {
        double in = 0.0, out = 0.0;
        for (std::size_t i = 0; i < limit->size(); ++i) {
            (c.terminal[i] > 0.0 ? in : out) += (*limit)[i];
        }
        value = in + out > 0.0 ? std::clamp(in / (in + out), 0.0, 1.0) : 0.0;
        r.method = "structural";
    } else {
        r.method = "iterative";
    }
    IterationOutcome tail = iterate_tail(c, common_period(cs, 4096), value, options, false);
    r.value = value ? *value : std::clamp(tail.periodic_mean, 0.0, 1.0);
    r.mode = tail.mode;
    r.partial_averages = std::move(tail.partials);
    r.tail_oscillation = tail.oscillation;
    r.terms_computed = tail.terms;
    return r;
}

DensityResult density(const Dfa& d, const Measure& m, const CesaroOptions& options) {
    DensityResult r = cesaro_limit(lift_chain(d, m), options);
    try {
        r.aperiodic_language = is_aperiodic(transition_monoid(minimize(d)));
    } catch (const CapExceededError&) {
        r.aperiodic_language.reset();
    }
    return r;
}

std::vector<double> element_densities(const Monoid& mon, const Measure& m) {
    if (m.kind() != MeasureKind::bernoulli) {
        throw InvalidArgumentError("element densities need a Bernoulli measure");
    }
    const std::string& alphabet = mon.alphabet();
    if (alphabet.size() != m.alphabet().size()) {
        throw AlphabetMismatchError("monoid alphabet '" + alphabet + "' vs measure alphabet '" + m.alphabet() + "'");
    }
    std::vector<double> prob(alphabet.size());
    for (std::size_t a = 0; a < alphabet.size(); ++a) {
        auto pos = m.alphabet().find(alphabet[a]);
        if (pos == std::string::npos) {
            throw AlphabetMismatchError("monoid alphabet '" + alphabet + "' vs measure alphabet '" + m.alphabet() +
                                        "'");
        }
        prob[a] = m.prob()[pos];
    }
    const std::size_t n = mon.size();
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t a = 0; a < alphabet.size(); ++a) {
            if (prob[a] > 0.0) {
                entries.emplace_back(e, mon.right_letter(e, a), prob[a]);
            }
        }
    }
    Chain c;
    c.transition = from_triplets(n, entries);
    c.initial.assign(n, 0.0);
    c.initial[mon.identity()] = 1.0;
    c.terminal.assign(n, 0.0);
    c.offset = 0;
    return cesaro_distribution(c);
}

CorollaryReport check_corollary(const Monoid& mon, const std::vector<double>& nu, double tol) {
    if (nu.size() != mon.size()) {
        throw InvalidArgumentError("one density per monoid element is required");
    }
    CorollaryReport report;
    const IdealInfo info = minimal_ideal(mon);
    report.aperiodic = info.aperiodic;
    report.total = std::accumulate(nu.begin(), nu.end(), 0.0);
    auto mass = [&](const std::vector<std::size_t>& set) {
        double s = 0.0;
        for (std::size_t x : set) {
            s += nu[x];
        }
        return s;
    };
    for (std::size_t e = 0; e < mon.size(); ++e) {
        CorollaryRow row;
        row.element = e;
        row.nu = nu[e];
        row.in_ideal = info.contains(e);
        const std::string name = "element " + std::to_string(e) + " (" +
                                 (mon.witness(e).empty() ? std::string("ε") : mon.witness(e)) + ")";
        if (row.in_ideal) {
            row.d = h_intersection_size(mon, e);
            row.nu_right = mass(mon.right_ideal(e));
            row.nu_left = mass(mon.left_ideal(e));
            row.predicted = row.nu_right * row.nu_left / static_cast<double>(row.d);
            if (std::abs(row.nu - row.predicted) > tol) {
                report.violations.push_back(name + ": nu = " + std::to_string(row.nu) +
                                            " but nu(eM) nu(Me) / d = " + std::to_string(row.predicted));
            }
            if (!(row.nu > tol)) {
                report.violations.push_back(name + ": in the minimal ideal but nu is not positive");
            }
            if (info.aperiodic && row.d != 1) {
                report.violations.push_back(name + ": aperiodic monoid with d = " + std::to_string(row.d));
            }
        } else if (row.nu > tol) {
            report.violations.push_back(name + ": outside the minimal ideal but nu = " + std::to_string(row.nu));
        }
        report.rows.push_back(row);
    }
    if (std::abs(report.total - 1.0) > tol) {
        report.violations.push_back("densities sum to " + std::to_string(report.total));
    }
    return report;
}

double brute_force_slice(const Dfa& d, const Measure& m, std::size_t n) {
    const std::string& alphabet = d.alphabet();
    if (n > 14 || alphabet.size() > 4) {
        throw CapExceededError("enumeration bound exceeded (n <= 14, alphabet size <= 4)");
    }
    std::vector<std::size_t> digits(n, 0);
    std::string word(n, alphabet[0]);
    double total = 0.0;
    while (true) {
        if (accepts(d, word)) {
            total += word_mass(m, word);
        }
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++digits[i] < alphabet.size()) {
                word[i] = alphabet[digits[i]];
                break;
            }
            digits[i] = 0;
            word[i] = alphabet[0];
            if (i == 0) {
                return total;
            }
        }
        if (n == 0) {
            return total;
        }
    }
}

} // namespace ratdense
