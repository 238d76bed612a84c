#include "ratdense/combinatorial.hpp"

#include <algorithm>
#include <numeric>

#include "ratdense/error.hpp"

namespace ratdense {

namespace {

// Number of accepted words of each length < n, counted forward over co-reachable states.
std::vector<BigInt> accepted_by_length(const Dfa& d, std::size_t n) {
    const std::size_t q = d.num_states();
    const std::size_t k = d.alphabet_size();
    std::vector<bool> live(q, false);
    for (std::size_t s = 0; s < q; ++s) {
        live[s] = d.is_terminal(static_cast<State>(s));
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < q; ++s) {
            if (live[s]) {
                continue;
            }
            for (std::size_t a = 0; a < k; ++a) {
                if (live[d.next(static_cast<State>(s), a)]) {
                    live[s] = changed = true;
                    break;
                }
            }
        }
    }
    std::vector<BigInt> out(n);
    std::vector<BigInt> cur(q), next(q);
    if (live[d.initial()]) {
        cur[d.initial()] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        BigInt total = 0;
        for (std::size_t s = 0; s < q; ++s) {
            if (d.is_terminal(static_cast<State>(s))) {
                total += cur[s];
            }
        }
        out[i] = std::move(total);
        if (i + 1 == n) {
            break;
        }
        for (auto& v : next) {
            v = 0;
        }
        for (std::size_t s = 0; s < q; ++s) {
            if (cur[s] == 0) {
                continue;
            }
            for (std::size_t a = 0; a < k; ++a) {
                State t = d.next(static_cast<State>(s), a);
                if (live[t]) {
                    next[t] += cur[s];
                }
            }
        }
        cur.swap(next);
    }
    return out;
}

void check_same_alphabet(const Dfa& d, const Sft& x) {
    if (d.alphabet() != x.alphabet()) {
        throw AlphabetMismatchError("automaton alphabet '" + d.alphabet() + "' vs shift alphabet '" + x.alphabet() +
                                    "'");
    }
}

std::vector<int> suffix_array(const std::string& w) {
    const int n = static_cast<int>(w.size());
    std::vector<int> sa(n), rank(n), tmp(n);
    std::iota(sa.begin(), sa.end(), 0);
    for (int i = 0; i < n; ++i) {
        rank[i] = static_cast<unsigned char>(w[i]);
    }
    for (int len = 1;; len <<= 1) {
        auto key = [&](int i) { return std::pair(rank[i], i + len < n ? rank[i + len] : -1); };
        std::sort(sa.begin(), sa.end(), [&](int a, int b) { return key(a) < key(b); });
        tmp[sa[0]] = 0;
        for (int i = 1; i < n; ++i) {
            tmp[sa[i]] = tmp[sa[i - 1]] + (key(sa[i - 1]) < key(sa[i]) ? 1 : 0);
        }
        rank.swap(tmp);
        if (n == 0 || rank[sa[n - 1]] == n - 1) {
            break;
        }
    }
    return sa;
}

// lcp[i] = common prefix length of suffixes sa[i - 1] and sa[i] (Kasai).
std::vector<int> lcp_array(const std::string& w, const std::vector<int>& sa) {
    const int n = static_cast<int>(w.size());
    std::vector<int> rank(n), lcp(n, 0);
    for (int i = 0; i < n; ++i) {
        rank[sa[i]] = i;
    }
    int h = 0;
    for (int i = 0; i < n; ++i) {
        if (rank[i] > 0) {
            int j = sa[rank[i] - 1];
            while (i + h < n && j + h < n && w[i + h] == w[j + h]) {
                ++h;
            }
            lcp[rank[i]] = h;
            if (h > 0) {
                --h;
            }
        } else {
            h = 0;
        }
    }
    return lcp;
}

} // namespace

CombinatorialResult combinatorial_density(const Dfa& d, const Sft& x, std::size_t n,
                                          const SequentialOptions& options) {
    if (n == 0) {
        throw InvalidArgumentError("N must be at least 1");
    }
    check_same_alphabet(d, x);
    const Dfa shift = language_dfa(x);
    CombinatorialResult r;
    r.n = n;
    r.language_counts = accepted_by_length(intersect(d, shift), n);
    r.shift_counts = accepted_by_length(shift, n);
    r.ratios.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.ratios.push_back(r.shift_counts[i] == 0 ? 0.0 : big_ratio(r.language_counts[i], r.shift_counts[i]));
    }
    TraceSummary s = summarize_trace(r.ratios, options);
    r.checkpoints = std::move(s.checkpoints);
    r.estimate = s.estimate;
    r.converged = s.converged;
    r.window = s.window;
    r.max_window_delta = s.max_window_delta;
    r.strong = s.strong;
    r.term_oscillation = s.term_oscillation;
    return r;
}

std::vector<BigInt> prefix_counts(const Sft& x, const std::string& u, std::size_t n) {
    const Dfa shift = language_dfa(x);
    State q = shift.run(u);
    std::vector<BigInt> out(n);
    if (!shift.is_terminal(q) || n <= u.size()) {
        return out;
    }
    const auto table = accepted_counts(shift, n - u.size() - 1);
    for (std::size_t i = u.size(); i < n; ++i) {
        out[i] = table[i - u.size()][q];
    }
    return out;
}

std::vector<PrefixDensity> ideal_density_measure(const Sft& x, std::size_t max_len, std::size_t n,
                                                 const SequentialOptions& options) {
    if (max_len > 8) {
        throw CapExceededError("prefix length above 8");
    }
    if (n == 0) {
        throw InvalidArgumentError("N must be at least 1");
    }
    const Dfa shift = language_dfa(x);
    const auto table = accepted_counts(shift, n);
    const std::vector<BigInt> total = accepted_by_length(shift, n);
    const std::string& alphabet = x.alphabet();

    auto counts_for = [&](State q, std::size_t len) {
        std::vector<BigInt> c(n);
        for (std::size_t i = len; i < n; ++i) {
            c[i] = table[i - len][q];
        }
        return c;
    };
    auto estimate_of = [&](const std::vector<BigInt>& c) {
        std::vector<double> ratios(n);
        for (std::size_t i = 0; i < n; ++i) {
            ratios[i] = total[i] == 0 ? 0.0 : big_ratio(c[i], total[i]);
        }
        return summarize_trace(ratios, options);
    };

    std::vector<PrefixDensity> out;
    for (std::size_t len = 0; len <= max_len; ++len) {
        for (const std::string& u : factors(x, len)) {
            const State q = shift.run(u);
            const auto counts = counts_for(q, len);
            const TraceSummary s = estimate_of(counts);
            PrefixDensity p;
            p.word = u;
            p.estimate = s.estimate;
            p.converged = s.converged;
            p.max_window_delta = s.max_window_delta;
            std::vector<BigInt> child_sum(n);
            for (std::size_t a = 0; a < alphabet.size(); ++a) {
                const State t = shift.next(q, a);
                if (!shift.is_terminal(t)) {
                    continue;
                }
                const auto child = counts_for(t, len + 1);
                p.children_sum += estimate_of(child).estimate;
                for (std::size_t i = 0; i < n; ++i) {
                    child_sum[i] += child[i];
                }
            }
            for (std::size_t i = len + 1; i < n; ++i) {
                if (child_sum[i] != counts[i]) {
                    p.additive = false;
                }
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

std::string fibonacci_word(std::size_t n) {
    std::string w = "0";
    while (w.size() < n) {
        std::string next;
        next.reserve(w.size() * 2);
        for (char c : w) {
            next += c == '0' ? "01" : "0";
        }
        w.swap(next);
    }
    w.resize(n);
    return w;
}

std::vector<std::size_t> factor_complexity(const std::string& w, std::size_t max_len) {
    std::vector<std::size_t> out(max_len + 1, 0);
    out[0] = 1;
    if (w.empty()) {
        return out;
    }
    const auto sa = suffix_array(w);
    const auto lcp = lcp_array(w, sa);
    const std::size_t n = w.size();
    for (std::size_t k = 1; k <= max_len; ++k) {
        std::size_t count = 0;
        int run = 0; // min lcp since the last suffix of length >= k
        bool seen = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) {
                run = seen ? std::min(run, lcp[i]) : lcp[i];
            }
            if (n - static_cast<std::size_t>(sa[i]) >= k) {
                if (!seen || static_cast<std::size_t>(run) < k) {
                    ++count;
                }
                seen = true;
                run = INT32_MAX;
            }
        }
        out[k] = count;
    }
    return out;
}

std::size_t count_occurrences(const std::string& w, const std::string& u) {
    if (u.empty() || u.size() > w.size()) {
        return u.empty() ? w.size() + 1 : 0;
    }
    std::size_t count = 0;
    for (auto pos = w.find(u); pos != std::string::npos; pos = w.find(u, pos + 1)) {
        ++count;
    }
    return count;
}

SturmianEstimate sturmian_check(const std::string& u, std::size_t n, std::size_t big_n) {
    if (n == 0 || n > 100000 || big_n == 0 || big_n > 1000000) {
        throw InvalidArgumentError("need 1 <= n <= 100000 and 1 <= N <= 1000000");
    }
    if (u.find_first_not_of("01") != std::string::npos) {
        throw InvalidArgumentError("'" + u + "' is not a word over {0,1}");
    }
    // Every factor of length m occurs in a prefix of length about 3m.
    const std::string reference = fibonacci_word(std::max<std::size_t>(64, 4 * u.size() + 16));
    if (reference.find(u) == std::string::npos) {
        throw InvalidArgumentError("'" + u + "' is not a factor of the Fibonacci word");
    }
    std::string window = fibonacci_word(n);
    std::reverse(window.begin(), window.end());
    SturmianEstimate e;
    e.right_special = (1.0 + static_cast<double>(count_occurrences(window, u))) / static_cast<double>(n + 1);
    const std::string prefix = fibonacci_word(big_n);
    e.frequency = prefix.size() < u.size() ? 0.0
                                           : static_cast<double>(count_occurrences(prefix, u)) /
                                                 static_cast<double>(prefix.size() - u.size() + 1);
    return e;
}

} // namespace ratdense
