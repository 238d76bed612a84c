#include "ratdense/monoid.hpp"

#include <algorithm>
#include <numeric>

#include "ratdense/error.hpp"

namespace ratdense {

namespace {

// Apply x then y.
Transformation compose(const Transformation& x, const Transformation& y) {
    Transformation out(x.size());
    for (std::size_t q = 0; q < x.size(); ++q) {
        out[q] = y[x[q]];
    }
    return out;
}

std::vector<std::size_t> closure(const std::vector<std::size_t>& seeds, std::size_t size,
                                 const std::vector<std::size_t>& graph, std::size_t k) {
    std::vector<bool> seen(size, false);
    std::vector<std::size_t> out;
    for (std::size_t s : seeds) {
        if (!seen[s]) {
            seen[s] = true;
            out.push_back(s);
        }
    }
    for (std::size_t head = 0; head < out.size(); ++head) {
        for (std::size_t a = 0; a < k; ++a) {
            std::size_t t = graph[out[head] * k + a];
            if (!seen[t]) {
                seen[t] = true;
                out.push_back(t);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::size_t TransformationHash::operator()(const Transformation& t) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (State s : t) {
        h ^= s + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

std::optional<std::size_t> Monoid::find(const Transformation& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t Monoid::multiply(std::size_t x, std::size_t y) const {
    return index_.at(compose(elements_[x], elements_[y]));
}

std::size_t Monoid::element_of(std::string_view word) const {
    std::size_t m = identity();
    for (char c : word) {
        auto a = alphabet_.find(c);
        if (a == std::string::npos) {
            throw UnknownSymbolError(c);
        }
        m = right_letter(m, a);
    }
    return m;
}

std::vector<std::size_t> Monoid::right_ideal(std::size_t m) const {
    return closure({m}, size(), right_, alphabet_.size());
}

std::vector<std::size_t> Monoid::left_ideal(std::size_t m) const {
    return closure({m}, size(), left_, alphabet_.size());
}

std::vector<std::size_t> Monoid::two_sided_ideal(std::size_t m) const {
    return closure(right_ideal(m), size(), left_, alphabet_.size());
}

std::vector<std::vector<std::size_t>> Monoid::mult_table() const {
    std::vector<std::vector<std::size_t>> table(size(), std::vector<std::size_t>(size()));
    for (std::size_t x = 0; x < size(); ++x) {
        for (std::size_t y = 0; y < size(); ++y) {
            table[x][y] = multiply(x, y);
        }
    }
    return table;
}

void Monoid::dump(std::ostream& out) const {
    for (std::size_t m = 0; m < size(); ++m) {
        out << m << ' ' << (witnesses_[m].empty() ? std::string("ε") : witnesses_[m]) << " [";
        for (std::size_t q = 0; q < elements_[m].size(); ++q) {
            out << (q ? " " : "") << elements_[m][q];
        }
        out << "]\n";
    }
}

Monoid transition_monoid(const Dfa& d, std::size_t cap) {
    Monoid mon;
    mon.alphabet_ = d.alphabet();
    const std::size_t k = d.alphabet_size();
    const std::size_t n = d.num_states();

    std::vector<Transformation> letters(k, Transformation(n));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t q = 0; q < n; ++q) {
            letters[a][q] = d.next(static_cast<State>(q), a);
        }
    }

    Transformation id(n);
    std::iota(id.begin(), id.end(), State{0});
    mon.elements_.push_back(id);
    mon.witnesses_.emplace_back();
    mon.index_.emplace(id, 0);

    for (std::size_t head = 0; head < mon.elements_.size(); ++head) {
        for (std::size_t a = 0; a < k; ++a) {
            Transformation t = compose(mon.elements_[head], letters[a]);
            auto [it, fresh] = mon.index_.try_emplace(t, mon.elements_.size());
            if (fresh) {
                if (mon.elements_.size() >= cap) {
                    throw CapExceededError("transition monoid exceeds " + std::to_string(cap) + " elements");
                }
                mon.elements_.push_back(std::move(t));
                mon.witnesses_.push_back(mon.witnesses_[head] + d.alphabet()[a]);
            }
            mon.right_.push_back(it->second);
        }
    }

    mon.generators_.resize(k);
    for (std::size_t a = 0; a < k; ++a) {
        mon.generators_[a] = mon.index_.at(letters[a]);
    }
    mon.left_.resize(mon.size() * k);
    for (std::size_t x = 0; x < mon.size(); ++x) {
        for (std::size_t a = 0; a < k; ++a) {
            mon.left_[x * k + a] = mon.index_.at(compose(letters[a], mon.elements_[x]));
        }
    }
    return mon;
}

bool IdealInfo::contains(std::size_t m) const {
    return std::binary_search(minimal_ideal.begin(), minimal_ideal.end(), m);
}

namespace {

// Index i and period p of the cyclic semigroup generated by m: m^i = m^{i+p}, both minimal.
std::pair<std::size_t, std::size_t> index_and_period(const Monoid& mon, std::size_t m) {
    std::unordered_map<std::size_t, std::size_t> first_seen;
    std::size_t power = m;
    for (std::size_t e = 1;; ++e) {
        auto [it, fresh] = first_seen.try_emplace(power, e);
        if (!fresh) {
            return {it->second, e - it->second};
        }
        power = mon.multiply(power, m);
    }
}

// The product of all elements lies in every two-sided ideal, hence in the minimal one.
std::vector<std::size_t> ideal_elements(const Monoid& mon) {
    Transformation z = mon.transformation(0);
    for (std::size_t m = 1; m < mon.size(); ++m) {
        const Transformation& t = mon.transformation(m);
        for (auto& s : z) {
            s = t[s];
        }
    }
    return mon.two_sided_ideal(*mon.find(z));
}

} // namespace

IdealInfo minimal_ideal(const Monoid& mon) {
    IdealInfo info;
    info.minimal_ideal = ideal_elements(mon);

    info.aperiodic = true;
    std::size_t exponent = 1;
    for (std::size_t m = 0; m < mon.size(); ++m) {
        auto [index, period] = index_and_period(mon, m);
        if (period != 1) {
            info.aperiodic = false;
            break;
        }
        exponent = std::max(exponent, index);
    }
    if (info.aperiodic) {
        info.stabilization_exponent = exponent;
    }
    return info;
}

bool is_aperiodic(const Monoid& mon) {
    for (std::size_t m = 0; m < mon.size(); ++m) {
        if (index_and_period(mon, m).second != 1) {
            return false;
        }
    }
    return true;
}

std::size_t h_intersection_size(const Monoid& mon, std::size_t e) {
    auto ideal = ideal_elements(mon);
    if (!std::binary_search(ideal.begin(), ideal.end(), e)) {
        throw InvalidArgumentError("element " + std::to_string(e) + " is not in the minimal ideal");
    }
    auto r = mon.right_ideal(e);
    auto l = mon.left_ideal(e);
    std::vector<std::size_t> both;
    std::set_intersection(r.begin(), r.end(), l.begin(), l.end(), std::back_inserter(both));
    return both.size();
}

} // namespace ratdense
