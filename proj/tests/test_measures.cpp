#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ratdense/error.hpp"
#include "ratdense/measures.hpp"
#include "ratdense/sequential.hpp"

using namespace ratdense;

namespace {

void check_consistent(const Measure& m, std::size_t max_len, bool invariant) {
    for (std::size_t n = 0; n <= max_len; ++n) {
        for (const auto& u : oracle::words(m.alphabet(), n)) {
            double right = 0.0, left = 0.0;
            for (char a : m.alphabet()) {
                right += word_mass(m, u + a);
                left += word_mass(m, std::string(1, a) + u);
            }
            REQUIRE(std::abs(right - word_mass(m, u)) <= 1e-10);
            if (invariant) {
                REQUIRE(std::abs(left - word_mass(m, u)) <= 1e-10);
            }
        }
    }
}

} // namespace

TEST_SUITE("measures") {

TEST_CASE("bernoulli construction") {
    Measure u = bernoulli("a=0.3333333333333333 b=0.3333333333333333 c=0.3333333333333334");
    CHECK(u.is_positive());
    CHECK(word_mass(u, "abca") == doctest::Approx(std::pow(1.0 / 3, 4)));
    Measure z = Measure::bernoulli("abc", {0.0, 0.5, 0.5});
    CHECK_FALSE(z.is_positive());
    CHECK(z.is_invariant());
    Measure dirac = Measure::bernoulli("a", {1.0});
    CHECK(word_mass(dirac, "aaaa") == 1.0);
    CHECK(word_mass(u, "") == 1.0);
    CHECK_THROWS_AS(Measure::bernoulli("ab", {0.5, 0.6}), MeasureError);
    CHECK_THROWS_AS(Measure::bernoulli("ab", {-0.1, 1.1}), MeasureError);
    CHECK_THROWS_AS(bernoulli("a=0.5 c=0.5 a=0.1"), std::exception);
}

TEST_CASE("markov construction") {
    Measure m = Measure::markov("ab", {0.5, 0.5}, std::vector<std::vector<double>>{{0.5, 0.5}, {0.5, 0.5}}, {0, 1});
    Measure b = Measure::bernoulli("ab", {0.5, 0.5});
    for (std::size_t n = 0; n <= 8; ++n) {
        for (const auto& w : oracle::words("ab", n)) {
            CHECK(std::abs(word_mass(m, w) - word_mass(b, w)) <= 1e-15);
        }
    }
    Measure dirac = Measure::markov("ab", {1.0, 0.0}, std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 1.0}}, {0, 1});
    CHECK(dirac.is_invariant());
    Measure skew = Measure::markov("ab", {1.0, 0.0}, std::vector<std::vector<double>>{{0.5, 0.5}, {0.5, 0.5}}, {0, 1});
    CHECK_FALSE(skew.is_invariant());
    CHECK_THROWS_AS(
        Measure::markov("ab", {0.5, 0.5}, std::vector<std::vector<double>>{{0.5, 0.6}, {0.5, 0.5}}, {0, 1}),
        MeasureError);
    CHECK_THROWS_AS(
        Measure::markov("ab", {0.5, 0.5}, std::vector<std::vector<double>>{{1.5, -0.5}, {0.5, 0.5}}, {0, 1}),
        MeasureError);
    CHECK_THROWS_AS(Measure::markov("ab", {0.5, 0.5}, std::vector<std::vector<double>>{{1.0}}, {0}), std::exception);
}

TEST_CASE("maximal entropy of the three-letter vertex shift") {
    Sft s = sft_from_adjacency("abc", {{1, 0, 1}, {1, 1, 1}, {1, 1, 1}});
    PerronData p = perron_data(s);
    const double lambda = (3.0 + std::sqrt(5.0)) / 2.0;
    CHECK(std::abs(p.lambda - lambda) <= 1e-12);
    Measure m = max_entropy(s);
    REQUIRE(m.num_states() == 3);
    const double z = 2 * lambda - 3;
    const std::vector<double> pi = {(lambda - 2) / z, (lambda - 2) / z, 1 / z};
    const std::vector<std::vector<double>> rows = {{1 / lambda, 0, 1 / (lambda - 1)},
                                                   {(lambda - 2) / lambda, 1 / lambda, 1 / lambda},
                                                   {(lambda - 2) / lambda, 1 / lambda, 1 / lambda}};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(m.initial()[i] - pi[i]) <= 1e-12);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(std::abs(m.transition().coeff(i, j) - rows[i][j]) <= 1e-12);
        }
    }
    CHECK(m.is_invariant());
    // decimals
    CHECK(m.initial()[0] == doctest::Approx(0.2763932).epsilon(1e-7));
    CHECK(m.initial()[2] == doctest::Approx(0.4472136).epsilon(1e-7));
    CHECK(m.transition().coeff(0, 2) == doctest::Approx(0.6180340).epsilon(1e-7));
    CHECK(m.transition().coeff(1, 0) == doctest::Approx(0.2360680).epsilon(1e-7));
    double total = 0.0;
    for (const auto& w : oracle::words("abc", 2)) {
        total += word_mass(m, w);
        if (w == "ab") {
            CHECK(word_mass(m, w) == 0.0);
        }
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    check_consistent(m, 6, true);
}

TEST_CASE("maximal entropy of simple shifts") {
    Measure full = max_entropy(sft_from_forbidden_blocks("abc", {}));
    for (const auto& w : oracle::words("abc", 4)) {
        CHECK(std::abs(word_mass(full, w) - 1.0 / 81) <= 1e-14);
    }
    Sft golden = sft_from_forbidden_blocks("ab", {"aa"});
    CHECK(std::abs(perron_data(golden).lambda - (1 + std::sqrt(5.0)) / 2) <= 1e-12);
    CHECK_THROWS_AS(max_entropy(sft_from_adjacency("ab", {{1, 0}, {0, 1}})), NotIrreducibleError);
}

TEST_CASE("maximal entropy: stationarity and support on assorted shifts") {
    std::vector<Sft> shifts = {sft_from_forbidden_blocks("ab", {"aa"}), sft_from_forbidden_blocks("abc", {"ab", "cc"}),
                               counterexample_family(1, 2), counterexample_family(2, 3),
                               counterexample_family(2, 4), sft_from_adjacency("ab", {{0, 1}, {1, 0}})};
    for (const Sft& s : shifts) {
        Measure m = max_entropy(s);
        const auto& P = m.transition();
        const auto& pi = m.initial();
        std::vector<double> pip(pi.size(), 0.0);
        for (int i = 0; i < P.outerSize(); ++i) {
            double row = 0.0;
            for (SparseMatrix::InnerIterator it(P, i); it; ++it) {
                row += it.value();
                pip[static_cast<std::size_t>(it.col())] += pi[static_cast<std::size_t>(i)] * it.value();
            }
            CHECK(std::abs(row - 1.0) <= 1e-12);
        }
        for (std::size_t i = 0; i < pi.size(); ++i) {
            CHECK(std::abs(pip[i] - pi[i]) <= 1e-10);
        }
        CHECK(m.is_invariant());
        Dfa lang = language_dfa(s);
        const std::size_t max_len = s.alphabet().size() == 2 ? 8 : 6;
        for (std::size_t n = 0; n <= max_len; ++n) {
            for (const auto& w : oracle::words(s.alphabet(), n)) {
                REQUIRE((word_mass(m, w) > 0.0) == accepts(lang, w));
            }
        }
        check_consistent(m, s.alphabet().size() == 2 ? 6 : 4, true);
    }
}

TEST_CASE("kolmogorov consistency on random measures") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Measure b = Measure::bernoulli("abc", oracle::random_distribution(rng, 3));
        check_consistent(b, 5, true);
        std::vector<std::vector<double>> P;
        for (int i = 0; i < 3; ++i) {
            P.push_back(oracle::random_distribution(rng, 3));
        }
        Measure stat = Measure::markov("abc", oracle::stationary(P), P, {0, 1, 2});
        CHECK(stat.is_invariant());
        check_consistent(stat, 5, true);
        Measure any = Measure::markov("abc", oracle::random_distribution(rng, 3), P, {0, 1, 2});
        check_consistent(any, 5, false);
        for (const auto& w : oracle::words("abc", 4)) {
            CHECK(std::abs(word_mass(stat, w) - oracle::markov_mass("abc", stat.initial(), P, w)) <= 1e-14);
        }
    }
}

TEST_CASE("bernoulli sequences converge to the product form") {
    auto seq = MeasureSequence::bernoulli_formula("ab", 1.0, 0.5);
    const Measure& limit = *seq.limit();
    double prev = 1.0;
    for (std::size_t n : {10u, 100u, 10000u, 1000000u}) {
        double err = 0.0;
        for (const auto& w : oracle::words("ab", 3)) {
            err = std::max(err, std::abs(word_mass(seq(n), w) - word_mass(limit, w)));
        }
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("measure spec text") {
    Measure m = parse_measure_spec("markov letters=ab pi=0.5,0.5 P=0.9,0.1;0.1,0.9");
    CHECK(m.kind() == MeasureKind::markov);
    CHECK(word_mass(m, "ab") == doctest::Approx(0.05));
    Measure b = parse_measure_spec("bernoulli a=0.25 b=0.75");
    CHECK(b.prob('b') == 0.75);
    CHECK_THROWS(parse_measure_spec("gaussian a=1"));
}

}
