#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "ratdense/combinatorial.hpp"
#include "ratdense/error.hpp"

using namespace ratdense;

TEST_SUITE("combinatorial") {

TEST_CASE("full language and even lengths") {
    Sft golden = sft_from_forbidden_blocks("ab", {"aa"});
    auto all = combinatorial_density(universal_dfa("ab"), golden, 100);
    for (double r : all.ratios) {
        CHECK(r == 1.0);
    }
    CHECK(all.estimate == 1.0);
    auto even = combinatorial_density(parse_regex("((a|b)(a|b))*", "ab"), sft_from_forbidden_blocks("ab", {}), 1000);
    CHECK(std::abs(even.estimate - 0.5) <= 1e-3);
    CHECK(even.converged);
    CHECK_FALSE(even.strong);
}

TEST_CASE("single a over three letters") {
    auto r = combinatorial_density(parse_regex("(b|c)*a(b|c)*", "abc"), sft_from_forbidden_blocks("abc", {}), 60);
    for (std::size_t n = 0; n < 60; ++n) {
        // n 2^(n-1) / 3^n
        BigInt expect = n == 0 ? BigInt(0) : BigInt(n) * (BigInt(1) << (n - 1));
        CHECK(r.language_counts[n] == expect);
        CHECK(r.shift_counts[n] == boost::multiprecision::pow(BigInt(3), static_cast<unsigned>(n)));
    }
    CHECK(r.ratios[59] < 1e-8);
    CHECK_THROWS_AS(combinatorial_density(parse_regex("a*", "ab"), sft_from_forbidden_blocks("abc", {}), 5),
                    AlphabetMismatchError);
}

TEST_CASE("product counts equal joint enumeration") {
    const std::vector<std::pair<std::string, std::vector<std::string>>> shifts = {
        {"ab", {"aa"}}, {"ab", {"aba", "bb"}}, {"abc", {"ab", "cc"}}};
    const std::vector<std::string> regexes = {".*a", "a.*b.*", "(..)*"};
    for (const auto& [alphabet, blocks] : shifts) {
        Sft x = sft_from_forbidden_blocks(alphabet, blocks);
        for (const std::string& rx : regexes) {
            Dfa d = parse_regex(rx, alphabet);
            const std::size_t max_n = alphabet.size() == 2 ? 10 : 7;
            auto r = combinatorial_density(d, x, max_n + 1);
            for (std::size_t n = 0; n <= max_n; ++n) {
                std::size_t in_l = 0, in_x = 0;
                for (const auto& w : oracle::words(alphabet, n)) {
                    bool in = false;
                    for (const auto& l : oracle::words(alphabet, 3)) {
                        for (const auto& rr : oracle::words(alphabet, 3)) {
                            in |= oracle::avoids(l + w + rr, blocks);
                        }
                    }
                    in_x += in;
                    in_l += in && oracle::matches(rx, w);
                }
                CHECK(r.shift_counts[n] == in_x);
                CHECK(r.language_counts[n] == in_l);
            }
        }
    }
}

TEST_CASE("prefix densities on the full shift") {
    auto table = ideal_density_measure(sft_from_forbidden_blocks("ab", {}), 3, 400);
    CHECK(table.size() == 1 + 2 + 4 + 8);
    for (const auto& p : table) {
        CHECK(p.additive);
        const double expect = std::pow(2.0, -static_cast<double>(p.word.size()));
        CHECK(std::abs(p.estimate - expect) <= 3.0 * static_cast<double>(p.word.size() + 1) / 400);
    }
    CHECK(table.front().word.empty());
    CHECK(table.front().estimate == 1.0);
    CHECK_THROWS_AS(ideal_density_measure(sft_from_forbidden_blocks("ab", {}), 9), CapExceededError);
}

TEST_CASE("prefix counts are additive") {
    for (const Sft& x : {sft_from_forbidden_blocks("ab", {}), sft_from_forbidden_blocks("ab", {"bb"})}) {
        for (std::size_t len = 0; len <= 4; ++len) {
            for (const auto& u : factors(x, len)) {
                auto whole = prefix_counts(x, u, 21);
                std::vector<BigInt> parts(21);
                for (char a : x.alphabet()) {
                    auto c = prefix_counts(x, u + a, 21);
                    for (std::size_t i = 0; i < 21; ++i) {
                        parts[i] += c[i];
                    }
                }
                for (std::size_t i = len + 1; i <= 20; ++i) {
                    CHECK(parts[i] == whole[i]);
                }
            }
        }
    }
}

TEST_CASE("fibonacci word") {
    CHECK(fibonacci_word(13) == "0100101001001");
    auto w = fibonacci_word(10946);
    auto fc = factor_complexity(w, 500);
    for (std::size_t n = 0; n <= 500; ++n) {
        REQUIRE(fc[n] == n + 1);
    }
    auto small = fibonacci_word(3000);
    auto fs = factor_complexity(small, 40);
    for (std::size_t n = 1; n <= 40; ++n) {
        CHECK(fs[n] == oracle::distinct_factors(small, n));
    }
    CHECK(factor_complexity("aaaa", 3) == std::vector<std::size_t>{1, 1, 1, 1});
    CHECK(factor_complexity("abab", 4) == std::vector<std::size_t>{1, 2, 2, 2, 1});
}

TEST_CASE("sturmian estimates") {
    const double phi = (1 + std::sqrt(5.0)) / 2;
    auto zero = sturmian_check("0", 10000, 100000);
    CHECK(std::abs(zero.right_special - 1 / phi) <= 1e-2);
    CHECK(std::abs(zero.frequency - 1 / phi) <= 1e-2);
    auto one = sturmian_check("1", 10000, 100000);
    CHECK(std::abs(one.right_special - 1 / (phi * phi)) <= 1e-2);
    CHECK(std::abs(one.frequency - 1 / (phi * phi)) <= 1e-2);
    CHECK_THROWS_AS(sturmian_check("11", 100, 100), InvalidArgumentError);
    CHECK_THROWS_AS(sturmian_check("02", 100, 100), InvalidArgumentError);
    // 1 + f_(n-1)(x, u) counts the factors of length n beginning with u
    const std::string w = fibonacci_word(5000);
    for (const std::string u : {"0", "01", "010", "10"}) {
        for (std::size_t n : {8u, 20u, 33u}) {
            std::set<std::string> starts;
            for (std::size_t i = 0; i + n <= w.size(); ++i) {
                if (w.compare(i, u.size(), u) == 0) {
                    starts.insert(w.substr(i, n));
                }
            }
            std::string window = fibonacci_word(n - 1);
            std::reverse(window.begin(), window.end());
            CHECK(starts.size() == 1 + count_occurrences(window, u));
        }
    }
}

}
