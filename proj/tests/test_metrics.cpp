#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "vbc/metrics.hpp"

using namespace vbc;

TEST_CASE("purity of a bijective relabeling is 1") {
    const std::vector<int> truth = {0, 0, 1, 1, 2, 2};
    const std::vector<int> relabeled = {5, 5, 3, 3, 9, 9};
    CHECK(purity(relabeled, truth) == doctest::Approx(1.0));
    CHECK(ari(relabeled, truth) == doctest::Approx(1.0));
    CHECK(nmi(relabeled, truth) == doctest::Approx(1.0));
}

TEST_CASE("purity hand case {a,a,b} vs {x,y,y}") {
    CHECK(purity({0, 0, 1}, {0, 1, 1}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("purity of one cluster over two balanced classes is 0.5") {
    CHECK(purity({7, 7, 7, 7, 7, 7, 7, 7}, {0, 0, 0, 0, 1, 1, 1, 1}) == doctest::Approx(0.5));
}

TEST_CASE("ari micro-instance matches the pair-counting oracle") {
    const std::vector<int> a = {0, 0, 0, 1, 1, 1};
    const std::vector<int> b = {0, 0, 1, 1, 2, 2};
    const double got = ari(a, b);
    CHECK(got == doctest::Approx(oracle::ari_pairs(a, b)).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.8 / 3.3).epsilon(1e-12));
}

TEST_CASE("nmi is exactly 0 on an independent product grid") {
    // 2 clusters x 3 classes, every cell count 2: statistically independent.
    std::vector<int> a, b;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j)
            for (int r = 0; r < 2; ++r) {
                a.push_back(i);
                b.push_back(j);
            }
    CHECK(nmi(a, b) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("metrics agree with oracles on random micro-instances") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> size_dist(2, 12);
    std::uniform_int_distribution<int> label_dist(0, 3);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = size_dist(rng);
        std::vector<int> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = label_dist(rng);
            b[i] = label_dist(rng);
        }
        CAPTURE(rep);
        CHECK(purity(a, b) == doctest::Approx(oracle::purity(a, b)).epsilon(1e-12));
        CHECK(ari(a, b) == doctest::Approx(oracle::ari_pairs(a, b)).epsilon(1e-12));
        CHECK(nmi(a, b) == doctest::Approx(oracle::nmi_entropy(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("mean ari over random shuffles is near zero") {
    std::vector<int> truth, assign;
    for (int i = 0; i < 60; ++i) {
        truth.push_back(i % 3);
        assign.push_back(i % 3);
    }
    std::mt19937_64 rng(7);
    double sum = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::shuffle(assign.begin(), assign.end(), rng);
        sum += ari(assign, truth);
    }
    const double mean = sum / 1000.0;
    CHECK(mean > -0.05);
    CHECK(mean < 0.05);
}

TEST_CASE("metrics are invariant under label permutations") {
    const std::vector<int> a = {0, 1, 2, 0, 1, 2, 2, 1};
    const std::vector<int> b = {1, 1, 0, 0, 2, 2, 0, 1};
    auto permute = [](const std::vector<int>& v, int shift) {
        std::vector<int> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] + shift) % 3 + 10;
        return out;
    };
    for (int shift : {1, 2}) {
        CHECK(purity(permute(a, shift), b) == doctest::Approx(purity(a, b)));
        CHECK(ari(permute(a, shift), permute(b, shift)) == doctest::Approx(ari(a, b)));
        CHECK(nmi(a, permute(b, shift)) == doctest::Approx(nmi(a, b)));
    }
}

TEST_CASE("metrics reject mismatched or empty inputs") {
    CHECK_THROWS_AS(purity({1, 2}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(nmi({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(ari({1}, {1}), std::invalid_argument);
}
