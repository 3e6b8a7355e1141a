#include "vbc/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace vbc {

namespace {

// Dense confusion matrix with marginals; rows = clusters, cols = classes.
struct Contingency {
    std::vector<std::vector<std::size_t>> n;
    std::vector<std::size_t> row_sum;
    std::vector<std::size_t> col_sum;
    std::size_t total = 0;
};

Contingency contingency(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("metrics: assignment/truth length mismatch");
    if (a.empty()) throw std::invalid_argument("metrics: empty input");

    std::map<int, std::size_t> ra, rb;
    for (int v : a) ra.emplace(v, ra.size());
    for (int v : b) rb.emplace(v, rb.size());

    Contingency c;
    c.n.assign(ra.size(), std::vector<std::size_t>(rb.size(), 0));
    c.row_sum.assign(ra.size(), 0);
    c.col_sum.assign(rb.size(), 0);
    c.total = a.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t r = ra[a[i]];
        const std::size_t s = rb[b[i]];
        ++c.n[r][s];
        ++c.row_sum[r];
        ++c.col_sum[s];
    }
    return c;
}

double choose2(std::size_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

} // namespace

double purity(const std::vector<int>& assignments, const std::vector<int>& truth) {
    const Contingency c = contingency(assignments, truth);
    std::size_t hits = 0;
    for (const std::vector<std::size_t>& row : c.n) {
        std::size_t best = 0;
        for (std::size_t v : row) best = std::max(best, v);
        hits += best;
    }
    return static_cast<double>(hits) / static_cast<double>(c.total);
}

double ari(const std::vector<int>& assignments, const std::vector<int>& truth) {
    const Contingency c = contingency(assignments, truth);
    if (c.total < 2) throw std::invalid_argument("ari: need at least 2 items");

    double sum_nij = 0.0;
    for (const std::vector<std::size_t>& row : c.n)
        for (std::size_t v : row) sum_nij += choose2(v);
    double sum_a = 0.0;
    for (std::size_t v : c.row_sum) sum_a += choose2(v);
    double sum_b = 0.0;
    for (std::size_t v : c.col_sum) sum_b += choose2(v);

    const double expected = sum_a * sum_b / choose2(c.total);
    const double maximum = 0.5 * (sum_a + sum_b);
    const double denom = maximum - expected;
    if (std::abs(denom) < 1e-12) return 1.0; // both partitions trivial
    return (sum_nij - expected) / denom;
}

double nmi(const std::vector<int>& assignments, const std::vector<int>& truth) {
    const Contingency c = contingency(assignments, truth);
    const double n = static_cast<double>(c.total);

    auto entropy = [n](const std::vector<std::size_t>& sums) {
        double h = 0.0;
        for (std::size_t v : sums) {
            if (v == 0) continue;
            const double p = static_cast<double>(v) / n;
            h -= p * std::log(p);
        }
        return h;
    };
    const double ha = entropy(c.row_sum);
    const double hb = entropy(c.col_sum);
    if (ha + hb == 0.0) return 1.0; // both partitions single-class

    double mi = 0.0;
    for (std::size_t i = 0; i < c.n.size(); ++i) {
        for (std::size_t j = 0; j < c.n[i].size(); ++j) {
            if (c.n[i][j] == 0) continue;
            const double pij = static_cast<double>(c.n[i][j]) / n;
            const double pi = static_cast<double>(c.row_sum[i]) / n;
            const double pj = static_cast<double>(c.col_sum[j]) / n;
            mi += pij * std::log(pij / (pi * pj));
        }
    }
    return 2.0 * mi / (ha + hb);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "K,purity,nmi,ari\n";
    for (const SweepRow& r : rows) {
        if (r.ok)
            out << r.k << "," << r.purity << "," << r.nmi << "," << r.ari << "\n";
        else
            out << r.k << ",nan,nan,nan\n";
    }
}

} // namespace vbc
