#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace vbc {

// External clustering quality metrics. Inputs are parallel vectors of
// cluster assignments and true class ids; both are arbitrary integer
// labelings (only equality matters).

double purity(const std::vector<int>& assignments, const std::vector<int>& truth);

// Adjusted Rand index from the confusion matrix. Degenerate denominator
// (both partitions trivial) scores 1.
double ari(const std::vector<int>& assignments, const std::vector<int>& truth);

// 2*MI / (H(assignments) + H(truth)), natural log, 0*log 0 = 0. When both
// partitions are single-class the value is defined as 1.
double nmi(const std::vector<int>& assignments, const std::vector<int>& truth);

struct SweepRow {
    int k = 0;
    double purity = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    bool ok = false;
    std::string error;
};

// CSV schema: K,purity,nmi,ari. Failed rows carry nan.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace vbc
