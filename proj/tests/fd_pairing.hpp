#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

// Central differences for a degenerate eigenvalue cluster.
// plus / minus: the cluster's eigenvalues at +t and -t, each sorted ascending.
// Branch slopes come out ascending. Eigenvalues at -t are paired in reverse across slope groups
// (their order flips with the sign of t) and in the same order inside a group of equal slopes
// (there the order is set by the second-order term, which does not flip).
inline std::vector<double> paired_central_differences(const std::vector<double>& plus, const std::vector<double>& minus,
                                                      double lambda0, double t, double group_tol) {
    std::size_t m = plus.size();
    std::vector<double> sp(m);
    for (std::size_t i = 0; i < m; ++i) sp[i] = (plus[i] - lambda0) / t;
    std::vector<double> out(m);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i + 1;
        while (j < m && std::abs(sp[j] - sp[i]) <= group_tol) ++j;
        for (std::size_t k = i; k < j; ++k) {
            double mk = (lambda0 - minus[m - j + (k - i)]) / t;
            out[k] = 0.5 * (sp[k] + mk);
        }
        i = j;
    }
    return out;
}
