#pragma once

#include <cstdint>
#include <random>

#include "xdiff/field.hpp"

namespace xdiff::testing {

/// Fixed-seed generator so that every run sees the same "random" fields.
inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(0x5eed1234ULL);
    return gen;
}

inline ScalarField random_field(const Grid& g, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    ScalarField f(g);
    for (double& v : f.values()) v = u(rng());
    return f;
}

/// Random face values; no-flux wall faces stay zero and periodic face N
/// mirrors face 0, matching what the operators produce.
inline FaceField random_faces(const Grid& g, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    FaceField f(g);
    const std::size_t n = g.cells_per_axis();
    for (int a = 0; a < g.dimension(); ++a) {
        for (std::size_t t = 0; t < g.tangential_count(); ++t) {
            for (std::size_t k = 0; k <= n; ++k) {
                if (g.boundary() == Boundary::noflux && (k == 0 || k == n)) continue;
                f.at(a, k, t) = (k == n) ? f.at(a, 0, t) : u(rng());
            }
        }
    }
    return f;
}

}  // namespace xdiff::testing
