#pragma once

#include <string>
#include <string_view>

#include "povm/errors.hpp"

namespace povm {

/// Numerical thresholds shared by all modules. Thresholds marked "relative"
/// are scaled by (1 + Frobenius norm) of the operator being tested.
struct Tolerances {
    double herm = 1e-10;      ///< Hermitian symmetry, relative
    double psd = 1e-9;        ///< negative eigenvalue allowance, relative
    double trace = 1e-9;      ///< unit trace and null-element threshold
    double complete = 1e-9;   ///< ||sum P_i - I||_F
    double rank_gap = 1e-8;   ///< singular values / eigenvalues below this count as zero
    double ambiguity = 1e2;   ///< (rank_gap, rank_gap * ambiguity] is the ambiguous band
    double merge = 1e-7;      ///< leaf identity in decompositions
    double direction = 1e-6;  ///< allowed | |n| - 1 | for loaded directions

    /// Override a threshold by name (herm, psd, trace, complete, rank_gap,
    /// ambiguity, merge, direction).
    void set(std::string_view key, double value) {
        if (!(value > 0.0)) {
            throw InvalidInput("tolerance '" + std::string(key) + "' must be positive");
        }
        if (key == "herm") herm = value;
        else if (key == "psd") psd = value;
        else if (key == "trace") trace = value;
        else if (key == "complete") complete = value;
        else if (key == "rank_gap") rank_gap = value;
        else if (key == "ambiguity") ambiguity = value;
        else if (key == "merge") merge = value;
        else if (key == "direction") direction = value;
        else throw InvalidInput("unknown tolerance key '" + std::string(key) + "'");
    }
};

} // namespace povm
