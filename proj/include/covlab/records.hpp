#pragma once

#include <vector>

namespace covlab {

/// One solver output per cardinality N. `normalized` is N^{1/d} * rho for
/// covering and P / N^{s/d} for polarization; `mesh_certificate` bounds the
/// gap to the true-set value (0 for exact records).
struct SequenceRecord {
    int N = 0;
    double value = 0.0;
    double normalized = 0.0;
    bool exact = false;
    double mesh_certificate = 0.0;
};

/// Trailing-window estimates of liminf/limsup of the normalized sequence.
struct LimitWindow {
    double liminf_est = 0.0;
    double limsup_est = 0.0;
    double window_fraction = 0.5;
    bool plateau = false;
};

}  // namespace covlab
