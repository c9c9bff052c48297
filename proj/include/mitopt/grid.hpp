#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mitopt/errors.hpp"

// Exhaustive argmax kernels over ordered index tuples. The evaluator must
// be side effect free; cells that are inadmissible should evaluate to
// -infinity. The reduction is a total order on (value, index tuple) with
// ties resolved toward the lexicographically smallest tuple, so the result
// is identical for the serial and the OpenMP variants and independent of
// the thread count. The serial variants are the reference implementations
// the parallel ones are tested against.

namespace mitopt::grid {

using Eval1 = std::function<double(int)>;
using Eval2 = std::function<double(int, int)>;  // (j, k), j < k
using Eval3 = std::function<double(int, int, int)>;  // (i, j, k), i < j < k

struct Best1 {
    double value;
    int i;
};

struct Best2 {
    double value;
    int j, k;
};

struct Best3 {
    double value;
    int i, j, k;
};

Best1 argmax1_serial(int n, const Eval1& f);
Best1 argmax1(int n, const Eval1& f);

Best2 argmax2_serial(int n, const Eval2& f);
Best2 argmax2(int n, const Eval2& f);

Best3 argmax3_serial(int n, const Eval3& f);
Best3 argmax3(int n, const Eval3& f);

// cell counts, for budget checks
inline std::uint64_t cells1(int n) { return static_cast<std::uint64_t>(n); }
inline std::uint64_t cells2(int n) {
    auto m = static_cast<std::uint64_t>(n);
    return m * (m - 1) / 2;
}
inline std::uint64_t cells3(int n) {
    auto m = static_cast<std::uint64_t>(n);
    return m * (m - 1) * (m - 2) / 6;
}

}  // namespace mitopt::grid
