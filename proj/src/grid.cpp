#include "mitopt/grid.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mitopt::grid {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// total order: larger value wins, then the lexicographically smaller tuple
bool better1(const Best1& a, const Best1& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.i < b.i;
}

bool better2(const Best2& a, const Best2& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.j != b.j) return a.j < b.j;
    return a.k < b.k;
}

bool better3(const Best3& a, const Best3& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.i != b.i) return a.i < b.i;
    if (a.j != b.j) return a.j < b.j;
    return a.k < b.k;
}

}  // namespace

Best1 argmax1_serial(int n, const Eval1& f) {
    Best1 best{kNegInf, n};
    for (int i = 0; i < n; ++i) {
        Best1 cur{f(i), i};
        if (better1(cur, best)) best = cur;
    }
    return best;
}

Best2 argmax2_serial(int n, const Eval2& f) {
    Best2 best{kNegInf, n, n};
    for (int k = 1; k < n; ++k)
        for (int j = 0; j < k; ++j) {
            Best2 cur{f(j, k), j, k};
            if (better2(cur, best)) best = cur;
        }
    return best;
}

Best3 argmax3_serial(int n, const Eval3& f) {
    Best3 best{kNegInf, n, n, n};
    for (int k = 2; k < n; ++k)
        for (int j = 1; j < k; ++j)
            for (int i = 0; i < j; ++i) {
                Best3 cur{f(i, j, k), i, j, k};
                if (better3(cur, best)) best = cur;
            }
    return best;
}

#ifdef _OPENMP

Best1 argmax1(int n, const Eval1& f) {
    Best1 best{kNegInf, n};
#pragma omp parallel
    {
        Best1 local{kNegInf, n};
#pragma omp for nowait schedule(static)
        for (int i = 0; i < n; ++i) {
            Best1 cur{f(i), i};
            if (better1(cur, local)) local = cur;
        }
#pragma omp critical(mitopt_grid_reduce1)
        if (better1(local, best)) best = local;
    }
    return best;
}

Best2 argmax2(int n, const Eval2& f) {
    Best2 best{kNegInf, n, n};
#pragma omp parallel
    {
        Best2 local{kNegInf, n, n};
#pragma omp for nowait schedule(dynamic, 16)
        for (int k = 1; k < n; ++k)
            for (int j = 0; j < k; ++j) {
                Best2 cur{f(j, k), j, k};
                if (better2(cur, local)) local = cur;
            }
#pragma omp critical(mitopt_grid_reduce2)
        if (better2(local, best)) best = local;
    }
    return best;
}

Best3 argmax3(int n, const Eval3& f) {
    Best3 best{kNegInf, n, n, n};
#pragma omp parallel
    {
        Best3 local{kNegInf, n, n, n};
#pragma omp for nowait schedule(dynamic, 4)
        for (int k = 2; k < n; ++k)
            for (int j = 1; j < k; ++j)
                for (int i = 0; i < j; ++i) {
                    Best3 cur{f(i, j, k), i, j, k};
                    if (better3(cur, local)) local = cur;
                }
#pragma omp critical(mitopt_grid_reduce3)
        if (better3(local, best)) best = local;
    }
    return best;
}

#else

Best1 argmax1(int n, const Eval1& f) { return argmax1_serial(n, f); }
Best2 argmax2(int n, const Eval2& f) { return argmax2_serial(n, f); }
Best3 argmax3(int n, const Eval3& f) { return argmax3_serial(n, f); }

#endif

}  // namespace mitopt::grid
