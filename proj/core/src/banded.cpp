#include "wgraph/banded.hpp"

#include <lapacke.h>

#include "wgraph/errors.hpp"

namespace wg {

BandedMatrix::BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1) {
    if (n < 1 || kl < 0 || ku < 0) throw DomainError("invalid band matrix dimensions");
    ab_.assign(static_cast<std::size_t>(ldab_) * static_cast<std::size_t>(n), cplx(0.0));
    ipiv_.assign(static_cast<std::size_t>(n), 0);
}

void BandedMatrix::add(int i, int j, cplx value) {
    if (factored_) throw SolverError("band matrix already factorized");
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DomainError("band matrix index out of range");
    if (i - j > kl_ || j - i > ku_) {
        if (value == cplx(0.0)) return;
        throw DomainError("entry outside the band");
    }
    // column-major band storage with kl extra rows for fill-in
    ab_[static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab_) + static_cast<std::size_t>(kl_ + ku_ + i - j)] +=
        value;
}

void BandedMatrix::factor() {
    if (factored_) return;
    static_assert(sizeof(lapack_complex_double) == sizeof(cplx));
    static_assert(sizeof(lapack_int) == sizeof(int));
    const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_,
                                           reinterpret_cast<lapack_complex_double*>(ab_.data()), ldab_,
                                           reinterpret_cast<lapack_int*>(ipiv_.data()));
    if (info != 0) throw SolverError("band LU factorization failed (singular pivot)");
    factored_ = true;
}

void BandedMatrix::solve(std::vector<cplx>& b) const {
    if (!factored_) throw SolverError("band matrix not factorized");
    if (static_cast<int>(b.size()) != n_) throw DomainError("right-hand side size mismatch");
    const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1,
                                           reinterpret_cast<const lapack_complex_double*>(ab_.data()), ldab_,
                                           reinterpret_cast<const lapack_int*>(ipiv_.data()),
                                           reinterpret_cast<lapack_complex_double*>(b.data()), n_);
    if (info != 0) throw SolverError("band LU solve failed");
}

}  // namespace wg
