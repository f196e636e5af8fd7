#pragma once

#include <complex>
#include <vector>

namespace wg {

// Complex general band matrix with LU factorization (LAPACK gbtrf/gbtrs).
// Entries outside the band are silently ignored by `add` only when zero;
// a nonzero entry outside the band throws.
class BandedMatrix {
public:
    using cplx = std::complex<double>;

    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    void add(int i, int j, cplx value);
    // Factorizes in place; further `add` calls are rejected.
    void factor();
    bool factored() const { return factored_; }
    // Overwrites b with A^{-1} b.
    void solve(std::vector<cplx>& b) const;

private:
    int n_, kl_, ku_, ldab_;
    std::vector<cplx> ab_;
    std::vector<int> ipiv_;
    bool factored_ = false;
};

}  // namespace wg
