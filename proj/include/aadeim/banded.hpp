#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <span>
#include <vector>

#include "aadeim/errors.hpp"
#include "aadeim/linalg.hpp"

namespace aadeim {

// General banded matrix in LAPACK gb storage: entry (i,j) lives at
// ab(kl + ku + i - j, j). The kl leading rows of ab are fill space for the
// pivoted LU, so storage height is 2*kl + ku + 1.
class BandedMatrix {
public:
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ab_(Matrix::Zero(2 * kl + ku + 1, n)) {}

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    void set_zero() { ab_.setZero(); }

    double& ref(int i, int j) { return ab_(kl_ + ku_ + i - j, j); }
    double get(int i, int j) const { return ab_(kl_ + ku_ + i - j, j); }
    void add(int i, int j, double v) { ab_(kl_ + ku_ + i - j, j) += v; }

    bool in_band(int i, int j) const { return i - j <= kl_ && j - i <= ku_; }

    // y = A x over the logical band (valid before factorization only).
    Vector multiply(const Vector& x) const {
        Vector y = Vector::Zero(n_);
        for (int j = 0; j < n_; ++j) {
            const int ilo = std::max(0, j - ku_);
            const int ihi = std::min(n_ - 1, j + kl_);
            for (int i = ilo; i <= ihi; ++i) y(i) += get(i, j) * x(j);
        }
        return y;
    }

    // In-place LU with partial pivoting (textbook dgbtf2). The upper bandwidth
    // grows to kl + ku through row swaps; the fill rows absorb it.
    void factorize(std::vector<int>& pivots) {
        pivots.resize(static_cast<std::size_t>(n_));
        const int kut = kl_ + ku_;
        for (int j = 0; j < n_; ++j) {
            const int imax = std::min(n_ - 1, j + kl_);
            int p = j;
            for (int i = j + 1; i <= imax; ++i)
                if (std::abs(ref(i, j)) > std::abs(ref(p, j))) p = i;
            pivots[static_cast<std::size_t>(j)] = p;
            if (ref(p, j) == 0.0)
                throw numeric_error("banded LU: zero pivot at column " + std::to_string(j));
            const int cmax = std::min(n_ - 1, j + kut);
            if (p != j)
                for (int c = j; c <= cmax; ++c) std::swap(ref(j, c), ref(p, c));
            const double inv_piv = 1.0 / ref(j, j);
            for (int i = j + 1; i <= imax; ++i) {
                const double l = ref(i, j) * inv_piv;
                ref(i, j) = l;
                for (int c = j + 1; c <= cmax; ++c) ref(i, c) -= l * ref(j, c);
            }
        }
        factored_ = true;
    }

    void solve_in_place(const std::vector<int>& pivots, Vector& b) const {
        const int kut = kl_ + ku_;
        for (int j = 0; j < n_; ++j) {
            const int p = pivots[static_cast<std::size_t>(j)];
            if (p != j) std::swap(b(j), b(p));
            const int imax = std::min(n_ - 1, j + kl_);
            for (int i = j + 1; i <= imax; ++i) b(i) -= get(i, j) * b(j);
        }
        for (int j = n_ - 1; j >= 0; --j) {
            b(j) /= get(j, j);
            const int ilo = std::max(0, j - kut);
            for (int i = ilo; i < j; ++i) b(i) -= get(i, j) * b(j);
        }
    }

    bool factored() const { return factored_; }

private:
    int n_, kl_, ku_;
    Matrix ab_;
    bool factored_ = false;
};

// An entry outside the band, e.g. the periodic wrap of an upwind stencil.
struct BandCorrection {
    int row;
    int col;
    double value;
};

// Solves (B + sum_k v_k e_{row_k} e_{col_k}^T) x = b by Sherman-Morrison-
// Woodbury on the banded core. Intended for a handful of corrections.
class CorrectedBandedSolver {
public:
    void factorize(BandedMatrix core, std::span<const BandCorrection> corrections) {
        core_ = std::move(core);
        core_.factorize(pivots_);
        const int c = static_cast<int>(corrections.size());
        corrections_.assign(corrections.begin(), corrections.end());
        if (c == 0) return;
        const int n = core_.size();
        z_ = Matrix::Zero(n, c);
        for (int k = 0; k < c; ++k) {
            Vector e = Vector::Zero(n);
            e(corrections_[static_cast<std::size_t>(k)].row) = 1.0;
            core_.solve_in_place(pivots_, e);
            z_.col(k) = e;
        }
        Matrix cap = Matrix::Identity(c, c);
        for (int k = 0; k < c; ++k)
            for (int l = 0; l < c; ++l)
                cap(k, l) += corrections_[static_cast<std::size_t>(k)].value *
                             z_(corrections_[static_cast<std::size_t>(k)].col, l);
        cap_lu_.compute(cap);
        if (!(cap_lu_.rcond() > 1e-14))
            throw numeric_error("corrected banded solve: singular capacitance matrix");
    }

    void solve_in_place(Vector& b) const {
        core_.solve_in_place(pivots_, b);
        const int c = static_cast<int>(corrections_.size());
        if (c == 0) return;
        Vector t(c);
        for (int k = 0; k < c; ++k)
            t(k) = corrections_[static_cast<std::size_t>(k)].value *
                   b(corrections_[static_cast<std::size_t>(k)].col);
        b.noalias() -= z_ * cap_lu_.solve(t);
    }

private:
    BandedMatrix core_{0, 0, 0};
    std::vector<int> pivots_;
    std::vector<BandCorrection> corrections_;
    Matrix z_;
    Eigen::PartialPivLU<Matrix> cap_lu_;
};

} // namespace aadeim
