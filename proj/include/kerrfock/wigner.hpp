#pragma once

// Wigner function on a phase-space grid via the displaced-parity form
// W(alpha) = (2/pi) Tr[rho D(alpha) P D(alpha)^t], with P = diag((-1)^n).
// Axes are Re(alpha) and Im(alpha), so the grid integrates to 1 with
// measure dx dp.
//
// The displacement matrix elements <m|D(alpha)|k> are generated by the
// exact ladder recurrence rather than by exponentiating the truncated
// generator; rows are truncated to the state space while columns extend
// far enough that D|k> has no remaining weight there, which makes W exact
// for any state supported on the truncation.

#include <cmath>
#include <vector>

#include "kerrfock/common.hpp"
#include "kerrfock/fock.hpp"

namespace kerrfock {

struct WignerGrid {
    RealVector x;  // Re(alpha) axis
    RealVector p;  // Im(alpha) axis
    RealMatrix w;  // w(i, j) = W(x(i) + i p(j))

    double integral() const {
        if (x.size() < 2 || p.size() < 2) return 0.0;
        const double dx = x(1) - x(0);
        const double dp = p(1) - p(0);
        return w.sum() * dx * dp;
    }

    double value_at_origin() const {
        Eigen::Index ix = 0, ip = 0;
        x.cwiseAbs().minCoeff(&ix);
        p.cwiseAbs().minCoeff(&ip);
        return w(ix, ip);
    }
};

inline double default_wigner_range(Eigen::Index dim) {
    return std::sqrt(2.0 * static_cast<double>(dim)) + 1.0;
}

namespace detail {

// Fills d(m, k) = <m|D(alpha)|k> for m < rows, k < cols.
// Row 0 is the conjugate coherent expansion; successive rows follow from
// a D = D (a + alpha)  =>  sqrt(m+1) d(m+1, k) = alpha d(m, k) + sqrt(k) d(m, k-1).
inline void displacement_rectangle(Complex alpha, Eigen::Index rows, Eigen::Index cols,
                                   Matrix& d) {
    d.resize(rows, cols);
    const double norm = std::exp(-0.5 * std::norm(alpha));
    d(0, 0) = norm;
    for (Eigen::Index k = 1; k < cols; ++k)
        d(0, k) = d(0, k - 1) * (-std::conj(alpha)) / std::sqrt(static_cast<double>(k));
    for (Eigen::Index m = 0; m + 1 < rows; ++m) {
        const double inv = 1.0 / std::sqrt(static_cast<double>(m + 1));
        d(m + 1, 0) = alpha * d(m, 0) * inv;
        for (Eigen::Index k = 1; k < cols; ++k)
            d(m + 1, k) =
                (alpha * d(m, k) + std::sqrt(static_cast<double>(k)) * d(m, k - 1)) * inv;
    }
}

inline WignerGrid wigner_impl(const Matrix* rho, const Vector* psi, Eigen::Index dim,
                              double x_range, double p_range, int resolution, int jobs) {
    if (resolution < 3) throw ConfigError("Wigner grid resolution must be >= 3");
    if (x_range <= 0.0) x_range = default_wigner_range(dim);
    if (p_range <= 0.0) p_range = default_wigner_range(dim);

    WignerGrid grid;
    grid.x.setLinSpaced(resolution, -x_range, x_range);
    grid.p.setLinSpaced(resolution, -p_range, p_range);
    grid.w.resize(resolution, resolution);

    // columns up to the displaced support of the state space
    const double reach = std::hypot(x_range, p_range) + std::sqrt(static_cast<double>(dim)) + 4.0;
    const Eigen::Index cols = static_cast<Eigen::Index>(std::ceil(reach * reach)) + 16;

    parallel_for(static_cast<std::size_t>(resolution), jobs, [&](std::size_t col) {
        Matrix d;
        Matrix rho_d;
        for (int row = 0; row < resolution; ++row) {
            const Complex alpha(grid.x(row), grid.p(col));
            detail::displacement_rectangle(alpha, dim, cols, d);
            double val = 0.0;
            if (psi) {
                // c_k = (D|k>)^t |psi>
                for (Eigen::Index k = 0; k < cols; ++k) {
                    const Complex c = d.col(k).dot(*psi);
                    val += (k % 2 == 0 ? 1.0 : -1.0) * std::norm(c);
                }
            } else {
                rho_d.noalias() = (*rho) * d;
                for (Eigen::Index k = 0; k < cols; ++k)
                    val += (k % 2 == 0 ? 1.0 : -1.0) * d.col(k).dot(rho_d.col(k)).real();
            }
            grid.w(row, col) = (2.0 / M_PI) * val;
        }
    });
    return grid;
}

}  // namespace detail

inline WignerGrid wigner_grid(const DensityMatrix& rho, double x_range = 0.0, double p_range = 0.0,
                              int resolution = 101, int jobs = 1) {
    const Matrix m = rho.matrix();
    return detail::wigner_impl(&m, nullptr, rho.dim(), x_range, p_range, resolution, jobs);
}

inline WignerGrid wigner_grid(const StateVector& psi, double x_range = 0.0, double p_range = 0.0,
                              int resolution = 101, int jobs = 1) {
    const Vector v = psi.amplitudes();
    return detail::wigner_impl(nullptr, &v, psi.dim(), x_range, p_range, resolution, jobs);
}

}  // namespace kerrfock
