#pragma once

// Variational coherent / displaced-Fock ansatz quantities. The ground state
// for beta > 0, Delta > 0 is close to D(alpha_0)|0> with alpha_0 the real
// root of alpha^3 + Delta alpha + beta = 0; near the terminal interval the
// ground state is close to D(alpha_n)|n> with the linear coefficient
// shifted to Delta + 2n.

#include <algorithm>
#include <cmath>

#include "kerrfock/common.hpp"
#include "kerrfock/model.hpp"

namespace kerrfock {

struct AnsatzResult {
    double alpha = 0.0;
    double residual = 0.0;
};

struct RegionCGeometry {
    int n = 0;
    double delta_star = 0.0;
    double q_beta_min = 0.0;
};

namespace detail {

// Real roots of t^3 + p t + q, by Cardano / trigonometric branches.
inline int cubic_real_roots(double p, double q, double roots[3]) {
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-0.5 * q + sq);
        const double v = std::cbrt(-0.5 * q - sq);
        roots[0] = u + v;
        return 1;
    }
    if (p == 0.0) {  // triple root at 0 (q must be 0 here)
        roots[0] = 0.0;
        return 1;
    }
    const double r = 2.0 * std::sqrt(-p / 3.0);
    double arg = 3.0 * q / (p * r);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg);
    for (int k = 0; k < 3; ++k)
        roots[k] = r * std::cos((theta - 2.0 * M_PI * k) / 3.0);
    return 3;
}

inline double newton_polish(double x, double p, double q) {
    for (int it = 0; it < 4; ++it) {
        const double f = x * x * x + p * x + q;
        const double df = 3.0 * x * x + p;
        if (df == 0.0) break;
        const double step = f / df;
        x -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

inline AnsatzResult solve_drive_cubic(double linear_coeff, double beta) {
    if (!(beta >= 0.0)) throw FeasibilityError("drive strength beta must be non-negative");
    double roots[3];
    const int nroots = cubic_real_roots(linear_coeff, beta, roots);
    // Unique root for linear_coeff > 0. With three real roots, take the most
    // negative one: it is the branch continuously connected to the
    // large-detuning coherent ground state (alpha -> -beta/Delta as
    // Delta -> +inf, and alpha -> -sqrt(-Delta) on the drive line).
    double best = roots[0];
    for (int k = 1; k < nroots; ++k) best = std::min(best, roots[k]);
    if (beta == 0.0 && linear_coeff <= 0.0) {
        // Degenerate drive-free case: the adiabatic branch terminates at 0.
        best = (linear_coeff < 0.0) ? -std::sqrt(-linear_coeff) : 0.0;
    }
    best = newton_polish(best, linear_coeff, beta);
    AnsatzResult res;
    res.alpha = best;
    res.residual = std::abs(best * best * best + linear_coeff * best + beta);
    return res;
}

}  // namespace detail

// alpha_0: real solution of alpha^3 + Delta alpha + beta = 0 on the branch
// connected to the Delta > 0 ground state.
inline AnsatzResult coherent_alpha(double delta, double beta) {
    return detail::solve_drive_cubic(delta, beta);
}

// alpha_n: real solution of alpha^3 + (Delta + 2n) alpha + beta = 0.
inline AnsatzResult displaced_alpha(int n, double delta, double beta) {
    if (n < 0) throw IndexError("Fock index must be non-negative");
    return detail::solve_drive_cubic(delta + 2.0 * static_cast<double>(n), beta);
}

// The straight-line drive profile beta = sqrt(-Delta_f) (Delta - Delta_f)
// that keeps the coherent ansatz coupling-free in region B.
inline double region_b_beta(double delta, double delta_f) {
    if (!(delta_f < 0.0)) throw FeasibilityError("region-B line requires delta_f < 0");
    if (delta < delta_f) throw FeasibilityError("region-B line requires delta >= delta_f");
    return std::sqrt(-delta_f) * (delta - delta_f);
}

// Leading-order vertical penalty density in the terminal interval,
// Q_beta = sqrt(n+1)/(1/2+delta)^2 + sqrt(n)/(1/2-delta)^2, where delta is
// the detuning offset from the interval midpoint.
inline double q_beta_analytic(int n, double delta_offset) {
    if (n < 1) throw IndexError("q_beta_analytic requires n >= 1");
    if (!(std::abs(delta_offset) < 0.5))
        throw DegeneratePointError("offset reaches an adjacent crossing; Q_beta diverges");
    const double up = std::sqrt(static_cast<double>(n + 1));
    const double down = std::sqrt(static_cast<double>(n));
    const double dplus = 0.5 + delta_offset;
    const double dminus = -0.5 + delta_offset;
    return up / (dplus * dplus) + down / (dminus * dminus);
}

// Exact minimizer of Q_beta over the offset: ((1/2-d)/(1/2+d))^3 = sqrt(n/(n+1))
// solved in closed form via r = (n/(n+1))^(1/6), d* = (1-r)/(2(1+r)).
inline RegionCGeometry optimal_offset(int n) {
    if (n < 1) throw IndexError("optimal_offset requires n >= 1");
    const double r = std::pow(static_cast<double>(n) / static_cast<double>(n + 1), 1.0 / 6.0);
    RegionCGeometry geo;
    geo.n = n;
    geo.delta_star = (1.0 - r) / (2.0 * (1.0 + r));
    geo.q_beta_min = q_beta_analytic(n, geo.delta_star);
    return geo;
}

// Small-n approximation delta ~ 1/(6(sqrt(n+1)+sqrt(n))^2) of the optimal offset.
inline double optimal_offset_approx(int n) {
    if (n < 1) throw IndexError("optimal_offset_approx requires n >= 1");
    const double s = std::sqrt(static_cast<double>(n + 1)) + std::sqrt(static_cast<double>(n));
    return 1.0 / (6.0 * s * s);
}

}  // namespace kerrfock
