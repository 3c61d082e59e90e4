#pragma once

#include <cstddef>
#include <vector>

#include "lrdstable/lrd_gaussian.hpp"

namespace lrdstable {

struct HermiteIndex {
    unsigned m1 = 0;
    unsigned m2 = 0;
    unsigned order() const { return m1 + m2; }
};

/// Probabilists' Hermite polynomial He_m(u).
double hermite_poly(unsigned m, double u);

/// Kernel a(gamma) of the alpha != 1 coefficient integrals. DomainError
/// outside (gamma0, pi/2).
double a_gamma(double gamma, double alpha, double gamma0);

/// Kernel a1(gamma) of the alpha = 1 integrals. DomainError for |gamma| >= pi/2
/// or beta2 = 0.
double a1_gamma(double gamma, double beta2);

struct Coefficient {
    double value = 0.0;
    double error = 0.0;
};

/// J_{1,0}(x) = E[1{X <= x} Z1] for the standard stable law generated by the
/// CMS transform, via single integrals over the CMS angle. Negative x (and
/// negative beta2 at alpha = 1) are reduced to the positive case by symmetry.
Coefficient j10_with_error(double x, double alpha, double beta2, double tol = 1e-10);
double j10(double x, double alpha, double beta2, double tol = 1e-10);

/// J_{0,1}(x) = E[1{X <= x} Z2], same dispatch as j10.
Coefficient j01_with_error(double x, double alpha, double beta2, double tol = 1e-10);
double j01(double x, double alpha, double beta2, double tol = 1e-10);

struct OracleOptions {
    /// Scan resolution in z1 and the initial number of outer quadrature nodes.
    std::size_t nodes = 512;
    /// Stop once doubling the outer nodes moves the estimate by less than this.
    double tol = 1e-9;
    int max_doublings = 8;
    /// Integration window [-half_width, half_width] in both Gaussian coordinates.
    double half_width = 10.0;
};

/// Brute-force E[1{G(Z1, Z2) <= x} He_m1(Z1) He_m2(Z2)] straight from the CMS
/// transform. For each z1 the set of z2 with G <= x is a half-line (G is
/// monotone in z2); its endpoint is found by bisection on G and the z2
/// integral is then exact. The z1 integral is composite Gauss-Legendre, split
/// at the points where the shape of that set changes, with node doubling until
/// the estimate settles. NoConvergence if it never does.
double j_oracle(HermiteIndex index, double x, double alpha, double beta2,
                const OracleOptions& options = {});

/// Smallest q >= 1 with some |J_{m1,m2}(x)| > tol, m1 + m2 = q, q <= 3.
/// RankUndetermined if every coefficient up to order 3 is below tol.
int hermite_rank(double x, double alpha, double beta2, double tol = 1e-8);

/// c(m, D) = 2 / ((1 - mD)(2 - mD)); DomainError unless 0 < D < 1/m.
double c_mD(int m, double d);

/// (1/n^2) sum_{i,j} r^q(|i - j|), exact.
double sigma2_nq(const LrdModel& model, std::size_t n, int q);

/// sqrt(c(m, D) n^(-mD) L(n)^m).
double d_nm(int m, double d, std::size_t n, double l_at_n);

/// d_nm with L(n) = n^D r(n) of the model.
double d_nm(int m, const LrdModel& model, std::size_t n);

struct LrdNormalization {
    int m = 1;
    double d = 0.0;
    std::size_t n = 0;
    double c_mD = 0.0;
    double l_at_n = 0.0;
    double d_nm = 0.0;
    double sigma2_exact = 0.0;
};

LrdNormalization lrd_normalization(const LrdModel& model, std::size_t n, int m = 1,
                                   bool with_exact_variance = false);

struct CoeffTable {
    double alpha = 0.0;
    double beta2 = 0.0;
    double tol = 0.0;
    std::vector<double> xs;
    std::vector<double> j10;
    std::vector<double> j01;
    std::vector<double> err10;
    std::vector<double> err01;
};

/// Coefficients on a strictly increasing grid; grid points are split across
/// `workers` threads.
CoeffTable build_coeff_table(double alpha, double beta2, const std::vector<double>& xs,
                             double tol = 1e-10, unsigned workers = 1);

/// Uniform grid of `points` values on [x_min, x_max].
std::vector<double> linear_grid(double x_min, double x_max, std::size_t points);

struct C0Options {
    double x_max_initial = 50.0;
    /// The search window grows until both coefficients fall below this at its edges.
    double tail_threshold = 1e-6;
    double x_max_limit = 1e30;
    /// Grid density per unit of asinh(x).
    double points_per_unit = 40.0;
    double tol = 1e-10;
};

struct C0Result {
    double value = 0.0;
    double x_star = 0.0;
    double x_max = 0.0;
    std::size_t grid_points = 0;
};

/// c0 = sup_x sqrt(J10(x)^2 + J01(x)^2): grid search in asinh(x), then
/// golden-section refinement around the best grid point.
C0Result c0(double alpha, double beta2, const C0Options& options = {});

}  // namespace lrdstable
