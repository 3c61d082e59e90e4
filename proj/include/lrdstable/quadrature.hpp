#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace lrdstable::quadrature {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment kronrod15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    std::array<double, 7> lo{};
    std::array<double, 7> hi{};
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        lo[j] = f(center - dx);
        hi[j] = f(center + dx);
        kronrod += kKronrodWeights[j] * (lo[j] + hi[j]);
        if (j % 2 == 1) {
            gauss += kGaussWeights[j / 2] * (lo[j] + hi[j]);
        }
    }
    // QUADPACK-style error scaling.
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        asc += kKronrodWeights[j] * (std::abs(lo[j] - mean) + std::abs(hi[j] - mean));
    }
    asc *= std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) {
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    }
    if (!std::isfinite(err)) {
        err = std::abs((kronrod - gauss) * half);
    }
    return Segment{a, b, kronrod * half, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b] to an
/// absolute error target. The integrand is never evaluated at a or b, so
/// integrable endpoint singularities are fine. On exhausting max_segments the
/// best estimate is returned with converged = false.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol, int max_segments = 4000) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Segment> heap;
    auto first = detail::kronrod15(f, a, b);
    out.evaluations = 15;
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    int segments = 1;
    while (total_err > abs_tol && segments < max_segments) {
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval exhausted at machine resolution; keep it and stop.
            heap.push(worst);
            break;
        }
        const auto left = detail::kronrod15(f, worst.a, mid);
        const auto right = detail::kronrod15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++segments;
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    total_err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        total_err += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.abs_error = total_err;
    out.converged = total_err <= abs_tol;
    return out;
}

/// integrate() over consecutive pieces [points[i], points[i+1]], sharing the
/// tolerance evenly. Useful when the integrand has known thin layers that a
/// single initial rule could step over.
template <class F>
QuadResult integrate_piecewise(F&& f, const std::vector<double>& points, double abs_tol,
                               int max_segments = 4000) {
    QuadResult out;
    out.converged = true;
    if (points.size() < 2) return out;
    const double share = abs_tol / static_cast<double>(points.size() - 1);
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        const auto r = integrate(f, points[i], points[i + 1], share, max_segments);
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.evaluations += r.evaluations;
    }
    out.converged = out.abs_error <= abs_tol;
    return out;
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t n);

}  // namespace lrdstable::quadrature
