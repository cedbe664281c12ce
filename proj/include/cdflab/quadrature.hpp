#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "cdflab/errors.hpp"

namespace cdflab
{

struct QuadratureResult
{
    double value = 0;
    double error_estimate = 0;
    int intervals = 0;
};

namespace detail
{
// 15-point Kronrod abscissae on [-1, 1] (nonnegative half) with the
// embedded 7-point Gauss rule on the odd entries.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel
{
    double a, b, value, error;
};

// One G7-K15 panel. `f` fills 15 outputs for 15 abscissae in one call.
template <class BatchFn>
Panel gauss_kronrod_panel(BatchFn& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 15> x;
    std::array<double, 15> y;
    for (int k = 0; k < 7; ++k)
    {
        x[2 * k] = center - half * kronrod_nodes[k];
        x[2 * k + 1] = center + half * kronrod_nodes[k];
    }
    x[14] = center;
    f(std::span<const double>(x), std::span<double>(y));

    double kronrod = kronrod_weights[7] * y[14];
    double gauss = gauss_weights[3] * y[14];
    for (int k = 0; k < 7; ++k)
    {
        const double pair = y[2 * k] + y[2 * k + 1];
        kronrod += kronrod_weights[k] * pair;
        if (k % 2 == 1)
            gauss += gauss_weights[k / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Globally adaptive Gauss-Kronrod (G7/K15) integration of a batch integrand.
 *
 * `f(std::span<const double> x, std::span<double> y)` must set y[i] = f(x[i]).
 * The panel with the largest error estimate is bisected until the summed
 * estimate is below max(abs_tol, rel_tol * |value|) or `max_panels` is hit.
 */
template <class BatchFn>
QuadratureResult integrate_adaptive(BatchFn&& f, double a, double b, double rel_tol = 1e-12,
                                    double abs_tol = 0.0, int max_panels = 512)
{
    if (!(a <= b))
        throw ContractViolation("integrate_adaptive: lower limit exceeds upper limit");
    if (a == b)
        return {0.0, 0.0, 0};

    auto by_error = [](const detail::Panel& l, const detail::Panel& r) {
        return l.error < r.error;
    };
    std::vector<detail::Panel> heap;
    heap.push_back(detail::gauss_kronrod_panel(f, a, b));
    double value = heap.front().value;
    double error = heap.front().error;

    while (error > std::max(abs_tol, rel_tol * std::abs(value))
           && static_cast<int>(heap.size()) < max_panels)
    {
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const detail::Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
        {
            // Panel no longer splittable in floating point.
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), by_error);
            break;
        }
        const auto left = detail::gauss_kronrod_panel(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_panel(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
    }

    // Re-sum from scratch; the running totals drift by cancellation.
    double total = 0;
    double total_error = 0;
    for (const auto& panel : heap)
    {
        total += panel.value;
        total_error += panel.error;
    }
    return {total, total_error, static_cast<int>(heap.size())};
}

}  // namespace cdflab
