#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature. Error per panel is estimated
// from the Gauss/Kronrod difference; panels are bisected until the absolute
// tolerance is met or the budget runs out.

#include <cmath>
#include <functional>
#include <vector>

#include "ctrw/errors.hpp"

namespace ctrw {

namespace detail {

// K15 nodes/weights on [-1,1]; G7 weights sit at the odd indices.
inline const double kKronrodNodes[15] = {
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline const double kKronrodWeights[15] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

inline const double kGaussWeights[7] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct PanelResult {
    double value;
    double error;
};

template <typename F>
PanelResult gk15(const F& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 15; ++i) {
        double y = f(c + h * kKronrodNodes[i]);
        kron += kKronrodWeights[i] * y;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * y;
    }
    kron *= h;
    gauss *= h;
    double err = std::pow(200.0 * std::abs(kron - gauss), 1.5);
    return {kron, err};
}

} // namespace detail

// Integrate f over [a,b] to absolute tolerance abs_tol (with a mild relative
// floor). Throws QuadratureFailure if the panel budget is exhausted.
template <typename F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                 int max_panels = 4000) {
    if (a == b) return 0.0;
    struct Panel {
        double a, b, value, error;
    };
    auto first = detail::gk15(f, a, b);
    std::vector<Panel> heap{{a, b, first.value, first.error}};
    double total = first.value, total_err = first.error;
    int used = 1;
    while (total_err > abs_tol + 1e-14 * std::abs(total)) {
        if (used >= max_panels) throw QuadratureFailure("panel budget exhausted");
        size_t worst = 0;
        for (size_t i = 1; i < heap.size(); ++i)
            if (heap[i].error > heap[worst].error) worst = i;
        Panel p = heap[worst];
        double mid = 0.5 * (p.a + p.b);
        if (mid <= p.a || mid >= p.b) break; // interval at floating resolution
        auto left = detail::gk15(f, p.a, mid);
        auto right = detail::gk15(f, mid, p.b);
        total += left.value + right.value - p.value;
        total_err += left.error + right.error - p.error;
        heap[worst] = {p.a, mid, left.value, left.error};
        heap.push_back({mid, p.b, right.value, right.error});
        ++used;
    }
    return total;
}

// Semi-infinite integral of a decaying integrand: integrate on [a, cutoff]
// where the caller promises |∫_cutoff^inf| < abs_tol/2.
template <typename F>
double integrate_to(const F& f, double a, double cutoff, double abs_tol = 1e-10) {
    return integrate(f, a, cutoff, abs_tol * 0.5);
}

} // namespace ctrw
