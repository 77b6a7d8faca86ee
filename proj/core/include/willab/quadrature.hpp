#pragma once

#include "willab/geometry.hpp"

#include <functional>
#include <vector>

namespace willab {

struct QuadratureOptions {
    std::vector<double> eps = {0.2, 0.1, 0.05, 0.025}; // strictly decreasing
    int gauss_order = 10;
    int panels_per_octave = 2;
    int n_theta_end = 64;
    int n_theta_background = 96;
    double deep_rel = 3e-5;      // innermost radius, in units of the chart scale
    double chart_scale_factor = 1.0; // != 1 only for mis-normalization controls
    double refine = 1.0;         // multiplies angular counts and panel density
};

// Node layout over the parameter sphere: smooth partition of unity, per-end
// polar annuli in the z-chart (with bands aligned to the eps cuts), a
// background z-disk and a far cap in the w = 1/z chart.
struct QuadratureScheme {
    struct Node {
        ChartPoint pt;
        double weight; // flat chart measure times the partition weight
    };
    struct EndGroup {
        int end_index;
        cdouble center;
        double chart_scale;          // s_i (after chart_scale_factor)
        double outer_radius;         // R_i, support radius of chi_i
        std::vector<Node> outer;               // [eps0 s, R_i]
        std::vector<std::vector<Node>> bands;  // bands[j]: [eps_{j+1} s, eps_j s]
        std::vector<Node> deep;                // [deep_rel s, eps_last s]
    };

    std::vector<double> eps;
    std::vector<Node> background;
    std::vector<Node> cap;
    std::vector<EndGroup> ends;

    // Smooth cutoff of end i at a point (1 inside R/2, 0 outside R).
    double chi(size_t end, const ChartPoint& p) const;
    double chi_radial(size_t end, double r) const;
    // 2*pi*s^2 * Int_{a}^{R} chi(r) r^{-3} dr, machine-accurate (used to add
    // the end-chart area model back analytically).
    double model_integral(size_t end, double inner_radius) const;
};

QuadratureScheme build_quadrature(const SurfaceEvaluator& ev, const QuadratureOptions& opt);

// Integrate a pointwise integrand over Sigma_eps (cut at eps[cut_index]) or
// over the whole surface (cut_index = -1, includes the deep tail).
double integrate(const QuadratureScheme& scheme,
                 const std::function<double(const ChartPoint&)>& f, int cut_index);

// Compensated (Neumaier) accumulator used by every quadrature loop.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

double adaptive_gauss_1d(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-13);

} // namespace willab
