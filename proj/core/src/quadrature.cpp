#include "willab/quadrature.hpp"

#include "willab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace willab {

namespace {

constexpr double kPi = std::numbers::pi;

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

struct GaussRule {
    std::vector<double> x, w; // on [-1, 1]
};

// Golub-Welsch via the symmetric tridiagonal Jacobi matrix.
GaussRule gauss_legendre(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = double(i) / std::sqrt(4.0 * i * i - 1.0);
        J(i, i - 1) = b;
        J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussRule r;
    r.x.resize(size_t(n));
    r.w.resize(size_t(n));
    for (int i = 0; i < n; ++i) {
        r.x[size_t(i)] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        r.w[size_t(i)] = 2.0 * v * v;
    }
    return r;
}

// Polar annulus nodes around `center` (chart 0): radial Gauss panels on a
// geometric subdivision of [r0, r1], uniform trapezoid in the angle.
void annulus_nodes(std::vector<QuadratureScheme::Node>& out, cdouble center, double r0, double r1,
                   int panels_per_octave, const GaussRule& gr, int n_theta,
                   const std::function<double(double)>& radial_weight) {
    if (r0 >= r1) return;
    const double per_panel = std::pow(0.5, 1.0 / double(panels_per_octave));
    std::vector<double> bounds{r1};
    double r = r1;
    while (r * per_panel > r0 * 1.0000001) {
        r *= per_panel;
        bounds.push_back(r);
    }
    bounds.push_back(r0);
    const double dtheta = 2.0 * kPi / double(n_theta);
    for (size_t b = 0; b + 1 < bounds.size(); ++b) {
        const double hi = bounds[b], lo = bounds[b + 1];
        const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
        for (size_t i = 0; i < gr.x.size(); ++i) {
            const double rr = mid + half * gr.x[size_t(i)];
            const double wr = half * gr.w[size_t(i)] * rr * dtheta * radial_weight(rr);
            if (wr == 0.0) continue;
            for (int t = 0; t < n_theta; ++t) {
                const double ang = (double(t) + 0.5) * dtheta;
                out.push_back({{0, center + std::polar(rr, ang)}, wr});
            }
        }
    }
}

} // namespace

double QuadratureScheme::chi_radial(size_t end, double r) const {
    const double R = ends[end].outer_radius;
    return 1.0 - smooth_step(2.0 * r / R - 1.0);
}

double QuadratureScheme::chi(size_t end, const ChartPoint& p) const {
    if (p.chart != 0) return 0.0;
    return chi_radial(end, std::abs(p.zeta - ends[end].center));
}

double QuadratureScheme::model_integral(size_t end, double inner_radius) const {
    const double s = ends[end].chart_scale;
    const double R = ends[end].outer_radius;
    const double a = inner_radius;
    if (a >= R) return 0.0;
    const double flat = std::min(R / 2.0, R); // chi == 1 on [a, R/2]
    double total = 0.0;
    if (a < flat) total += 0.5 / (a * a) - 0.5 / (flat * flat);
    const double lo = std::max(a, flat);
    if (lo < R) {
        total += adaptive_gauss_1d(
            [&](double r) { return chi_radial(end, r) / (r * r * r); }, lo, R, 1e-15);
    }
    return 2.0 * kPi * s * s * total;
}

QuadratureScheme build_quadrature(const SurfaceEvaluator& ev, const QuadratureOptions& opt) {
    QuadratureScheme scheme;
    scheme.eps = opt.eps;
    for (size_t i = 1; i < opt.eps.size(); ++i)
        if (opt.eps[i] >= opt.eps[i - 1]) throw Error("eps list must be strictly decreasing");

    const auto& ends = ev.end_charts();
    const GaussRule gr = gauss_legendre(opt.gauss_order);
    const int n_theta_end = std::max(16, int(std::lround(opt.n_theta_end * opt.refine)));
    const int n_theta_bg = std::max(24, int(std::lround(opt.n_theta_background * opt.refine)));
    const int ppo = std::max(1, int(std::lround(opt.panels_per_octave * opt.refine)));

    // per-end groups
    for (size_t e = 0; e < ends.size(); ++e) {
        QuadratureScheme::EndGroup g;
        g.end_index = int(e);
        g.center = ends[e].location;
        g.chart_scale = std::abs(ends[e].scale) * opt.chart_scale_factor;
        double nearest = 1e300;
        for (size_t o = 0; o < ends.size(); ++o)
            if (o != e) nearest = std::min(nearest, std::abs(ends[o].location - g.center));
        g.outer_radius = 0.45 * nearest;
        if (!opt.eps.empty() && opt.eps.front() * g.chart_scale > 0.5 * g.outer_radius)
            throw OverlappingEndDisks("eps disks are not safely inside the end charts");
        scheme.ends.push_back(g);
    }

    for (size_t e = 0; e < scheme.ends.size(); ++e) {
        auto& g = scheme.ends[e];
        const double s = g.chart_scale;
        auto chiw = [&scheme, e](double r) { return scheme.chi_radial(e, r); };
        // outer: [eps0 s, R]
        const double top = g.outer_radius;
        const double e0 = opt.eps.empty() ? opt.deep_rel : opt.eps.front();
        annulus_nodes(g.outer, g.center, e0 * s, top, ppo, gr, n_theta_end, chiw);
        // bands between consecutive eps cuts
        for (size_t j = 0; j + 1 < opt.eps.size(); ++j) {
            std::vector<QuadratureScheme::Node> band;
            annulus_nodes(band, g.center, opt.eps[j + 1] * s, opt.eps[j] * s, ppo, gr,
                          n_theta_end, chiw);
            g.bands.push_back(std::move(band));
        }
        // deep tail below the last eps cut
        if (!opt.eps.empty())
            annulus_nodes(g.deep, g.center, opt.deep_rel * s, opt.eps.back() * s, ppo, gr,
                          n_theta_end, chiw);
    }

    // background disk |z| <= R_far minus the chi plateaus
    const double r_far = ev.chart_split_radius();
    std::vector<double> bounds{0.0};
    double min_R = 1e300;
    for (const auto& g : scheme.ends) {
        min_R = std::min(min_R, g.outer_radius);
        const double c = std::abs(g.center);
        for (double b : {c - g.outer_radius, c - 0.5 * g.outer_radius, c,
                         c + 0.5 * g.outer_radius, c + g.outer_radius})
            if (b > 1e-9 && b < r_far) bounds.push_back(b);
    }
    bounds.push_back(r_far);
    std::sort(bounds.begin(), bounds.end());
    const double max_width = (min_R < 1e299 ? 0.5 * min_R : 0.5) / opt.refine;
    std::vector<double> refined{bounds.front()};
    for (size_t i = 1; i < bounds.size(); ++i) {
        const double lo = bounds[i - 1], hi = bounds[i];
        if (hi - lo < 1e-12) continue;
        const int pieces = std::max(1, int(std::ceil((hi - lo) / max_width)));
        for (int k = 1; k <= pieces; ++k) refined.push_back(lo + (hi - lo) * double(k) / pieces);
    }
    auto background_weight = [&](cdouble z) {
        double w = 1.0;
        for (size_t e = 0; e < scheme.ends.size(); ++e)
            w -= scheme.chi_radial(e, std::abs(z - scheme.ends[e].center));
        return std::max(w, 0.0);
    };
    const double dtheta_bg = 2.0 * kPi / double(n_theta_bg);
    for (size_t b = 0; b + 1 < refined.size(); ++b) {
        const double lo = refined[b], hi = refined[b + 1];
        const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
        for (size_t i = 0; i < gr.x.size(); ++i) {
            const double rr = mid + half * gr.x[size_t(i)];
            const double wr = half * gr.w[size_t(i)] * rr * dtheta_bg;
            for (int t = 0; t < n_theta_bg; ++t) {
                const double ang = (double(t) + 0.5) * dtheta_bg;
                const cdouble z = std::polar(rr, ang);
                const double pw = background_weight(z);
                if (pw > 0.0) scheme.background.push_back({{0, z}, wr * pw});
            }
        }
    }

    // cap |w| <= 1/R_far in the reciprocal chart
    {
        const double wr_max = 1.0 / r_far;
        const int cap_panels = 6;
        const double dtheta = 2.0 * kPi / double(n_theta_bg);
        for (int b = 0; b < cap_panels; ++b) {
            const double lo = wr_max * double(b) / cap_panels;
            const double hi = wr_max * double(b + 1) / cap_panels;
            const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
            for (size_t i = 0; i < gr.x.size(); ++i) {
                const double rr = mid + half * gr.x[size_t(i)];
                if (rr <= 0.0) continue;
                const double wq = half * gr.w[size_t(i)] * rr * dtheta;
                for (int t = 0; t < n_theta_bg; ++t) {
                    const double ang = (double(t) + 0.5) * dtheta;
                    scheme.cap.push_back({{1, std::polar(rr, ang)}, wq});
                }
            }
        }
    }
    return scheme;
}

double integrate(const QuadratureScheme& scheme,
                 const std::function<double(const ChartPoint&)>& f, int cut_index) {
    KahanSum sum;
    auto run = [&](const std::vector<QuadratureScheme::Node>& nodes) {
        for (const auto& n : nodes) sum.add(n.weight * f(n.pt));
    };
    run(scheme.background);
    run(scheme.cap);
    for (const auto& g : scheme.ends) {
        run(g.outer);
        const size_t nb = cut_index < 0 ? g.bands.size() : size_t(cut_index);
        for (size_t j = 0; j < std::min(nb, g.bands.size()); ++j) run(g.bands[j]);
        if (cut_index < 0) run(g.deep);
    }
    return sum.value();
}

double adaptive_gauss_1d(const std::function<double(double)>& f, double a, double b, double tol) {
    static const GaussRule g7 = gauss_legendre(7);
    static const GaussRule g15 = gauss_legendre(15);
    struct Rec {
        static double eval(const GaussRule& g, const std::function<double(double)>& f, double a,
                           double b) {
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            double s = 0.0;
            for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(mid + half * g.x[i]);
            return s * half;
        }
        static double go(const std::function<double(double)>& f, double a, double b, double tol,
                         int depth) {
            const double c = eval(g7, f, a, b);
            const double fine = eval(g15, f, a, b);
            if (std::abs(fine - c) < tol || depth > 30) return fine;
            const double mid = 0.5 * (a + b);
            return go(f, a, mid, tol / 2, depth + 1) + go(f, mid, b, tol / 2, depth + 1);
        }
    };
    return Rec::go(f, a, b, tol * (1.0 + std::abs(b - a)), 0);
}

} // namespace willab
