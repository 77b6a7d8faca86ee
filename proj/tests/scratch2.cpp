#include "willab/geometry.hpp"
#include "willab/quadrature.hpp"
#include "willab/errors.hpp"

#include <chrono>
#include <cstdio>

using namespace willab;

int main() {
    auto T0 = std::chrono::steady_clock::now();
    auto tick = [&](const char* what) {
        auto t = std::chrono::steady_clock::now();
        std::printf("[%7.2fs] %s\n", std::chrono::duration<double>(t - T0).count(), what);
    };

    NullCurveData d = flower_data(2);
    tick("flower p=2 solved");

    // basic sample invariants at a few points
    {
        SurfaceEvaluator ev(ensure_origin_off_surface(d));
        double worst_unit = 0, worst_gn = 0, worst_K = -1e300;
        for (const ChartPoint& p : sample_grid(d, 50)) {
            SurfaceSample s = ev.sample(p);
            worst_unit = std::max({worst_unit, std::abs(s.n_X.norm() - 1.0),
                                   std::abs(s.n_Psi.norm() - 1.0)});
            worst_gn = std::max(worst_gn,
                                std::abs(s.grad_normal_sq + 2.0 * s.gauss_curvature) /
                                    (1.0 + std::abs(s.gauss_curvature)));
            worst_K = std::max(worst_K, s.gauss_curvature);
        }
        std::printf("unit-normal err %.2e, |grad nu|^2+2K rel err %.2e, max K %.2e\n",
                    worst_unit, worst_gn, worst_K);
        tick("samples");
    }

    // Lemma 4.1 residual over 200 samples
    {
        NullCurveData shifted = ensure_origin_off_surface(d);
        auto samples = sample_grid(shifted, 200);
        for (int k = 0; k < 3; ++k)
            std::printf("lemma41 residual k=%d: %.3e\n", k,
                        lemma41_residual(shifted, k, samples));
        tick("lemma41");
    }

    // willmore energy
    {
        auto [w, err] = willmore_energy(d);
        std::printf("W = %.10f (16pi = %.10f), est err %.2e, rel dev %.3e\n", w,
                    16.0 * M_PI, err, std::abs(w - 16.0 * M_PI) / (16.0 * M_PI));
        tick("energy");
    }

    // density sweep
    {
        auto pts = density_sweep(d, {0.2, 0.1, 0.05, 0.025});
        for (const auto& p : pts)
            std::printf("eps=%.3f area=%.8f defect=%.3e\n", p.epsilon, p.area, p.defect);
        auto mis = density_sweep(d, {0.2, 0.1, 0.05, 0.025}, 0.5);
        std::printf("mis-normalized defect at 0.025: %.6e (expect ~ 3*pi*m/eps^2 = %.6e)\n",
                    mis.back().defect, 3.0 * M_PI * 4.0 / (0.025 * 0.025));
        tick("density");
    }

    // total curvature by quadrature
    {
        double tc = total_curvature_quadrature(d);
        std::printf("int(-K) dmu = %.8f (expect 12pi = %.8f)\n", tc, 12.0 * M_PI);
        tick("curvature");
    }

    // spiny
    {
        auto rep = spiny_test(asymptotic_planes(d));
        std::printf("spiny: %d residual %.2e point (%.2e,%.2e,%.2e)\n", rep.is_spiny,
                    rep.residual, rep.common_point.x(), rep.common_point.y(),
                    rep.common_point.z());
        auto repT = spiny_test(asymptotic_planes(translated(d, Vec3(0.3, -0.2, 0.5))));
        std::printf("translated spiny point (%.6f,%.6f,%.6f)\n", repT.common_point.x(),
                    repT.common_point.y(), repT.common_point.z());
        tick("spiny");
    }

    // support field
    {
        auto rep = support_field_check(d, sample_grid(d, 100));
        std::printf("support: maxL %.3e conj %.3e ends:", rep.max_jacobi_residual,
                    rep.conjugate_residual);
        for (double v : rep.end_values) std::printf(" %.2e", v);
        std::printf("\n");
        tick("support");
    }
    return 0;
}
