// Temporary scratch harness used while bringing modules up.
#include "willab/nullcurve.hpp"
#include "willab/errors.hpp"

#include <cstdio>

using namespace willab;

int main() {
    for (int p = 2; p <= 4; ++p) {
        try {
            NullCurveData d = flower_data(p);
            SurfaceSummary s = validate(d);
            std::printf("p=%d: m=%d d=%d totK/pi=%.12f beta-den coeffs:", p, s.end_count,
                        s.span_dimension, s.total_curvature / M_PI);
            const Poly& q = d.primitive[0].denominator();
            for (const auto& c : q.coeffs()) std::printf(" (%.6g,%.6g)", c.real(), c.imag());
            std::printf("\n");
            auto es = ends(d);
            for (const auto& e : es)
                std::printf("  end %d: z=(%.6f,%.6f) s=%.6f nu=(%.6f,%.6f,%.6f) b=%.3e+-%.1e\n",
                            e.index, e.location.real(), e.location.imag(), e.scale.real(),
                            e.normal.x(), e.normal.y(), e.normal.z(), e.plane_offset,
                            e.plane_offset_error);
        } catch (const Error& err) {
            std::printf("p=%d FAILED: %s\n", p, err.what());
            return 1;
        }
    }
    return 0;
}
