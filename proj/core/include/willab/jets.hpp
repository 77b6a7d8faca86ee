#pragma once

#include "willab/poly.hpp"

#include <Eigen/Dense>

#include <array>

namespace willab {

// Wirtinger 2-jet of a complex-valued function of (z, zbar): value, first
// derivatives and the mixed second derivative. Enough to evaluate the flat
// Laplacian (4 * dzzb) of any algebraic combination of holomorphic data and
// its conjugates, with no finite differencing anywhere.
struct Jet {
    cdouble v{}, dz{}, dzb{}, dzzb{};

    static Jet constant(cdouble c) { return {c, 0.0, 0.0, 0.0}; }
    // holomorphic function: f, f'
    static Jet holomorphic(cdouble f, cdouble df) { return {f, df, 0.0, 0.0}; }

    Jet operator+(const Jet& o) const { return {v + o.v, dz + o.dz, dzb + o.dzb, dzzb + o.dzzb}; }
    Jet operator-(const Jet& o) const { return {v - o.v, dz - o.dz, dzb - o.dzb, dzzb - o.dzzb}; }
    Jet operator-() const { return {-v, -dz, -dzb, -dzzb}; }
    Jet operator*(const Jet& o) const {
        return {v * o.v, dz * o.v + v * o.dz, dzb * o.v + v * o.dzb,
                dzzb * o.v + dz * o.dzb + dzb * o.dz + v * o.dzzb};
    }
    Jet operator*(cdouble s) const { return {v * s, dz * s, dzb * s, dzzb * s}; }
    Jet operator*(double s) const { return {v * s, dz * s, dzb * s, dzzb * s}; }

    Jet conjugate() const {
        return {std::conj(v), std::conj(dzb), std::conj(dz), std::conj(dzzb)};
    }
    Jet reciprocal() const {
        const cdouble iv = 1.0 / v;
        const cdouble iv2 = iv * iv;
        return {iv, -dz * iv2, -dzb * iv2, -dzzb * iv2 + 2.0 * dz * dzb * iv2 * iv};
    }
    Jet operator/(const Jet& o) const { return *this * o.reciprocal(); }

    Jet real_part() const {
        Jet c = conjugate();
        return (*this + c) * 0.5;
    }
    Jet imag_part() const {
        Jet c = conjugate();
        return (*this - c) * cdouble(0.0, -0.5);
    }
    // sqrt of a positive real jet
    Jet sqrt_real() const {
        const double s = std::sqrt(v.real());
        const cdouble ds = dz / (2.0 * s);
        const cdouble dsb = dzb / (2.0 * s);
        return {s, ds, dsb, dzzb / (2.0 * s) - dz * dzb / (4.0 * s * s * s)};
    }

    double laplacian_flat() const { return 4.0 * dzzb.real(); }
};

inline Jet operator*(cdouble s, const Jet& j) { return j * s; }
inline Jet operator*(double s, const Jet& j) { return j * s; }

using JVec3 = std::array<Jet, 3>;

inline JVec3 operator+(const JVec3& a, const JVec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline JVec3 operator-(const JVec3& a, const JVec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline JVec3 operator*(const Jet& s, const JVec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline JVec3 operator*(cdouble s, const JVec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

// bilinear dot product a . b (no conjugation)
inline Jet dot(const JVec3& a, const JVec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline JVec3 cross(const JVec3& a, const JVec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline JVec3 conjugate(const JVec3& a) {
    return {a[0].conjugate(), a[1].conjugate(), a[2].conjugate()};
}
inline JVec3 real_part(const JVec3& a) {
    return {a[0].real_part(), a[1].real_part(), a[2].real_part()};
}

inline Eigen::Vector3d value_of(const JVec3& a) {
    return Eigen::Vector3d(a[0].v.real(), a[1].v.real(), a[2].v.real());
}

} // namespace willab
