#pragma once

#include "willab/rational.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>

namespace willab {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

// Per-end local data in the normalized chart w = (z - location)/scale, in
// which the curve differential reads -a/w^2 + Y(w) with a.a = 0 (bilinear)
// and |a|^2 = 2 (Hermitian). That normalization pins the area density
// 1/|w|^4 at the end, which everything downstream (density defect, the
// 8*pi/eps^2 end correction) relies on.
struct EndChart {
    int index = 0;
    cdouble location;
    cdouble scale;                  // chart scale s_i, chosen real > 0
    CVec3 leading;                  // a
    std::array<RationalFn, 3> regular_part; // Y components, analytic at w=0
    Vec3 normal;                    // asymptotic unit normal nu(p_i)
    double plane_offset = 0.0;      // b_i of the plane {x : nu . x = b_i}
    double plane_offset_error = 0.0;
};

struct SurfaceSummary {
    int end_count = 0;              // m
    std::optional<int> symmetry_order; // p, if tagged
    int span_dimension = 0;         // d = rank of the end-normal matrix
    double total_curvature = 0.0;   // -4*pi*deg(Gauss map)
    double quantized_energy = 0.0;  // 4*pi*m, the inversion's Willmore energy
};

// Master description of a complete minimal surface with planar ends: the
// three rational components of Phi' = 2*dX/dz, so X = Re Int Phi'. The
// rational primitive Phi (which exists because all residues vanish) is kept
// alongside for pointwise evaluation; `offset` is a rigid translation, and
// X(basepoint) = offset by construction.
struct NullCurveData {
    std::array<RationalFn, 3> phi;       // Phi' components
    std::array<RationalFn, 3> primitive; // Phi with d(primitive)/dz = phi
    cdouble basepoint = 0.0;
    Vec3 offset = Vec3::Zero();
    std::optional<int> symmetry_order;   // p for flower-family data
    int genus = 0;                       // fixed 0
    std::string provenance;

    // X(z) = Re(Phi(z)) - Re(Phi(basepoint)) + offset
    Vec3 position(cdouble z) const;
    CVec3 phi_eval(cdouble z) const;
};

struct WeierstrassPair {
    RationalFn g;   // Gauss map, stereographic
    RationalFn eta; // height differential coefficient
};

// Phi' = ((1-g^2) eta, i(1+g^2) eta, 2 g eta); validates the result.
NullCurveData from_weierstrass(const WeierstrassPair& pair);

// Invariant checks (null identity as a rational identity, double poles with
// zero residue at every end, immersion including the infinity chart) plus
// the cheap summary numbers. Throws the first violated invariant.
SurfaceSummary validate(const NullCurveData& data);

// The 2p-ended dihedrally symmetric family: ansatz denominator
// q = z^{2p} + beta z^p + 1 with symmetric numerators of degree <= 2p-1,
// solved by Newton iteration and validated (including the tetrahedral
// end-normal cross-check at p = 2).
NullCurveData flower_data(int p);

// Closed-form Weierstrass pair matching flower_data(p); used as a
// cross-route check of the solver.
WeierstrassPair flower_weierstrass(int p);

// X(z) = Re Int_{basepoint}^{z} Phi' by pole-avoiding path quadrature.
// Path independence is guaranteed by the zero residues.
Vec3 immersion_eval(const NullCurveData& data, cdouble z);
Vec3 immersion_eval(const NullCurveData& data, cdouble z, cdouble basepoint);

// Associate family member Re(e^{it} Phi).
NullCurveData associate(const NullCurveData& data, double t);

// Action of M in SO(3,C) on the curve; checks M^T M = I, det M = 1.
NullCurveData orbit_act(const NullCurveData& data, const CMat3& M);

// Rigid translation of X (adds tau to `offset`).
NullCurveData translated(const NullCurveData& data, const Vec3& tau);

// Normalized chart data for end i (ends ordered as in `ends`).
EndChart end_normalize(const NullCurveData& data, int end_index);
std::vector<EndChart> ends(const NullCurveData& data);

// End locations only (union of double poles of the components).
std::vector<cdouble> end_locations(const NullCurveData& data);

// Holomorphically extended Gauss map as a unit vector in R^3.
Vec3 gauss_map(const NullCurveData& data, cdouble z);
// The underlying stereographic rational function g (reduced).
RationalFn gauss_map_rational(const NullCurveData& data);

// Numerical rank of the m x 3 matrix of end normals.
int end_span_dimension(const NullCurveData& data);

// Conjugate-surface value X*(z) = Im(Phi) - Im(Phi(basepoint)).
Vec3 conjugate_position(const NullCurveData& data, cdouble z);

} // namespace willab
