#pragma once

#include "willab/nullcurve.hpp"

#include <cstdint>
#include <random>

namespace willab {

// exp of a 3x3 complex matrix by scaling-and-squaring Taylor series;
// antisymmetric input lands in SO(3,C).
CMat3 matrix_exp(const CMat3& A);

// Seeded random element exp(A), A complex antisymmetric with independent
// entries uniform in the disk of the given modulus bound.
CMat3 random_so3c(std::mt19937_64& rng, double modulus_bound = 0.3);

// Real rotation about the x3 axis.
CMat3 rotation_z(double angle);
// Real rotation taking `from` to `to` (unit vectors).
CMat3 rotation_between(const Vec3& from, const Vec3& to);

} // namespace willab
