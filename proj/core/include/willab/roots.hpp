#pragma once

#include "willab/poly.hpp"

namespace willab {

struct PolishedRoot {
    cdouble location;
    int multiplicity = 1;
    double residual = 0.0; // |p(root)| / coefficient scale
};

// All roots of p: companion-matrix eigenvalues, cluster detection for
// multiple roots, then Newton polish (on the (m-1)-th derivative for a
// multiplicity-m cluster). Residuals are certified against
// `polish_tol * scale`; clusters that cannot be separated or polished to
// that tolerance raise IllConditioned.
std::vector<PolishedRoot> find_roots(const Poly& p,
                                     double cluster_radius = 1e-5,
                                     double polish_tol = 1e-13);

} // namespace willab
