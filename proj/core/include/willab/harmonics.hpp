#pragma once

#include "willab/geometry.hpp"

#include <vector>

namespace willab {

// Real spherical harmonics on the round parameter sphere, indexed by
// (l, m_az) with |m_az| <= l <= L; smooth across the ends by construction
// and nonvanishing there, which the end-correction term needs. The flower
// symmetry axis is the polar axis of the parametrization, so no rotation is
// applied.
class GalerkinBasis {
public:
    explicit GalerkinBasis(int max_degree);

    int max_degree() const { return L_; }
    int size() const { return static_cast<int>(entries_.size()); }
    int degree_l(int j) const { return entries_[size_t(j)].l; }
    int azimuthal_order(int j) const { return entries_[size_t(j)].m; }

    // jets of all basis functions at a chart point
    void eval_jets(const SurfaceEvaluator& ev, const ChartPoint& p, std::vector<Jet>& out) const;
    // plain values (e.g. at end locations)
    void eval_values(const SurfaceEvaluator& ev, const ChartPoint& p,
                     std::vector<double>& out) const;

    // indices of the p-fold rotationally invariant subspace (m_az = 0 mod p)
    std::vector<int> invariant_subset(int p) const;

private:
    struct Entry {
        int l, m;                        // m is the signed azimuthal order
        std::vector<double> poly;        // A_l^{|m|} coefficients in sigma3
        double norm;                     // orthonormalization factor
    };
    int L_;
    std::vector<Entry> entries_;
};

} // namespace willab
