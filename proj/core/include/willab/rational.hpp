#pragma once

#include "willab/poly.hpp"
#include "willab/roots.hpp"

#include <optional>
#include <vector>

namespace willab {

struct PoleRecord {
    cdouble location;
    int order = 1;        // >= 1
    cdouble residue = 0.0; // coefficient of (z - z0)^{-1}
};

// Chart changes used on the Riemann sphere: w = 1/z or w = alpha*z + beta.
struct MobiusMap {
    enum class Kind { Reciprocal, Affine } kind = Kind::Reciprocal;
    cdouble alpha = 1.0, beta = 0.0; // used by Affine; alpha != 0

    static MobiusMap reciprocal() { return {Kind::Reciprocal, 1.0, 0.0}; }
    static MobiusMap affine(cdouble a, cdouble b) { return {Kind::Affine, a, b}; }
};

// Quotient of two complex polynomials. Reduction (gcd cancellation) is an
// explicit operation, never applied implicitly, so pole records stay stable
// under arithmetic.
class RationalFn {
public:
    RationalFn() : num_(), den_(Poly::constant(1.0)) {}
    RationalFn(Poly num, Poly den);

    static RationalFn from_poly(Poly p) { return RationalFn(std::move(p), Poly::constant(1.0)); }
    static RationalFn constant(cdouble a) { return from_poly(Poly::constant(a)); }

    const Poly& numerator() const { return num_; }
    const Poly& denominator() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    cdouble eval(cdouble z) const; // throws PoleEvaluation on denominator underflow
    RationalFn derivative() const;

    RationalFn operator+(const RationalFn& o) const;
    RationalFn operator-(const RationalFn& o) const;
    RationalFn operator*(const RationalFn& o) const;
    RationalFn operator*(cdouble s) const;
    RationalFn operator-() const { return *this * cdouble(-1.0); }

    // All denominator roots (with multiplicity) that are genuine poles, with
    // residues. Also exposes the full Laurent principal part on demand.
    std::vector<PoleRecord> poles() const;
    cdouble residue_at(cdouble z0) const;       // 0 at regular points
    // Coefficient of (z - z0)^{-k} of the Laurent expansion at a pole of
    // order `order`; k = order gives the leading coefficient.
    cdouble laurent_coefficient(cdouble z0, int order, int k) const;

    // Function pullback R(map^{-1}(w)).
    RationalFn pullback_function(const MobiusMap& map) const;
    // 1-form pullback: R(map^{-1}(w)) * d(map^{-1})/dw, i.e. the rational
    // function S with R dz = S dw.
    RationalFn pullback_form(const MobiusMap& map) const;

    // Cancels matched numerator/denominator roots (within tol) and
    // renormalizes the leading denominator coefficient to 1.
    RationalFn reduced(double tol = 1e-8) const;

    // Rational antiderivative, exists iff every residue vanishes;
    // std::nullopt otherwise. (Partial fractions; the polynomial part is
    // integrated exactly.)
    std::optional<RationalFn> antiderivative(double residue_tol = 1e-9) const;

    // max coefficient magnitude over num/den (after normalizing den lead)
    double scale() const;

private:
    Poly num_, den_;
};

inline RationalFn operator*(cdouble s, const RationalFn& r) { return r * s; }

} // namespace willab
