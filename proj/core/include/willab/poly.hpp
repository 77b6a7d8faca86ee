#pragma once

#include <complex>
#include <vector>

namespace willab {

using cdouble = std::complex<double>;

// Dense univariate polynomial over C, coefficients in ascending degree.
// The zero polynomial is represented by an empty coefficient vector.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<cdouble> coeffs) : c_(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<cdouble> coeffs) : c_(coeffs) { trim(); }

    static Poly constant(cdouble a) { return Poly(std::vector<cdouble>{a}); }
    static Poly monomial(int degree, cdouble a = 1.0);

    const std::vector<cdouble>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; } // -1 for zero poly
    cdouble coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[size_t(k)] : cdouble(0);
    }
    cdouble leading() const { return c_.empty() ? cdouble(0) : c_.back(); }

    // Largest coefficient magnitude; 0 for the zero polynomial.
    double scale() const;

    cdouble eval(cdouble z) const;            // Horner
    std::pair<cdouble, cdouble> eval_with_derivative(cdouble z) const;

    Poly derivative() const;
    Poly integral() const;                    // antiderivative with zero constant

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(cdouble s) const;
    Poly operator-() const { return *this * cdouble(-1.0); }

    // Coefficient reversal z^n p(1/z) for n = max(degree, min_len-1).
    Poly reversed(int min_len = 0) const;

    // p(alpha*z + beta)
    Poly compose_affine(cdouble alpha, cdouble beta) const;

    // Drops trailing coefficients below eps * scale(); keeps exact zeros tidy.
    void trim(double eps = 0.0);

private:
    std::vector<cdouble> c_;
};

inline Poly operator*(cdouble s, const Poly& p) { return p * s; }

} // namespace willab
