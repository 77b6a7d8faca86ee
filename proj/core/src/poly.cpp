#include "willab/poly.hpp"

#include <algorithm>
#include <cmath>

namespace willab {

Poly Poly::monomial(int degree, cdouble a) {
    std::vector<cdouble> c(size_t(degree) + 1, cdouble(0));
    c.back() = a;
    return Poly(std::move(c));
}

double Poly::scale() const {
    double s = 0.0;
    for (const auto& a : c_) s = std::max(s, std::abs(a));
    return s;
}

cdouble Poly::eval(cdouble z) const {
    cdouble acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
    return acc;
}

std::pair<cdouble, cdouble> Poly::eval_with_derivative(cdouble z) const {
    cdouble p(0), dp(0);
    for (size_t i = c_.size(); i-- > 0;) {
        dp = dp * z + p;
        p = p * z + c_[i];
    }
    return {p, dp};
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<cdouble> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = double(k) * c_[k];
    return Poly(std::move(d));
}

Poly Poly::integral() const {
    if (c_.empty()) return Poly();
    std::vector<cdouble> d(c_.size() + 1, cdouble(0));
    for (size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / double(k + 1);
    return Poly(std::move(d));
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<cdouble> r(std::max(c_.size(), o.c_.size()), cdouble(0));
    for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    Poly p(std::move(r));
    p.trim(1e-15);
    return p;
}

Poly Poly::operator-(const Poly& o) const { return *this + (o * cdouble(-1.0)); }

Poly Poly::operator*(const Poly& o) const {
    if (is_zero() || o.is_zero()) return Poly();
    std::vector<cdouble> r(c_.size() + o.c_.size() - 1, cdouble(0));
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Poly(std::move(r));
}

Poly Poly::operator*(cdouble s) const {
    std::vector<cdouble> r(c_);
    for (auto& a : r) a *= s;
    return Poly(std::move(r));
}

Poly Poly::reversed(int min_len) const {
    std::vector<cdouble> r(c_);
    if (static_cast<int>(r.size()) < min_len) r.resize(size_t(min_len), cdouble(0));
    std::reverse(r.begin(), r.end());
    return Poly(std::move(r));
}

Poly Poly::compose_affine(cdouble alpha, cdouble beta) const {
    // Horner in the affine argument.
    Poly acc;
    Poly lin({beta, alpha});
    for (size_t i = c_.size(); i-- > 0;) acc = acc * lin + Poly::constant(c_[i]);
    return acc;
}

void Poly::trim(double eps) {
    const double tol = eps * scale();
    while (!c_.empty() && std::abs(c_.back()) <= tol) c_.pop_back();
}

} // namespace willab
