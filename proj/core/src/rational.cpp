#include "willab/rational.hpp"

#include "willab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace willab {

namespace {

// Taylor coefficients of p about z0 (ascending), i.e. p(z0 + h) in powers of h.
std::vector<cdouble> taylor_at(const Poly& p, cdouble z0, size_t count) {
    Poly shifted = p.compose_affine(1.0, z0);
    std::vector<cdouble> t(count, cdouble(0));
    for (size_t k = 0; k < count; ++k) t[k] = shifted.coeff(int(k));
    return t;
}

double local_scale(const Poly& p, cdouble z0) {
    double s = 0.0, zp = 1.0;
    const double az = std::abs(z0);
    for (int k = 0; k <= p.degree(); ++k) {
        s += std::abs(p.coeff(k)) * zp;
        zp *= az;
    }
    return s > 0 ? s : 1.0;
}

// q = n / d and remainder r with deg r < deg d (polynomial long division).
std::pair<Poly, Poly> poly_divmod(const Poly& n, const Poly& d) {
    std::vector<cdouble> rem(n.coeffs());
    const int dn = n.degree(), dd = d.degree();
    if (dn < dd) return {Poly(), n};
    std::vector<cdouble> quo(size_t(dn - dd) + 1, cdouble(0));
    const cdouble lead = d.leading();
    for (int k = dn; k >= dd; --k) {
        cdouble c = rem[size_t(k)] / lead;
        quo[size_t(k - dd)] = c;
        for (int j = 0; j <= dd; ++j) rem[size_t(k - dd + j)] -= c * d.coeff(j);
    }
    rem.resize(size_t(dd));
    Poly r(std::move(rem));
    r.trim(1e-14);
    return {Poly(std::move(quo)), r};
}

Poly poly_from_roots(const std::vector<std::pair<cdouble, int>>& roots, cdouble lead) {
    Poly p = Poly::constant(lead);
    for (const auto& [z, m] : roots)
        for (int k = 0; k < m; ++k) p = p * Poly({-z, 1.0});
    return p;
}

} // namespace

RationalFn::RationalFn(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw Error("rational function with zero denominator");
    const cdouble lead = den_.leading();
    if (lead != cdouble(1.0)) {
        num_ = num_ * (1.0 / lead);
        den_ = den_ * (1.0 / lead);
    }
}

cdouble RationalFn::eval(cdouble z) const {
    const cdouble d = den_.eval(z);
    if (std::abs(d) <= 8.0 * std::numeric_limits<double>::epsilon() * local_scale(den_, z))
        throw PoleEvaluation("denominator underflow at evaluation point");
    return num_.eval(z) / d;
}

RationalFn RationalFn::derivative() const {
    Poly n = num_.derivative() * den_ - num_ * den_.derivative();
    n.trim(1e-15);
    return RationalFn(std::move(n), den_ * den_);
}

RationalFn RationalFn::operator+(const RationalFn& o) const {
    return RationalFn(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}
RationalFn RationalFn::operator-(const RationalFn& o) const {
    return RationalFn(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}
RationalFn RationalFn::operator*(const RationalFn& o) const {
    return RationalFn(num_ * o.num_, den_ * o.den_);
}
RationalFn RationalFn::operator*(cdouble s) const { return RationalFn(num_ * s, den_); }

std::vector<PoleRecord> RationalFn::poles() const {
    std::vector<PoleRecord> out;
    if (num_.is_zero()) return out;
    for (const PolishedRoot& r : find_roots(den_)) {
        const int m = r.multiplicity;
        auto nt = taylor_at(num_, r.location, size_t(m));
        const double ntol = 1e-10 * local_scale(num_, r.location);
        int cancel = 0;
        while (cancel < m && std::abs(nt[size_t(cancel)]) < ntol) ++cancel;
        const int order = m - cancel;
        if (order <= 0) continue; // removable
        PoleRecord p;
        p.location = r.location;
        p.order = order;
        p.residue = laurent_coefficient(r.location, m, 1);
        out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const PoleRecord& a, const PoleRecord& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });
    return out;
}

cdouble RationalFn::laurent_coefficient(cdouble z0, int order, int k) const {
    // R = N / ((z-z0)^order * E) with E(z0) != 0; the (z-z0)^{-k} coefficient
    // is the Taylor coefficient of N/E at z0 of index order-k.
    const int want = order - k;
    if (want < 0) return 0.0;
    const size_t count = size_t(want) + 1;
    auto dt = taylor_at(den_, z0, size_t(order) + count);
    auto nt = taylor_at(num_, z0, count);
    // E Taylor coefficients start at dt[order].
    const cdouble e0 = dt[size_t(order)];
    if (std::abs(e0) < 1e-14 * local_scale(den_, z0))
        throw IllConditioned("pole order mismatch in Laurent expansion");
    std::vector<cdouble> f(count);
    for (size_t j = 0; j < count; ++j) {
        cdouble acc = nt[j];
        for (size_t i = 0; i < j; ++i) acc -= f[i] * dt[size_t(order) + (j - i)];
        f[j] = acc / e0;
    }
    return f[size_t(want)];
}

cdouble RationalFn::residue_at(cdouble z0) const {
    // Detect the multiplicity of z0 in the denominator; 0 coefficients at a
    // polished pole location sit at ~1e-13 of the local scale.
    const double dtol = 1e-8 * local_scale(den_, z0);
    auto dt = taylor_at(den_, z0, size_t(den_.degree()) + 1);
    int m = 0;
    while (m <= den_.degree() && std::abs(dt[size_t(m)]) < dtol) ++m;
    if (m == 0) return 0.0; // regular point
    return laurent_coefficient(z0, m, 1);
}

RationalFn RationalFn::pullback_function(const MobiusMap& map) const {
    if (map.kind == MobiusMap::Kind::Reciprocal) {
        const int len = std::max(num_.degree(), den_.degree()) + 1;
        return RationalFn(num_.reversed(len), den_.reversed(len));
    }
    // map inverse: z = (w - beta)/alpha
    if (std::abs(map.alpha) == 0.0) throw Error("degenerate affine map");
    const cdouble ia = 1.0 / map.alpha;
    return RationalFn(num_.compose_affine(ia, -map.beta * ia),
                      den_.compose_affine(ia, -map.beta * ia));
}

RationalFn RationalFn::pullback_form(const MobiusMap& map) const {
    RationalFn f = pullback_function(map);
    if (map.kind == MobiusMap::Kind::Reciprocal) {
        // dz = -dw / w^2
        return RationalFn(-f.numerator(), f.denominator() * Poly({0.0, 0.0, 1.0}));
    }
    return f * (1.0 / map.alpha);
}

RationalFn RationalFn::reduced(double tol) const {
    if (num_.is_zero()) return RationalFn(Poly(), Poly::constant(1.0));
    auto nr = find_roots(num_);
    auto dr = find_roots(den_);
    std::vector<std::pair<cdouble, int>> nroots, droots;
    for (auto& r : nr) nroots.push_back({r.location, r.multiplicity});
    for (auto& r : dr) droots.push_back({r.location, r.multiplicity});
    for (auto& [dz, dm] : droots) {
        for (auto& [nz, nm] : nroots) {
            if (dm == 0 || nm == 0) continue;
            if (std::abs(nz - dz) < tol * (1.0 + std::abs(dz))) {
                const int c = std::min(nm, dm);
                nm -= c;
                dm -= c;
            }
        }
    }
    Poly n = poly_from_roots(nroots, num_.leading());
    Poly d = poly_from_roots(droots, den_.leading());
    return RationalFn(std::move(n), std::move(d));
}

std::optional<RationalFn> RationalFn::antiderivative(double residue_tol) const {
    auto [quo, rem] = poly_divmod(num_, den_);
    RationalFn result = RationalFn::from_poly(quo.integral());
    if (rem.is_zero()) return result;

    RationalFn proper(rem, den_);
    const double rscale = proper.scale();
    std::vector<std::pair<cdouble, int>> dens; // (pole, order-1) of the antiderivative
    struct Term { cdouble pole; int k; cdouble coeff; };
    std::vector<Term> terms;
    for (const PolishedRoot& r : find_roots(den_)) {
        const int m = r.multiplicity;
        for (int k = 1; k <= m; ++k) {
            cdouble c = proper.laurent_coefficient(r.location, m, k);
            if (k == 1) {
                if (std::abs(c) > residue_tol * (rscale > 0 ? rscale : 1.0)) return std::nullopt;
                continue;
            }
            terms.push_back({r.location, k, c});
        }
        if (m >= 2) dens.push_back({r.location, m - 1});
    }
    // Sum of c/(1-k) * (z-z0)^{1-k} over a common denominator.
    Poly common = poly_from_roots(dens, 1.0);
    Poly acc;
    for (const Term& t : terms) {
        Poly part = Poly::constant(t.coeff / double(1 - t.k));
        for (const auto& [z0, mm] : dens) {
            int pow = (z0 == t.pole) ? (mm - (t.k - 1)) : mm;
            for (int j = 0; j < pow; ++j) part = part * Poly({-z0, 1.0});
        }
        acc = acc + part;
    }
    if (!acc.is_zero()) result = result + RationalFn(acc, common);
    return result;
}

double RationalFn::scale() const { return std::max(num_.scale(), den_.scale()); }

} // namespace willab
