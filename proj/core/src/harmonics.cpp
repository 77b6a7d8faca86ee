#include "willab/harmonics.hpp"

#include <cmath>
#include <numbers>

namespace willab {

namespace {

// A_l^m with P_l^m(x) = (1-x^2)^{m/2} A_l^m(x), no Condon-Shortley phase.
// (l-m) A_l^m = (2l-1) x A_{l-1}^m - (l+m-1) A_{l-2}^m
std::vector<std::vector<std::vector<double>>> build_A(int L) {
    std::vector<std::vector<std::vector<double>>> A(size_t(L + 1));
    for (int l = 0; l <= L; ++l) A[size_t(l)].resize(size_t(l + 1));
    for (int m = 0; m <= L; ++m) {
        double dfact = 1.0;
        for (int k = 3; k <= 2 * m - 1; k += 2) dfact *= double(k);
        A[size_t(m)][size_t(m)] = {dfact};
        if (m + 1 <= L) {
            A[size_t(m + 1)][size_t(m)] = {0.0, double(2 * m + 1) * dfact};
        }
        for (int l = m + 2; l <= L; ++l) {
            const auto& p1 = A[size_t(l - 1)][size_t(m)];
            const auto& p2 = A[size_t(l - 2)][size_t(m)];
            std::vector<double> cur(size_t(l - m + 1), 0.0);
            for (size_t k = 0; k < p1.size(); ++k)
                cur[k + 1] += double(2 * l - 1) * p1[k] / double(l - m);
            for (size_t k = 0; k < p2.size(); ++k)
                cur[k] -= double(l + m - 1) * p2[k] / double(l - m);
            A[size_t(l)][size_t(m)] = std::move(cur);
        }
    }
    return A;
}

double norm_factor(int l, int m) {
    // sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!), times sqrt(2) for m != 0
    double ratio = 1.0;
    for (int k = l - m + 1; k <= l + m; ++k) ratio /= double(k);
    double n = std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) * ratio);
    if (m != 0) n *= std::numbers::sqrt2;
    return n;
}

} // namespace

GalerkinBasis::GalerkinBasis(int max_degree) : L_(max_degree) {
    auto A = build_A(L_);
    for (int l = 0; l <= L_; ++l) {
        for (int m = -l; m <= l; ++m) {
            Entry e;
            e.l = l;
            e.m = m;
            e.poly = A[size_t(l)][size_t(std::abs(m))];
            e.norm = norm_factor(l, std::abs(m));
            entries_.push_back(std::move(e));
        }
    }
}

void GalerkinBasis::eval_jets(const SurfaceEvaluator& ev, const ChartPoint& p,
                              std::vector<Jet>& out) const {
    out.resize(entries_.size());
    auto s = ev.sigma_jet(p);
    // powers of sigma3 and of t = sigma1 + i sigma2
    std::vector<Jet> pow3(size_t(L_ + 1)), powt(size_t(L_ + 1));
    pow3[0] = Jet::constant(1.0);
    powt[0] = Jet::constant(1.0);
    Jet t = s[0] + cdouble(0.0, 1.0) * s[1];
    for (int k = 1; k <= L_; ++k) {
        pow3[size_t(k)] = pow3[size_t(k - 1)] * s[2];
        powt[size_t(k)] = powt[size_t(k - 1)] * t;
    }
    for (size_t j = 0; j < entries_.size(); ++j) {
        const Entry& e = entries_[j];
        Jet leg{};
        for (size_t k = 0; k < e.poly.size(); ++k) leg = leg + e.poly[k] * pow3[k];
        const int am = std::abs(e.m);
        Jet ang = (e.m >= 0) ? powt[size_t(am)].real_part() : powt[size_t(am)].imag_part();
        out[j] = (am == 0) ? leg * e.norm : (leg * ang) * e.norm;
    }
}

void GalerkinBasis::eval_values(const SurfaceEvaluator& ev, const ChartPoint& p,
                                std::vector<double>& out) const {
    std::vector<Jet> jets;
    eval_jets(ev, p, jets);
    out.resize(jets.size());
    for (size_t j = 0; j < jets.size(); ++j) out[j] = jets[j].v.real();
}

std::vector<int> GalerkinBasis::invariant_subset(int p) const {
    std::vector<int> idx;
    for (int j = 0; j < size(); ++j)
        if (std::abs(entries_[size_t(j)].m) % p == 0) idx.push_back(j);
    return idx;
}

} // namespace willab
