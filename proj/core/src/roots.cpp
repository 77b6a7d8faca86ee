#include "willab/roots.hpp"

#include "willab/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace willab {

namespace {

std::vector<cdouble> companion_eigenvalues(const Poly& p) {
    const int n = p.degree();
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    const cdouble lead = p.leading();
    for (int i = 0; i < n; ++i) {
        C(i, n - 1) = -p.coeff(i) / lead;
        if (i > 0) C(i, i - 1) = 1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw IllConditioned("companion eigensolve failed");
    std::vector<cdouble> r(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) r[size_t(i)] = es.eigenvalues()(i);
    return r;
}

double local_scale(const Poly& p, cdouble z) {
    double s = 0.0, zp = 1.0;
    const double az = std::abs(z);
    for (int k = 0; k <= p.degree(); ++k) {
        s += std::abs(p.coeff(k)) * zp;
        zp *= az;
    }
    return s > 0 ? s : 1.0;
}

// Multiplicity-agnostic polish: Newton on p/p', whose roots are all simple.
cdouble modified_newton(const Poly& p, const Poly& dp, const Poly& ddp, cdouble z) {
    for (int it = 0; it < 40; ++it) {
        const cdouble v = p.eval(z), d1 = dp.eval(z), d2 = ddp.eval(z);
        const cdouble den = d1 * d1 - v * d2;
        if (std::abs(den) == 0.0) break;
        const cdouble step = v * d1 / den;
        z -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
    }
    return z;
}

// Newton on the (mult-1)-th derivative, where a multiplicity-mult cluster
// has a simple root.
cdouble cluster_polish(const Poly& p, cdouble z0, int mult) {
    Poly q = p;
    for (int k = 1; k < mult; ++k) q = q.derivative();
    cdouble z = z0;
    for (int it = 0; it < 60; ++it) {
        auto [v, dv] = q.eval_with_derivative(z);
        if (std::abs(dv) == 0.0) break;
        const cdouble step = v / dv;
        z -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
    }
    return z;
}

} // namespace

std::vector<PolishedRoot> find_roots(const Poly& p_in, double cluster_radius, double polish_tol) {
    if (p_in.degree() < 1) return {};
    // Exact zero roots (monomial factors) are stripped first; they would
    // otherwise defeat the relative residual certificate near the origin.
    std::vector<cdouble> c = p_in.coeffs();
    const double zero_tol = 4.0 * std::numeric_limits<double>::epsilon() * p_in.scale();
    size_t m0 = 0;
    while (m0 + 1 < c.size() && std::abs(c[m0]) <= zero_tol) ++m0;
    std::vector<PolishedRoot> pre;
    if (m0 > 0) {
        c.erase(c.begin(), c.begin() + long(m0));
        pre.push_back({cdouble(0.0), int(m0), 0.0});
    }
    const Poly p(std::move(c));
    if (p.degree() < 1) return pre;
    const Poly dp = p.derivative();
    const Poly ddp = dp.derivative();
    std::vector<cdouble> raw = companion_eigenvalues(p);
    for (auto& z : raw) z = modified_newton(p, dp, ddp, z);
    std::sort(raw.begin(), raw.end(), [](cdouble a, cdouble b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    // Companion eigenvalues of a multiplicity-m root spread like eps^{1/m},
    // so the cluster radius is grown until every cluster certifies.
    std::string last_err;
    for (double radius = cluster_radius; radius <= 3e-3; radius *= 10.0) {
        std::vector<bool> used(raw.size(), false);
        std::vector<PolishedRoot> out;
        bool all_ok = true;
        for (size_t i = 0; i < raw.size() && all_ok; ++i) {
            if (used[i]) continue;
            std::vector<cdouble> cluster{raw[i]};
            used[i] = true;
            const double rad = radius * (1.0 + std::abs(raw[i]));
            for (size_t j = i + 1; j < raw.size(); ++j) {
                if (!used[j] && std::abs(raw[j] - raw[i]) < rad) {
                    cluster.push_back(raw[j]);
                    used[j] = true;
                }
            }
            cdouble mean(0);
            for (auto& z : cluster) mean += z;
            mean /= double(cluster.size());

            PolishedRoot r;
            r.multiplicity = static_cast<int>(cluster.size());
            r.location = r.multiplicity == 1 ? cluster[0] : cluster_polish(p, mean, r.multiplicity);

            // Certify the full derivative chain at the polished location.
            double worst = 0.0;
            Poly q = p;
            for (int k = 0; k < r.multiplicity; ++k) {
                if (k > 0) q = q.derivative();
                worst = std::max(worst, std::abs(q.eval(r.location)) / local_scale(q, r.location));
            }
            r.residual = worst;
            if (worst > polish_tol * 1e2) {
                all_ok = false;
                last_err = "residual " + std::to_string(worst);
                break;
            }
            out.push_back(r);
        }
        if (all_ok) {
            int total = 0;
            for (const auto& r : out) total += r.multiplicity;
            if (total == p.degree()) {
                out.insert(out.begin(), pre.begin(), pre.end());
                return out;
            }
            last_err = "multiplicity sum mismatch";
        }
    }
    throw IllConditioned("root cluster could not be polished to tolerance (" + last_err + ")");
}

} // namespace willab
