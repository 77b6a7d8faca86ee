#include "willab/nullcurve.hpp"

#include "willab/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace willab {

namespace {

constexpr double kPi = std::numbers::pi;
const cdouble kI(0.0, 1.0);

CVec3 eval_three(const std::array<RationalFn, 3>& f, cdouble z) {
    return CVec3(f[0].eval(z), f[1].eval(z), f[2].eval(z));
}

// ---------------------------------------------------------------- ends ----

struct RawEnd {
    cdouble location;
    std::array<int, 3> order{0, 0, 0};      // per component (0 = regular)
    std::array<cdouble, 3> residue{};
    std::array<cdouble, 3> leading{};       // (z-z_e)^{-2} Laurent coefficient
};

int denominator_multiplicity(const RationalFn& r, cdouble z0) {
    const Poly& d = r.denominator();
    Poly shifted = d.compose_affine(1.0, z0);
    double ls = 0.0, zp = 1.0;
    for (int k = 0; k <= d.degree(); ++k) {
        ls += std::abs(d.coeff(k)) * zp;
        zp *= std::abs(z0);
    }
    const double tol = 1e-8 * (ls > 0 ? ls : 1.0);
    int m = 0;
    while (m <= d.degree() && std::abs(shifted.coeff(m)) < tol) ++m;
    return m;
}

std::vector<RawEnd> collect_ends(const NullCurveData& data) {
    std::vector<RawEnd> ends;
    for (int k = 0; k < 3; ++k) {
        for (const PoleRecord& p : data.phi[size_t(k)].poles()) {
            RawEnd* slot = nullptr;
            for (auto& e : ends)
                if (std::abs(e.location - p.location) < 1e-6 * (1.0 + std::abs(p.location)))
                    slot = &e;
            if (!slot) {
                ends.push_back({});
                ends.back().location = p.location;
                slot = &ends.back();
            }
            slot->order[size_t(k)] = p.order;
            slot->residue[size_t(k)] = p.residue;
            const int dm = denominator_multiplicity(data.phi[size_t(k)], p.location);
            slot->leading[size_t(k)] =
                data.phi[size_t(k)].laurent_coefficient(p.location, dm, 2);
        }
    }
    std::sort(ends.begin(), ends.end(), [](const RawEnd& a, const RawEnd& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });
    return ends;
}

// ------------------------------------------------------- path integral ----

// Adaptive Gauss-Kronrod (7-15) on one straight segment for a C^3-valued
// integrand.
struct GK15 {
    static const double xk[15], wk[15], wg[7];
};
const double GK15::xk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
const double GK15::wk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
const double GK15::wg[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

template <typename F>
CVec3 gk_segment(const F& f, cdouble a, cdouble b, double tol, int depth) {
    const cdouble mid = 0.5 * (a + b), half = 0.5 * (b - a);
    CVec3 acc_k = CVec3::Zero(), acc_g = CVec3::Zero();
    for (int i = 0; i < 15; ++i) {
        CVec3 v = f(mid + half * GK15::xk[i]);
        acc_k += GK15::wk[i] * v;
        if (i % 2 == 1) acc_g += GK15::wg[i / 2] * v;
    }
    acc_k *= half;
    acc_g *= half;
    const double err = (acc_k - acc_g).norm();
    if (err < tol || depth > 24) return acc_k;
    return gk_segment(f, a, mid, tol / 2, depth + 1) + gk_segment(f, mid, b, tol / 2, depth + 1);
}

// Polygonal pole-avoiding path from a to b.
std::vector<cdouble> route_path(cdouble a, cdouble b, const std::vector<cdouble>& poles,
                                double clearance, int depth = 0) {
    if (depth > 12) throw PathThroughPole("no admissible path found at requested resolution");
    for (const cdouble& p : poles) {
        const cdouble d = b - a;
        const double len2 = std::norm(d);
        if (len2 == 0.0) continue;
        double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
        const cdouble foot = a + t * d;
        const double dist = std::abs(p - foot);
        if (dist < clearance && t > 1e-12 && t < 1.0 - 1e-12) {
            cdouble dir;
            if (dist > 1e-14)
                dir = (foot - p) / dist;
            else
                dir = kI * d / std::sqrt(len2);
            const cdouble wp = p + 2.5 * clearance * dir;
            auto left = route_path(a, wp, poles, clearance, depth + 1);
            auto right = route_path(wp, b, poles, clearance, depth + 1);
            left.insert(left.end(), right.begin() + 1, right.end());
            return left;
        }
    }
    return {a, b};
}

// --------------------------------------------------------- gauss map ------

bool same_denominator(const std::array<RationalFn, 3>& f);

RationalFn compute_gauss_rational(const NullCurveData& data) {
    // g = Phi3' / (Phi1' - i Phi2'); with a shared denominator it cancels,
    // which keeps the degrees (and the root clustering) small.
    const bool shared = same_denominator(data.phi);
    Poly n12 = shared ? data.phi[0].numerator() - data.phi[1].numerator() * kI : Poly();
    if (shared && !n12.is_zero() && !data.phi[2].numerator().is_zero())
        return RationalFn(data.phi[2].numerator(), n12).reduced();
    const RationalFn den12 = data.phi[0] - kI * data.phi[1];
    if (!den12.numerator().is_zero() && !data.phi[2].numerator().is_zero()) {
        RationalFn g(data.phi[2].numerator() * den12.denominator(),
                     data.phi[2].denominator() * den12.numerator());
        return g.reduced();
    }
    const RationalFn num12 = data.phi[0] + kI * data.phi[1];
    if (!data.phi[2].numerator().is_zero()) {
        RationalFn g(-(num12.numerator() * data.phi[2].denominator()),
                     num12.denominator() * data.phi[2].numerator());
        return g.reduced();
    }
    throw ValidationFailure("degenerate Gauss map");
}

Vec3 stereo_from_g(cdouble g) {
    const double n2 = std::norm(g);
    return Vec3(2.0 * g.real(), 2.0 * g.imag(), n2 - 1.0) / (n2 + 1.0);
}

// --------------------------------------------------- shared denominators --

bool same_denominator(const std::array<RationalFn, 3>& f) {
    for (int k = 1; k < 3; ++k) {
        const auto& a = f[0].denominator().coeffs();
        const auto& b = f[size_t(k)].denominator().coeffs();
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return false;
    }
    return true;
}

std::array<RationalFn, 3> linear_combo(const std::array<RationalFn, 3>& f, const CMat3& M) {
    std::array<RationalFn, 3> out;
    if (same_denominator(f)) {
        for (int k = 0; k < 3; ++k) {
            Poly n = f[0].numerator() * M(k, 0) + f[1].numerator() * M(k, 1) +
                     f[2].numerator() * M(k, 2);
            out[size_t(k)] = RationalFn(std::move(n), f[0].denominator());
        }
        return out;
    }
    for (int k = 0; k < 3; ++k)
        out[size_t(k)] =
            (f[0] * M(k, 0) + f[1] * M(k, 1) + f[2] * M(k, 2)).reduced(1e-9);
    return out;
}

// ------------------------------------------------- flower Newton solve ----

struct FlowerParams {
    cdouble v, ep, beta; // unknowns; w and e0 are gauge-pinned
};

Eigen::VectorXd flower_residual(int p, const FlowerParams& q) {
    const cdouble w = cdouble(-double(p) / double(p - 1), 0.0);
    const cdouble e0 = kI;
    Poly qden = Poly::monomial(2 * p, 1.0) + Poly::monomial(p, q.beta) + Poly::constant(1.0);
    Poly qd = qden.derivative();
    Poly np = Poly::monomial(2 * p - 1, q.v);
    Poly nm = Poly::monomial(1, w);
    Poly n3 = Poly::monomial(p, q.ep) + Poly::constant(e0);
    Poly A = np.derivative() * qden - np * qd;
    Poly B = nm.derivative() * qden - nm * qd;
    Poly C = n3.derivative() * qden - n3 * qd;
    Poly S = A * B + C * C;
    Eigen::VectorXd r(2 * (6 * p - 1));
    for (int k = 0; k < 6 * p - 1; ++k) {
        r(2 * k) = S.coeff(k).real();
        r(2 * k + 1) = S.coeff(k).imag();
    }
    return r;
}

FlowerParams solve_flower(int p) {
    auto pack = [](const FlowerParams& q) {
        Eigen::VectorXd t(6);
        t << q.v.real(), q.v.imag(), q.ep.real(), q.ep.imag(), q.beta.real(), q.beta.imag();
        return t;
    };
    auto unpack = [](const Eigen::VectorXd& t) {
        return FlowerParams{cdouble(t(0), t(1)), cdouble(t(2), t(3)), cdouble(t(4), t(5))};
    };
    const std::vector<FlowerParams> seeds = {
        {cdouble(1.0, 0.0), cdouble(-1.0, 0.0), cdouble(0.0, 1.5)},
        {cdouble(1.5, 0.0), cdouble(-2.0, 0.0), cdouble(0.0, 3.0)},
        {cdouble(0.8, 0.1), cdouble(-0.8, 0.1), cdouble(0.2, 2.0)},
    };
    for (const auto& seed : seeds) {
        Eigen::VectorXd theta = pack(seed);
        double lambda = 1e-3;
        bool ok = false;
        for (int it = 0; it < 200; ++it) {
            Eigen::VectorXd F = flower_residual(p, unpack(theta));
            const double fn = F.lpNorm<Eigen::Infinity>();
            if (fn < 1e-13 * (1.0 + theta.lpNorm<Eigen::Infinity>())) {
                ok = true;
                break;
            }
            Eigen::MatrixXd J(F.size(), 6);
            for (int j = 0; j < 6; ++j) {
                Eigen::VectorXd tp = theta;
                const double h = 1e-7 * (1.0 + std::abs(theta(j)));
                tp(j) += h;
                J.col(j) = (flower_residual(p, unpack(tp)) - F) / h;
            }
            Eigen::MatrixXd H = J.transpose() * J;
            Eigen::VectorXd g = J.transpose() * F;
            bool stepped = false;
            for (int tries = 0; tries < 12; ++tries) {
                Eigen::MatrixXd Hl = H + lambda * Eigen::MatrixXd::Identity(6, 6);
                Eigen::VectorXd step = Hl.ldlt().solve(-g);
                Eigen::VectorXd cand = theta + step;
                if (flower_residual(p, unpack(cand)).squaredNorm() < F.squaredNorm()) {
                    theta = cand;
                    lambda = std::max(lambda * 0.3, 1e-14);
                    stepped = true;
                    break;
                }
                lambda *= 10.0;
            }
            if (!stepped) break;
        }
        if (ok) return unpack(theta);
    }
    throw SolveFailure("flower residue/null system did not converge for p=" + std::to_string(p));
}

// Reference tetrahedral end normals for p = 2 (one global rotation free).
bool matches_up_to_rotation(std::vector<Vec3> got, const std::vector<Vec3>& want, double tol) {
    if (got.size() != want.size()) return false;
    std::vector<int> perm(got.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[size_t(i)] = int(i);
    std::sort(perm.begin(), perm.end());
    do {
        Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
        for (size_t i = 0; i < got.size(); ++i)
            H += want[i] * got[size_t(perm[i])].transpose();
        Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::Matrix3d R = svd.matrixU() * svd.matrixV().transpose();
        if (R.determinant() < 0) {
            Eigen::Matrix3d U = svd.matrixU();
            U.col(2) *= -1.0;
            R = U * svd.matrixV().transpose();
        }
        double worst = 0.0;
        for (size_t i = 0; i < got.size(); ++i)
            worst = std::max(worst, (want[i] - R * got[size_t(perm[i])]).norm());
        if (worst < tol) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

} // namespace

// ----------------------------------------------------------------------

Vec3 NullCurveData::position(cdouble z) const {
    CVec3 v = eval_three(primitive, z) - eval_three(primitive, basepoint);
    return v.real() + offset;
}

CVec3 NullCurveData::phi_eval(cdouble z) const { return eval_three(phi, z); }

Vec3 conjugate_position(const NullCurveData& data, cdouble z) {
    CVec3 v = eval_three(data.primitive, z) - eval_three(data.primitive, data.basepoint);
    return v.imag();
}

NullCurveData from_weierstrass(const WeierstrassPair& pair) {
    const RationalFn& g = pair.g;
    const RationalFn& eta = pair.eta;
    if (g.numerator().is_zero() && g.denominator().degree() == 0)
        throw ValidationFailure("Gauss map must be nonconstant");
    if (eta.numerator().is_zero())
        throw ValidationFailure("height differential must not vanish identically");
    RationalFn g2 = g * g;
    NullCurveData data;
    data.phi[0] = ((RationalFn::constant(1.0) - g2) * eta).reduced(1e-9);
    data.phi[1] = ((RationalFn::constant(1.0) + g2) * eta * kI).reduced(1e-9);
    data.phi[2] = (g * eta * cdouble(2.0)).reduced(1e-9);
    data.provenance = "weierstrass pair";
    validate(data);
    for (int k = 0; k < 3; ++k) {
        auto anti = data.phi[size_t(k)].antiderivative();
        if (!anti) throw LogEndDetected("nonzero residue prevents a rational primitive");
        data.primitive[size_t(k)] = *anti;
    }
    return data;
}

SurfaceSummary validate(const NullCurveData& data) {
    // 1. Null identity as a rational identity.
    const Poly& d0 = data.phi[0].denominator();
    const Poly& d1 = data.phi[1].denominator();
    const Poly& d2 = data.phi[2].denominator();
    Poly t0 = data.phi[0].numerator() * data.phi[0].numerator() * (d1 * d1) * (d2 * d2);
    Poly t1 = data.phi[1].numerator() * data.phi[1].numerator() * (d0 * d0) * (d2 * d2);
    Poly t2 = data.phi[2].numerator() * data.phi[2].numerator() * (d0 * d0) * (d1 * d1);
    const double nscale = std::max({t0.scale(), t1.scale(), t2.scale(), 1e-300});
    Poly sum = t0 + t1 + t2;
    if (sum.scale() > 1e-12 * nscale)
        throw NullIdentityViolation("null identity violated: |sum coeff| = " +
                                    std::to_string(sum.scale() / nscale) + " x scale");

    // 2. Pole structure: double poles with zero residue at every end.
    std::vector<RawEnd> raw = collect_ends(data);
    if (raw.empty())
        throw WrongPoleOrder("no finite-chart ends: not a compact-inversion candidate");
    for (const RawEnd& e : raw) {
        for (int k = 0; k < 3; ++k) {
            if (e.order[size_t(k)] == 0) continue;
            if (e.order[size_t(k)] == 1)
                throw LogEndDetected("order-1 pole (logarithmic end) at z = (" +
                                     std::to_string(e.location.real()) + "," +
                                     std::to_string(e.location.imag()) + ")");
            if (e.order[size_t(k)] > 2)
                throw WrongPoleOrder("pole of order > 2 in a curve component");
            const double lead = std::abs(e.leading[size_t(k)]);
            if (std::abs(e.residue[size_t(k)]) > 1e-8 * std::max(lead, 1e-30))
                throw LogEndDetected("nonzero residue (logarithmic growth) at an end");
        }
    }

    // 3. Infinity chart: the pulled-back 1-form must be regular at w = 0
    //    (ends are required to sit in the finite chart).
    for (int k = 0; k < 3; ++k) {
        RationalFn form = data.phi[size_t(k)].pullback_form(MobiusMap::reciprocal());
        for (const PoleRecord& p : form.poles())
            if (std::abs(p.location) < 1e-7)
                throw WrongPoleOrder("pole of the curve 1-form at the infinity chart point");
    }

    // 4. Immersion: |Phi'|^2 must not vanish away from the ends.
    std::array<RationalFn, 3> red;
    for (int k = 0; k < 3; ++k) red[size_t(k)] = data.phi[size_t(k)].reduced(1e-9);
    double typ = 0.0;
    for (int j = 0; j < 8; ++j) {
        const cdouble zr = 1.37 * std::exp(kI * (0.41 + 0.79 * double(j)));
        double m = 0.0;
        for (int k = 0; k < 3; ++k) {
            try {
                m = std::max(m, std::abs(red[size_t(k)].eval(zr)));
            } catch (const PoleEvaluation&) {}
        }
        typ = std::max(typ, m);
    }
    int k0 = 0;
    while (k0 < 3 && red[size_t(k0)].numerator().is_zero()) ++k0;
    if (k0 == 3) throw BranchPointDetected("curve differential vanishes identically");
    for (const PolishedRoot& root : find_roots(red[size_t(k0)].numerator())) {
        bool near_end = false;
        for (const RawEnd& e : raw)
            if (std::abs(root.location - e.location) < 1e-5 * (1.0 + std::abs(e.location)))
                near_end = true;
        if (near_end) continue;
        double worst = 0.0;
        for (int k = 0; k < 3; ++k) {
            try {
                worst = std::max(worst, std::abs(red[size_t(k)].eval(root.location)));
            } catch (const PoleEvaluation&) {
                worst = 1e300;
            }
        }
        if (worst < 1e-7 * typ)
            throw BranchPointDetected("|Phi'| vanishes off the ends (branch point)");
    }
    {
        double at_inf = 0.0;
        for (int k = 0; k < 3; ++k) {
            RationalFn form = red[size_t(k)].pullback_form(MobiusMap::reciprocal()).reduced(1e-9);
            try {
                at_inf = std::max(at_inf, std::abs(form.eval(0.0)));
            } catch (const PoleEvaluation&) {
                at_inf = 1e300;
            }
        }
        if (at_inf < 1e-7 * typ)
            throw BranchPointDetected("branch point at the infinity chart point");
    }

    SurfaceSummary s;
    s.end_count = static_cast<int>(raw.size());
    s.symmetry_order = data.symmetry_order;
    RationalFn g = compute_gauss_rational(data);
    const int deg = std::max(g.numerator().degree(), g.denominator().degree());
    s.total_curvature = -4.0 * kPi * double(deg);
    s.quantized_energy = 4.0 * kPi * double(s.end_count);
    s.span_dimension = end_span_dimension(data);
    return s;
}

std::vector<cdouble> end_locations(const NullCurveData& data) {
    std::vector<cdouble> out;
    for (const RawEnd& e : collect_ends(data)) out.push_back(e.location);
    return out;
}

RationalFn gauss_map_rational(const NullCurveData& data) { return compute_gauss_rational(data); }

Vec3 gauss_map(const NullCurveData& data, cdouble z) {
    RationalFn g = compute_gauss_rational(data);
    const double dmag = std::abs(g.denominator().eval(z));
    const double nmag = std::abs(g.numerator().eval(z));
    if (dmag > nmag) return stereo_from_g(g.numerator().eval(z) / g.denominator().eval(z));
    // near a pole of g use h = 1/g
    const cdouble h = g.denominator().eval(z) / g.numerator().eval(z);
    const double n2 = std::norm(h);
    return Vec3(2.0 * h.real(), -2.0 * h.imag(), 1.0 - n2) / (1.0 + n2);
}

EndChart end_normalize(const NullCurveData& data, int end_index) {
    auto all = ends(data);
    if (end_index < 0 || end_index >= static_cast<int>(all.size()))
        throw Error("end index out of range");
    return all[size_t(end_index)];
}

std::vector<EndChart> ends(const NullCurveData& data) {
    std::vector<RawEnd> raw = collect_ends(data);
    std::vector<EndChart> out;
    // Chart radius guard: nearest-neighbour end distance.
    auto nearest = [&raw](size_t i) {
        double d = 1e300;
        for (size_t j = 0; j < raw.size(); ++j)
            if (j != i) d = std::min(d, std::abs(raw[i].location - raw[j].location));
        return d;
    };
    RationalFn g = compute_gauss_rational(data);
    for (size_t i = 0; i < raw.size(); ++i) {
        EndChart ec;
        ec.index = static_cast<int>(i);
        ec.location = raw[i].location;
        CVec3 a_raw(raw[i].leading[0], raw[i].leading[1], raw[i].leading[2]);
        const double amag = a_raw.norm();
        if (amag < 1e-14) throw DegenerateEnd("vanishing leading coefficient at an end");
        const double s = amag / std::sqrt(2.0);
        ec.scale = s;
        ec.leading = -a_raw / s;

        // normal orthogonal to the asymptotic plane span{Re a, Im a},
        // oriented by the extended Gauss map
        Vec3 re = ec.leading.real(), im = ec.leading.imag();
        Vec3 nu = re.cross(im);
        const double nn = nu.norm();
        if (nn < 1e-12) throw DegenerateEnd("degenerate asymptotic plane");
        nu /= nn;
        Vec3 nu_g;
        {
            const double dmag = std::abs(g.denominator().eval(ec.location));
            const double nm = std::abs(g.numerator().eval(ec.location));
            if (dmag > nm)
                nu_g = stereo_from_g(g.numerator().eval(ec.location) /
                                     g.denominator().eval(ec.location));
            else {
                const cdouble h =
                    g.denominator().eval(ec.location) / g.numerator().eval(ec.location);
                const double n2 = std::norm(h);
                nu_g = Vec3(2.0 * h.real(), -2.0 * h.imag(), 1.0 - n2) / (1.0 + n2);
            }
        }
        if (nu.dot(nu_g) < 0) nu = -nu;
        ec.normal = nu;

        // Regular part Y(w) = s Phi'(z_e + s w) + a / w^2, with the exact
        // double cancellation at w = 0 removed by synthetic division.
        for (int k = 0; k < 3; ++k) {
            RationalFn pulled =
                data.phi[size_t(k)].pullback_form(MobiusMap::affine(1.0 / s, -ec.location / s));
            // pulled = n_p / (w^2 E) = -a/w^2 + Y, so Y = (n_p + a E)/(w^2 E);
            // both double roots at w = 0 are exact up to roundoff and are
            // removed by dropping the two lowest coefficients.
            std::vector<cdouble> dc = pulled.denominator().coeffs();
            if (dc.size() < 3) throw DegenerateEnd("end chart pullback lost its double pole");
            dc.erase(dc.begin(), dc.begin() + 2);
            Poly E(std::move(dc));
            Poly num2 = pulled.numerator() + Poly::constant(ec.leading(k)) * E;
            std::vector<cdouble> nc = num2.coeffs();
            if (nc.size() >= 2)
                nc.erase(nc.begin(), nc.begin() + 2);
            else
                nc.clear();
            ec.regular_part[size_t(k)] = RationalFn(Poly(std::move(nc)), E);
        }

        // Plane offset by Richardson extrapolation along radial parameter
        // rays. The graph expansion has a c/|x| ~ |w| leading correction, so
        // u(t) = b + c1 t + c2 t^2 + ...; two second-order Richardson levels
        // on a geometric sequence give an O(t^3) value with a fair error
        // estimate from the level difference.
        const double t0 = std::min(0.002, 0.2 * nearest(i) / s);
        auto extrapolate = [&](double theta) {
            auto u = [&](double t) {
                return data.position(ec.location + s * t * std::exp(kI * theta)).dot(nu);
            };
            double f[4];
            for (int j = 0; j < 4; ++j) f[j] = u(t0 / double(1 << j));
            auto rich3 = [](double a, double b, double c) {
                const double r1 = 2 * b - a, r2 = 2 * c - b;
                return (4 * r2 - r1) / 3.0;
            };
            const double lo = rich3(f[0], f[1], f[2]);
            const double hi = rich3(f[1], f[2], f[3]);
            return std::pair<double, double>(hi, std::abs(hi - lo));
        };
        auto [b1, e1] = extrapolate(0.0);
        auto [b2, e2] = extrapolate(1.1);
        ec.plane_offset = 0.5 * (b1 + b2);
        ec.plane_offset_error = std::max({std::abs(b1 - b2), e1, e2});
        const double bscale = 1.0 + std::abs(ec.plane_offset);
        if (ec.plane_offset_error > 1e-8 * bscale)
            throw ExtrapolationDivergence("plane offset extrapolation did not settle");
        out.push_back(std::move(ec));
    }
    return out;
}

int end_span_dimension(const NullCurveData& data) {
    std::vector<EndChart> es = ends(data);
    Eigen::MatrixXd N(es.size(), 3);
    for (size_t i = 0; i < es.size(); ++i) N.row(long(i)) = es[i].normal.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(N);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-8 * sv(0)) ++rank;
    return rank;
}

Vec3 immersion_eval(const NullCurveData& data, cdouble z) {
    return immersion_eval(data, z, data.basepoint);
}

Vec3 immersion_eval(const NullCurveData& data, cdouble z, cdouble basepoint) {
    std::vector<cdouble> poles = end_locations(data);
    double min_sep = 1e300;
    for (size_t i = 0; i < poles.size(); ++i)
        for (size_t j = i + 1; j < poles.size(); ++j)
            min_sep = std::min(min_sep, std::abs(poles[i] - poles[j]));
    const double clearance = std::min(0.25 * min_sep, 0.2);
    for (const cdouble& p : poles)
        if (std::abs(z - p) < 1e-9 || std::abs(basepoint - p) < 1e-9)
            throw PathThroughPole("endpoint coincides with an end");
    std::vector<cdouble> pts = route_path(basepoint, z, poles, clearance);
    CVec3 acc = CVec3::Zero();
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const cdouble a = pts[i], b = pts[i + 1];
        acc += gk_segment(
            [&](cdouble t) { return CVec3((b - a) * data.phi_eval(a + t * (b - a))); }, 0.0, 1.0,
            1e-12, 0);
    }
    return acc.real() + data.offset;
}

NullCurveData associate(const NullCurveData& data, double t) {
    const cdouble f = std::exp(kI * t);
    NullCurveData out = data;
    for (int k = 0; k < 3; ++k) {
        out.phi[size_t(k)] = data.phi[size_t(k)] * f;
        out.primitive[size_t(k)] = data.primitive[size_t(k)] * f;
    }
    out.provenance = data.provenance + " | associate t=" + std::to_string(t);
    validate(out);
    return out;
}

NullCurveData orbit_act(const NullCurveData& data, const CMat3& M) {
    const double ortho = (M.transpose() * M - CMat3::Identity()).cwiseAbs().maxCoeff();
    const double det = std::abs(M.determinant() - cdouble(1.0));
    if (ortho > 1e-10 || det > 1e-10)
        throw NotComplexOrthogonal("matrix is not in SO(3,C) to 1e-10");
    NullCurveData out = data;
    out.phi = linear_combo(data.phi, M);
    out.primitive = linear_combo(data.primitive, M);
    out.offset = M.real() * data.offset;
    out.provenance = data.provenance + " | SO(3,C) orbit element";
    validate(out);
    return out;
}

NullCurveData translated(const NullCurveData& data, const Vec3& tau) {
    NullCurveData out = data;
    out.offset += tau;
    return out;
}

WeierstrassPair flower_weierstrass(int p) {
    if (p < 2) throw Error("flower requires p >= 2");
    const double c = std::sqrt(2.0 * p - 1.0);
    const double pm1 = double(p - 1);
    Poly gnum = Poly::monomial(2 * p - 1, 1.0) + Poly::monomial(p - 1, -c * kI);
    Poly gden = Poly::monomial(p, c) + Poly::constant(kI);
    Poly q = Poly::monomial(2 * p, 1.0) + Poly::monomial(p, 2.0 * c * kI / pm1) + Poly::constant(1.0);
    Poly d = Poly::monomial(p, c) + Poly::constant(kI);
    WeierstrassPair pair;
    pair.g = RationalFn(gnum, gden);
    pair.eta = RationalFn(Poly::constant(double(p) / (2.0 * pm1)) * d * d, q * q);
    return pair;
}

NullCurveData flower_data(int p) {
    if (p < 2) throw Error("flower requires p >= 2");
    FlowerParams sol = solve_flower(p);
    const cdouble w = cdouble(-double(p) / double(p - 1), 0.0);
    const cdouble e0 = kI;
    Poly q = Poly::monomial(2 * p, 1.0) + Poly::monomial(p, sol.beta) + Poly::constant(1.0);
    Poly n1 = (Poly::monomial(2 * p - 1, sol.v) + Poly::monomial(1, w)) * cdouble(0.5);
    Poly n2 = (Poly::monomial(2 * p - 1, sol.v) - Poly::monomial(1, w)) * (cdouble(0.5) / kI);
    Poly n3 = Poly::monomial(p, sol.ep) + Poly::constant(e0);

    NullCurveData data;
    data.primitive[0] = RationalFn(n1, q);
    data.primitive[1] = RationalFn(n2, q);
    data.primitive[2] = RationalFn(n3, q);
    for (int k = 0; k < 3; ++k) data.phi[size_t(k)] = data.primitive[size_t(k)].derivative();
    data.basepoint = 0.0;
    data.symmetry_order = p;
    data.provenance = "minimal flower p=" + std::to_string(p) + " (dihedral null-curve solve)";

    SurfaceSummary s = validate(data);
    if (s.end_count != 2 * p)
        throw SolveFailure("flower solve produced " + std::to_string(s.end_count) +
                           " ends, expected " + std::to_string(2 * p));
    if (p == 2) {
        const double c = std::sqrt(2.0 / 3.0), d = std::sqrt(1.0 / 3.0);
        std::vector<Vec3> want = {Vec3(c, 0, d), Vec3(-c, 0, d), Vec3(0, c, -d), Vec3(0, -c, -d)};
        std::vector<Vec3> got;
        for (const EndChart& e : ends(data)) got.push_back(e.normal);
        if (!matches_up_to_rotation(got, want, 1e-8))
            throw SolveFailure("p=2 end normals failed the tetrahedral cross-check");
    }
    return data;
}

} // namespace willab
