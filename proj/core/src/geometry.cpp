#include "willab/geometry.hpp"

#include "willab/errors.hpp"
#include "willab/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace willab {

namespace {
constexpr double kPi = std::numbers::pi;
const cdouble kI(0.0, 1.0);
} // namespace

// ------------------------------------------------------------------------
// SurfaceEvaluator

SurfaceEvaluator::SurfaceEvaluator(const NullCurveData& data) : data_(data) {
    ends_ = ends(data_);

    chart_[0].prim = data_.primitive;
    for (int k = 0; k < 3; ++k) {
        chart_[0].num[size_t(k)] = data_.phi[size_t(k)].numerator();
        chart_[0].den[size_t(k)] = data_.phi[size_t(k)].denominator();
        RationalFn pulled = data_.phi[size_t(k)].pullback_form(MobiusMap::reciprocal());
        chart_[1].num[size_t(k)] = pulled.numerator();
        chart_[1].den[size_t(k)] = pulled.denominator();
        chart_[1].prim[size_t(k)] =
            data_.primitive[size_t(k)].pullback_function(MobiusMap::reciprocal());
    }
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 3; ++k) {
            chart_[c].num_d[size_t(k)] = chart_[c].num[size_t(k)].derivative();
            chart_[c].den_d[size_t(k)] = chart_[c].den[size_t(k)].derivative();
        }
    for (int k = 0; k < 3; ++k) prim_base_(k) = data_.primitive[size_t(k)].eval(data_.basepoint);

    double rmax = 0.0;
    for (const auto& e : ends_) rmax = std::max(rmax, std::abs(e.location));
    split_radius_ = 2.0 * rmax + 2.0;

    // Per-end regularized primitive Phi = P/(z - z_e) + reg; evaluating the
    // pole term separately avoids the cancellation that kills X = Re(Phi)
    // deep inside the end charts.
    for (const auto& e : ends_) {
        EndReg r;
        r.location = e.location;
        double nearest = 1e300;
        for (const auto& o : ends_)
            if (std::abs(o.location - e.location) > 1e-12)
                nearest = std::min(nearest, std::abs(o.location - e.location));
        r.radius = 0.4 * std::min(nearest, 1e300);
        for (int k = 0; k < 3; ++k) {
            const RationalFn& f = data_.primitive[size_t(k)];
            r.pole_coeff(k) = f.residue_at(e.location);
            const Poly& den = f.denominator();
            std::vector<cdouble> q(size_t(std::max(den.degree(), 1)), cdouble(0));
            cdouble carry = den.leading();
            for (int j = den.degree() - 1; j >= 0; --j) {
                q[size_t(j)] = carry;
                carry = den.coeff(j) + carry * e.location;
            }
            Poly Qe(std::move(q));
            Poly num = f.numerator() - Poly::constant(r.pole_coeff(k)) * Qe;
            std::vector<cdouble> nq;
            if (num.degree() >= 1) {
                nq.assign(size_t(num.degree()), cdouble(0));
                carry = num.leading();
                for (int j = num.degree() - 1; j >= 0; --j) {
                    nq[size_t(j)] = carry;
                    carry = num.coeff(j) + carry * e.location;
                }
            }
            r.reg[size_t(k)] = RationalFn(Poly(std::move(nq)), Qe);
        }
        reg_.push_back(std::move(r));
    }
}

CVec3 SurfaceEvaluator::phi_chart(const ChartPoint& p) const {
    const auto& c = chart_[p.chart];
    CVec3 out;
    for (int k = 0; k < 3; ++k)
        out(k) = c.num[size_t(k)].eval(p.zeta) / c.den[size_t(k)].eval(p.zeta);
    return out;
}

CVec3 SurfaceEvaluator::dphi_chart(const ChartPoint& p) const {
    const auto& c = chart_[p.chart];
    CVec3 out;
    for (int k = 0; k < 3; ++k) {
        const cdouble n = c.num[size_t(k)].eval(p.zeta);
        const cdouble d = c.den[size_t(k)].eval(p.zeta);
        const cdouble dn = c.num_d[size_t(k)].eval(p.zeta);
        const cdouble dd = c.den_d[size_t(k)].eval(p.zeta);
        out(k) = (dn * d - n * dd) / (d * d);
    }
    return out;
}

JVec3 SurfaceEvaluator::position_jet(const ChartPoint& p) const {
    CVec3 value;
    if (p.chart == 0) {
        const EndReg* best = nullptr;
        double bd = 1e300;
        for (const auto& r : reg_) {
            const double d = std::abs(p.zeta - r.location);
            if (d < r.radius && d < bd) {
                bd = d;
                best = &r;
            }
        }
        if (best) {
            const cdouble inv = 1.0 / (p.zeta - best->location);
            for (int k = 0; k < 3; ++k)
                value(k) = best->pole_coeff(k) * inv + best->reg[size_t(k)].eval(p.zeta);
        } else {
            for (int k = 0; k < 3; ++k) value(k) = chart_[0].prim[size_t(k)].eval(p.zeta);
        }
    } else {
        for (int k = 0; k < 3; ++k) value(k) = chart_[1].prim[size_t(k)].eval(p.zeta);
    }
    value -= prim_base_;
    CVec3 d = phi_chart(p);
    JVec3 X;
    for (int k = 0; k < 3; ++k) {
        X[size_t(k)].v = value(k).real() + data_.offset(k);
        X[size_t(k)].dz = 0.5 * d(k);
        X[size_t(k)].dzb = std::conj(X[size_t(k)].dz);
        X[size_t(k)].dzzb = 0.0;
    }
    return X;
}

Vec3 SurfaceEvaluator::conj_position(const ChartPoint& p) const {
    CVec3 value;
    const auto& c = chart_[p.chart];
    for (int k = 0; k < 3; ++k) value(k) = c.prim[size_t(k)].eval(p.zeta);
    value -= prim_base_;
    return value.imag();
}

std::array<Jet, 3> SurfaceEvaluator::sigma_jet(const ChartPoint& p) const {
    const cdouble z = p.zeta;
    Jet zj{z, 1.0, 0.0, 0.0};
    Jet zbj = zj.conjugate();
    Jet inv = (Jet::constant(1.0) + zj * zbj).reciprocal();
    Jet s1 = (zj + zbj) * inv;
    Jet s2 = (zj - zbj) * cdouble(0.0, -1.0) * inv;
    Jet s3 = (zj * zbj - Jet::constant(1.0)) * inv;
    if (p.chart == 1) {
        s2 = -s2;
        s3 = -s3;
    }
    return {s1, s2, s3};
}

ChartPoint SurfaceEvaluator::locate(cdouble z_chart0) const { return {0, z_chart0}; }

GeomState SurfaceEvaluator::state(const ChartPoint& p) const {
    GeomState st;
    const CVec3 f = phi_chart(p);
    const CVec3 df = dphi_chart(p);
    JVec3 F;
    for (int k = 0; k < 3; ++k) F[size_t(k)] = Jet::holomorphic(f(k), df(k));
    JVec3 Fc = conjugate(F);

    st.E = dot(F, Fc) * 0.5; // |Phi'|^2 / 2, real jet
    JVec3 W = cdouble(0.0, -0.5) * cross(F, Fc);
    Jet invE = st.E.reciprocal();
    st.n = invE * W;

    st.X = position_jet(p);
    st.absX2 = dot(st.X, st.X);

    cdouble hopf(0);
    for (int k = 0; k < 3; ++k) hopf += 0.5 * df(k) * st.n[size_t(k)].v;
    const double E = st.E.v.real();
    st.K = -4.0 * std::norm(hopf) / (E * E);

    double gns = 0.0;
    for (int k = 0; k < 3; ++k) gns += std::norm(st.n[size_t(k)].dz);
    st.grad_n_sq = 4.0 * gns / E;

    Jet xdotn = dot(st.X, st.n);
    JVec3 scaled = (xdotn * 2.0 * st.absX2.reciprocal()) * st.X;
    st.nPsi = st.n - scaled;

    st.Xv = value_of(st.X);
    st.nv = value_of(st.n);
    st.nPsiv = value_of(st.nPsi);
    st.Psiv = st.Xv / st.Xv.squaredNorm();
    return st;
}

SurfaceSample SurfaceEvaluator::sample(const ChartPoint& p) const {
    GeomState st = state(p);
    SurfaceSample s;
    s.at = p;
    s.X = st.Xv;
    s.Psi = st.Psiv;
    s.n_X = st.nv;
    s.n_Psi = st.nPsiv;
    s.lambda = 0.5 * std::log(st.E.v.real());
    s.gauss_curvature = st.K;
    s.grad_normal_sq = st.grad_n_sq;
    return s;
}

// ------------------------------------------------------------------------
// operations

SurfaceSample sample(const NullCurveData& data, cdouble z) {
    SurfaceEvaluator ev(data);
    GeomState st = ev.state({0, z});
    double scale = 0.0;
    for (const auto& e : ev.end_charts()) scale = std::max(scale, std::abs(e.scale));
    if (scale == 0.0) scale = 1.0;
    if (st.Xv.norm() < 1e-9 * scale)
        throw OriginOnSurface("surface passes through the origin at the sample point");
    return ev.sample({0, z});
}

std::vector<ChartPoint> sample_grid(const NullCurveData& data, int count, unsigned seed) {
    std::vector<cdouble> zs = end_locations(data);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ChartPoint> out;
    out.reserve(size_t(count));
    int guard = 0;
    while (static_cast<int>(out.size()) < count && guard < 200 * count) {
        ++guard;
        // area-uniform on the round parameter sphere
        const double u = 2.0 * unit(rng) - 1.0;
        const double phi = 2.0 * kPi * unit(rng);
        const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
        const double denom = 1.0 - u;
        if (std::abs(denom) < 1e-6) continue;
        ChartPoint p;
        p.chart = 0;
        p.zeta = cdouble(st * std::cos(phi), st * std::sin(phi)) / denom;
        if (std::abs(p.zeta) > 4.0) {
            p.chart = 1;
            p.zeta = 1.0 / p.zeta;
        }
        bool ok = true;
        for (const cdouble& e : zs) {
            const cdouble zc = p.chart == 0 ? p.zeta : 1.0 / p.zeta;
            if (std::abs(zc - e) < 0.08 * (1.0 + std::abs(e))) ok = false;
        }
        if (ok) out.push_back(p);
    }
    return out;
}

NullCurveData ensure_origin_off_surface(const NullCurveData& data, Vec3* shift_applied) {
    SurfaceEvaluator ev(data);
    double s_hat = 0.0;
    for (const auto& e : ev.end_charts()) s_hat = std::max(s_hat, std::abs(e.scale));
    if (s_hat == 0.0) s_hat = 1.0;
    auto grid = sample_grid(data, 600);
    auto min_dist = [&](const Vec3& target) {
        double d = 1e300;
        for (const auto& p : grid)
            d = std::min(d, (value_of(ev.position_jet(p)) - target).norm());
        return d;
    };
    if (min_dist(Vec3::Zero()) > 0.05 * s_hat) {
        if (shift_applied) *shift_applied = Vec3::Zero();
        return data;
    }
    const double mult[] = {1.0, 0.7, 1.4, 0.4, 2.2};
    const Vec3 dirs[] = {Vec3(0, 0, 1), Vec3(0, 0, -1), Vec3(0.3, 0.2, 1.0).normalized()};
    for (const Vec3& dir : dirs) {
        for (double m : mult) {
            const Vec3 target = m * s_hat * dir;
            if (min_dist(target) > 0.05 * s_hat) {
                if (shift_applied) *shift_applied = -target;
                return translated(data, -target);
            }
        }
    }
    throw OriginOnSurface("could not find an admissible inversion shift");
}

std::pair<double, double> willmore_energy(const NullCurveData& data) {
    validate(data);
    NullCurveData shifted = ensure_origin_off_surface(data);
    SurfaceEvaluator ev(shifted);

    double s_hat = 0.0;
    for (const auto& e : ev.end_charts()) s_hat = std::max(s_hat, std::abs(e.scale));

    auto density = [&](const ChartPoint& p) {
        GeomState st = ev.state(p);
        const double r2 = st.Xv.squaredNorm();
        if (r2 < 1e-18 * s_hat * s_hat)
            throw OriginOnSurface("origin on surface during energy quadrature");
        const double u = st.Xv.dot(st.nv);
        return 4.0 * u * u / (r2 * r2) * st.E.v.real();
    };

    auto run = [&](double refine) {
        QuadratureOptions o;
        o.refine = refine;
        QuadratureScheme scheme = build_quadrature(ev, o);
        return integrate(scheme, density, -1);
    };
    const double coarse = run(1.0);
    const double fine = run(1.4);
    return {fine, std::abs(fine - coarse)};
}

std::vector<AsymptoticPlane> asymptotic_planes(const NullCurveData& data) {
    std::vector<AsymptoticPlane> out;
    for (const EndChart& e : ends(data)) {
        AsymptoticPlane pl;
        pl.index = e.index;
        pl.normal = e.normal;
        pl.offset = e.plane_offset;
        pl.offset_error = e.plane_offset_error;
        out.push_back(pl);
    }
    return out;
}

SpinyReport spiny_test(const std::vector<AsymptoticPlane>& planes) {
    if (planes.size() < 3) throw Error("spiny test needs at least 3 planes");
    Eigen::MatrixXd N(planes.size(), 3);
    Eigen::VectorXd b(planes.size());
    for (size_t i = 0; i < planes.size(); ++i) {
        N.row(long(i)) = planes[i].normal.transpose();
        b(long(i)) = planes[i].offset;
    }
    SpinyReport rep;
    rep.common_point = N.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    double res = 0.0, bmax = 0.0;
    for (size_t i = 0; i < planes.size(); ++i) {
        res = std::max(res, std::abs(planes[i].normal.dot(rep.common_point) - planes[i].offset));
        bmax = std::max(bmax, std::abs(planes[i].offset));
    }
    rep.residual = res;
    rep.threshold = 1e-6 * (bmax + 1.0);
    rep.is_spiny = res < rep.threshold;
    return rep;
}

double jacobi_apply(const SurfaceEvaluator& ev, const ScalarField& field, const ChartPoint& p) {
    GeomState st = ev.state(p);
    Jet w = field(ev, p);
    const double lap = w.laplacian_flat() / st.E.v.real();
    return lap - 2.0 * st.K * w.v.real();
}

double lemma41_residual(const NullCurveData& data, int k, const std::vector<ChartPoint>& samples) {
    SurfaceEvaluator ev(data);
    double worst = 0.0;
    for (const ChartPoint& p : samples) {
        GeomState st = ev.state(p);
        Jet f = st.absX2 * st.nPsi[size_t(k)];
        const double Lf = f.laplacian_flat() / st.E.v.real() - 2.0 * st.K * f.v.real();
        worst = std::max(worst, std::abs(Lf - 4.0 * st.n[size_t(k)].v.real()));
    }
    return worst;
}

SupportFieldReport support_field_check(const NullCurveData& data,
                                       const std::vector<ChartPoint>& samples) {
    SpinyReport spin = spiny_test(asymptotic_planes(data));
    if (!spin.is_spiny)
        throw NotSpiny("support-field check needs a spiny surface (residual " +
                       std::to_string(spin.residual) + ")");
    NullCurveData centered = translated(data, -spin.common_point);
    SurfaceEvaluator ev(centered);

    SupportFieldReport rep;
    for (const ChartPoint& p : samples) {
        GeomState st = ev.state(p);
        Jet u = dot(st.X, st.n);
        const double Lu = u.laplacian_flat() / st.E.v.real() - 2.0 * st.K * u.v.real();
        rep.max_jacobi_residual = std::max(rep.max_jacobi_residual, std::abs(Lu));

        // conjugate support function (X*) . n; d(X*)/dz = -i Phi'/2
        JVec3 Xc;
        Vec3 xcv = ev.conj_position(p);
        CVec3 f = ev.phi_chart(p);
        for (int k = 0; k < 3; ++k) {
            Xc[size_t(k)].v = xcv(k);
            Xc[size_t(k)].dz = cdouble(0.0, -0.5) * f(k);
            Xc[size_t(k)].dzb = std::conj(Xc[size_t(k)].dz);
            Xc[size_t(k)].dzzb = 0.0;
        }
        Jet ubar = dot(Xc, st.n);
        const double Lub = ubar.laplacian_flat() / st.E.v.real() - 2.0 * st.K * ubar.v.real();
        rep.conjugate_residual = std::max(rep.conjugate_residual, std::abs(Lub));
    }

    for (const EndChart& e : ends(centered)) {
        const double s = std::abs(e.scale);
        const double t0 = 0.002;
        auto u_at = [&](double t) {
            GeomState st = ev.state({0, e.location + s * t});
            return st.Xv.dot(st.nv);
        };
        double f[4];
        for (int j = 0; j < 4; ++j) f[j] = u_at(t0 / double(1 << j));
        const double r2 = 2 * f[2] - f[1], r3 = 2 * f[3] - f[2];
        rep.end_values.push_back((4 * r3 - r2) / 3.0);
    }
    return rep;
}

std::vector<DensityPoint> density_sweep(const NullCurveData& data,
                                        const std::vector<double>& eps_list,
                                        double chart_scale_factor) {
    for (size_t i = 1; i < eps_list.size(); ++i)
        if (eps_list[i] >= eps_list[i - 1]) throw Error("eps list must be strictly decreasing");
    SurfaceEvaluator ev(data);
    QuadratureOptions opt;
    opt.eps = eps_list;
    opt.chart_scale_factor = chart_scale_factor;
    QuadratureScheme scheme = build_quadrature(ev, opt);

    const int m = static_cast<int>(scheme.ends.size());
    // e^{2 lambda} minus the smooth per-end model chi_e s_e^2/r^4; the model
    // is added back analytically so the pi m / eps^2 bulk never meets the
    // 2-D quadrature at all.
    auto integrand = [&](const ChartPoint& p) {
        GeomState st = ev.state(p);
        double v = st.E.v.real();
        if (p.chart == 0)
            for (size_t e = 0; e < scheme.ends.size(); ++e) {
                const double r = std::abs(p.zeta - scheme.ends[e].center);
                if (r < scheme.ends[e].outer_radius) {
                    const double s = scheme.ends[e].chart_scale;
                    v -= scheme.chi_radial(e, r) * s * s / (r * r * r * r);
                }
            }
        return v;
    };

    std::vector<DensityPoint> out;
    for (size_t j = 0; j < eps_list.size(); ++j) {
        DensityPoint dp;
        dp.epsilon = eps_list[j];
        double area = integrate(scheme, integrand, int(j));
        for (size_t e = 0; e < scheme.ends.size(); ++e)
            area += scheme.model_integral(e, eps_list[j] * scheme.ends[e].chart_scale);
        dp.area = area;
        dp.defect = area - kPi * double(m) / (eps_list[j] * eps_list[j]);
        out.push_back(dp);
    }
    return out;
}

double total_curvature_quadrature(const NullCurveData& data) {
    SurfaceEvaluator ev(data);
    QuadratureScheme scheme = build_quadrature(ev, QuadratureOptions{});
    auto integrand = [&](const ChartPoint& p) {
        GeomState st = ev.state(p);
        return -st.K * st.E.v.real();
    };
    return integrate(scheme, integrand, -1);
}

} // namespace willab
