#include "willab/secondvariation.hpp"

#include "willab/errors.hpp"
#include "willab/so3c.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace willab {

namespace {

constexpr double kPi = std::numbers::pi;

// L_g(|X|^2 u) for every basis function plus the injected nPsi^k columns,
// and the plain values of all columns, at one chart point.
struct NodeEval {
    Eigen::VectorXd L;     // total
    Eigen::VectorXd val;   // total
    double E = 0.0;        // chart conformal factor
    double mass_density = 0.0;
};

void eval_columns(const SurfaceEvaluator& ev, const GalerkinBasis& basis, const ChartPoint& p,
                  std::vector<Jet>& scratch, NodeEval& out) {
    GeomState st = ev.state(p);
    basis.eval_jets(ev, p, scratch);
    const int nb = basis.size();
    out.L.resize(nb + 3);
    out.val.resize(nb + 3);
    const double E = st.E.v.real();
    for (int j = 0; j < nb; ++j) {
        Jet f = st.absX2 * scratch[size_t(j)];
        out.L(j) = f.laplacian_flat() / E - 2.0 * st.K * f.v.real();
        out.val(j) = scratch[size_t(j)].v.real();
    }
    for (int k = 0; k < 3; ++k) {
        Jet f = st.absX2 * st.nPsi[size_t(k)];
        out.L(nb + k) = f.laplacian_flat() / E - 2.0 * st.K * f.v.real();
        out.val(nb + k) = st.nPsi[size_t(k)].v.real();
    }
    out.E = E;
    const double x2 = st.absX2.v.real();
    out.mass_density = E / (x2 * x2);
}

} // namespace

AssembledForms assemble_forms(const NullCurveData& shifted_data, const GalerkinBasis& basis,
                              const QuadratureOptions& quad) {
    SurfaceEvaluator ev(shifted_data);
    QuadratureScheme scheme = build_quadrature(ev, quad);

    AssembledForms F;
    F.basis_size = basis.size();
    F.total = basis.size() + 3;
    F.eps = quad.eps;
    F.end_count = static_cast<int>(scheme.ends.size());

    const int n = F.total;
    const size_t nbands = quad.eps.size() - 1;
    Eigen::MatrixXd base = Eigen::MatrixXd::Zero(n, n);
    std::vector<Eigen::MatrixXd> bands(nbands, Eigen::MatrixXd::Zero(n, n));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);

    std::vector<Jet> scratch;
    NodeEval ne;
    auto accumulate = [&](const std::vector<QuadratureScheme::Node>& nodes, Eigen::MatrixXd* Qacc,
                          bool with_mass) {
        for (const auto& node : nodes) {
            eval_columns(ev, basis, node.pt, scratch, ne);
            if (Qacc)
                Qacc->selfadjointView<Eigen::Lower>().rankUpdate(ne.L,
                                                                 0.5 * node.weight * ne.E);
            if (with_mass)
                M.selfadjointView<Eigen::Lower>().rankUpdate(ne.val,
                                                             node.weight * ne.mass_density);
        }
    };
    accumulate(scheme.background, &base, true);
    accumulate(scheme.cap, &base, true);
    for (const auto& g : scheme.ends) {
        accumulate(g.outer, &base, true);
        for (size_t j = 0; j < g.bands.size(); ++j) accumulate(g.bands[j], &bands[j], true);
        accumulate(g.deep, nullptr, true);
    }
    base = base.selfadjointView<Eigen::Lower>();
    for (auto& B : bands) B = B.selfadjointView<Eigen::Lower>();
    F.M = M.selfadjointView<Eigen::Lower>();

    // end values of every column
    F.end_values.resize(n, F.end_count);
    const auto& ecs = ev.end_charts();
    std::vector<double> vals;
    for (int i = 0; i < F.end_count; ++i) {
        basis.eval_values(ev, ev.locate(ecs[size_t(i)].location), vals);
        for (int j = 0; j < basis.size(); ++j) F.end_values(j, i) = vals[size_t(j)];
        for (int k = 0; k < 3; ++k)
            F.end_values(basis.size() + k, i) = ecs[size_t(i)].normal(k);
    }

    // Q_eps = accumulated integral minus the end correction
    Eigen::MatrixXd run = base;
    for (size_t j = 0; j < quad.eps.size(); ++j) {
        if (j > 0) run += bands[j - 1];
        const double c = 8.0 * kPi / (quad.eps[j] * quad.eps[j]);
        F.Q_eps.push_back(run - c * F.end_values * F.end_values.transpose());
    }

    ExtrapolationResult ex = extrapolate_form(F.eps, F.Q_eps);
    F.Q = ex.Q;
    F.detected_order = ex.detected_order;
    F.median_order = ex.median_order;
    F.flagged_entries = ex.flagged;
    double fs = 0.0;
    for (int j = 0; j < basis.size(); ++j) fs = std::max(fs, std::abs(F.Q(j, j)));
    F.form_scale = fs;
    return F;
}

Eigen::MatrixXd assemble_form_eps(const NullCurveData& shifted_data, const GalerkinBasis& basis,
                                  double eps) {
    QuadratureOptions q;
    // a short descending ladder ending at the requested eps
    q.eps = {4.0 * eps, 2.0 * eps, eps};
    AssembledForms F = assemble_forms(shifted_data, basis, q);
    return F.Q_eps.back();
}

ExtrapolationResult extrapolate_form(const std::vector<double>& eps,
                                     const std::vector<Eigen::MatrixXd>& Q_eps,
                                     double flag_tol) {
    if (eps.size() < 3) throw Error("extrapolation needs at least 3 eps values");
    const size_t ne = eps.size();
    const int n = static_cast<int>(Q_eps.front().rows());
    ExtrapolationResult R;
    R.Q.resize(n, n);
    R.detected_order = Eigen::MatrixXd::Zero(n, n);
    double scale = 0.0;
    for (size_t k = 0; k < ne; ++k) scale = std::max(scale, Q_eps[k].cwiseAbs().maxCoeff());
    std::vector<double> orders;
    int flagged = 0;
    int gross = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double q0 = Q_eps[ne - 3](i, j), q1 = Q_eps[ne - 2](i, j),
                         q2 = Q_eps[ne - 1](i, j);
            const double d1 = q1 - q0, d2 = q2 - q1;
            const double rho = eps[ne - 1] / eps[ne - 2]; // < 1
            double value = q2, order = 0.0;
            const double atol = 1e-13 * (scale > 0 ? scale : 1.0);
            const double entry_scale = std::max(std::abs(q2), 1e-3 * scale);
            if (std::abs(d2) <= atol && std::abs(d1) <= atol) {
                // already converged in eps
            } else if (d1 * d2 > 0.0 && std::abs(d2) < std::abs(d1)) {
                order = std::log(d2 / d1) / std::log(rho);
                const double rr = std::pow(rho, order);
                value = q2 + d2 * rr / (1.0 - rr);
                orders.push_back(order);
                if (ne >= 4) {
                    // fit residual against the earliest difference
                    const double d0 = q0 - Q_eps[ne - 4](i, j);
                    const double pred =
                        d1 * (std::pow(eps[ne - 4], order) - std::pow(eps[ne - 3], order)) /
                        (std::pow(eps[ne - 3], order) - std::pow(eps[ne - 2], order));
                    if (std::abs(pred - d0) > 0.5 * std::abs(d0) + flag_tol * entry_scale)
                        ++flagged;
                }
            } else {
                // no clean power law; keep the last value and flag if the
                // wobble is significant on the entry scale
                if (std::max(std::abs(d1), std::abs(d2)) > flag_tol * entry_scale) ++flagged;
                if (std::max(std::abs(d1), std::abs(d2)) > 1e-2 * (scale > 0 ? scale : 1.0))
                    ++gross;
            }
            R.Q(i, j) = value;
            R.Q(j, i) = value;
            R.detected_order(i, j) = order;
            R.detected_order(j, i) = order;
        }
    }
    if (gross > 0)
        throw NonconvergentEntry(std::to_string(gross) +
                                 " form entries show no eps convergence");
    if (!orders.empty()) {
        std::vector<double> o = orders;
        std::nth_element(o.begin(), o.begin() + long(o.size() / 2), o.end());
        R.median_order = o[o.size() / 2];
    }
    R.flagged = flagged;
    return R;
}

Eigen::MatrixXd mass_matrix(const NullCurveData& shifted_data, const GalerkinBasis& basis,
                            const QuadratureOptions& quad) {
    return assemble_forms(shifted_data, basis, quad).M;
}

SpectralReport morse_index(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& M, double tau) {
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + Q.cwiseAbs().maxCoeff()))
        throw EigenFailure("form matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw EigenFailure("mass matrix is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, M);
    if (es.info() != Eigen::Success) throw EigenFailure("generalized eigensolve failed");

    SpectralReport rep;
    rep.eigenvalues = es.eigenvalues();
    const double radius = rep.eigenvalues.cwiseAbs().maxCoeff();
    rep.tau = tau > 0 ? tau : 1e-4 * radius;

    auto inertia = [&](double band) {
        int nm = 0, nz = 0, np = 0;
        for (int i = 0; i < rep.eigenvalues.size(); ++i) {
            const double l = rep.eigenvalues(i);
            if (l < -band)
                ++nm;
            else if (l > band)
                ++np;
            else
                ++nz;
        }
        return std::array<int, 3>{nm, nz, np};
    };
    auto base = inertia(rep.tau);
    rep.n_minus = base[0];
    rep.n_zero = base[1];
    rep.n_plus = base[2];
    for (double f : {1.0 / std::sqrt(10.0), std::pow(10.0, -0.25), 1.0, std::pow(10.0, 0.25),
                     std::sqrt(10.0)}) {
        auto in = inertia(rep.tau * f);
        rep.tau_sweep.push_back({rep.tau * f, in[0]});
        if (in[0] != rep.n_minus) rep.stable = false;
    }
    rep.lowest_eigenvalue = rep.eigenvalues(0);
    rep.lowest_mode = es.eigenvectors().col(0);
    rep.basis_index.resize(size_t(Q.rows()));
    for (int i = 0; i < Q.rows(); ++i) rep.basis_index[size_t(i)] = i;
    if (!rep.stable) rep.warnings += "UNSTABLE: n_minus changes within the tau decade. ";
    return rep;
}

double sampled_symmetry_angle(const NullCurveData& data, int p, double tol) {
    SurfaceEvaluator ev(data);
    const cdouble omega = std::polar(1.0, 2.0 * kPi / double(p));
    auto grid = sample_grid(data, 40, 777);
    // ambient rotation angle about x3 from the first usable pair
    double angle = 0.0;
    bool have = false;
    double scale = 0.0;
    std::vector<std::pair<Vec3, Vec3>> pairs;
    for (const auto& pt : grid) {
        const cdouble z = pt.chart == 0 ? pt.zeta : 1.0 / pt.zeta;
        Vec3 a = value_of(ev.position_jet(ev.locate(z)));
        Vec3 b = value_of(ev.position_jet(ev.locate(omega * z)));
        pairs.push_back({a, b});
        scale = std::max(scale, a.norm());
        const cdouble pa(a.x(), a.y()), pb(b.x(), b.y());
        if (!have && std::abs(pa) > 0.1 * scale) {
            angle = std::arg(pb / pa);
            have = true;
        }
    }
    if (!have) throw SymmetryMismatch("could not determine the symmetry rotation angle");
    Eigen::Matrix3d R = rotation_z(angle).real();
    double worst = 0.0;
    for (const auto& [a, b] : pairs) worst = std::max(worst, (R * a - b).norm());
    if (worst > tol * (1.0 + scale))
        throw SymmetryMismatch("sampled symmetry residual " + std::to_string(worst));
    return angle;
}

SpectralReport equivariant_index(const NullCurveData& shifted_data, const AssembledForms& forms,
                                 const GalerkinBasis& basis, int p) {
    sampled_symmetry_angle(shifted_data, p);
    std::vector<int> idx = basis.invariant_subset(p);
    const int n = static_cast<int>(idx.size());
    Eigen::MatrixXd Q(n, n), M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Q(i, j) = forms.Q(idx[size_t(i)], idx[size_t(j)]);
            M(i, j) = forms.M(idx[size_t(i)], idx[size_t(j)]);
        }
    SpectralReport rep = morse_index(Q, M);
    rep.restricted = true;
    rep.basis_index = idx;
    return rep;
}

EqualEndsResult second_variation_equal_ends(const NullCurveData& shifted_data,
                                            const ScalarField& v, double v0,
                                            const QuadratureOptions& quad) {
    SurfaceEvaluator ev(shifted_data);
    // check the equal-end-value precondition
    for (const auto& e : ev.end_charts()) {
        const double val = v(ev, ev.locate(e.location)).v.real();
        if (std::abs(val - v0) > 1e-8 * (1.0 + std::abs(v0)))
            throw UnequalEndValues("field does not take the common value at every end");
    }
    QuadratureScheme scheme = build_quadrature(ev, quad);
    const int m = static_cast<int>(scheme.ends.size());

    // route (a): eps-free regularized integrand over the whole sphere
    auto reg_integrand = [&](const ChartPoint& p) {
        GeomState st = ev.state(p);
        Jet vj = v(ev, p);
        Jet w_shift = st.absX2 * (vj - Jet::constant(v0));
        const double E = st.E.v.real();
        const double T =
            w_shift.laplacian_flat() / E - 2.0 * st.K * st.absX2.v.real() * vj.v.real();
        const double extra = -16.0 * v0 * st.K * st.absX2.v.real() * vj.v.real();
        return 0.5 * (T * T + extra) * E;
    };
    EqualEndsResult res;
    res.value = integrate(scheme, reg_integrand, -1);

    // route (b): eps-corrected path, extrapolated
    auto lsq = [&](const ChartPoint& p) {
        GeomState st = ev.state(p);
        Jet f = st.absX2 * v(ev, p);
        const double E = st.E.v.real();
        const double L = f.laplacian_flat() / E - 2.0 * st.K * f.v.real();
        return 0.5 * L * L * E;
    };
    std::vector<double> vals;
    for (size_t j = 0; j < quad.eps.size(); ++j) {
        const double correction = 8.0 * kPi * double(m) * v0 * v0 / (quad.eps[j] * quad.eps[j]);
        vals.push_back(integrate(scheme, lsq, int(j)) - correction);
    }
    // geometric-tail extrapolation on the last three
    const size_t ne = vals.size();
    double value = vals.back();
    if (ne >= 3) {
        const double d1 = vals[ne - 2] - vals[ne - 3], d2 = vals[ne - 1] - vals[ne - 2];
        if (std::abs(d2) > 0 && std::abs(d1) > std::abs(d2) && d1 * d2 > 0) {
            const double ratio = d2 / d1;
            value = vals.back() + d2 * ratio / (1.0 - ratio);
        }
    }
    res.eps_path_value = value;
    res.eps_path_spread = std::abs(vals.back() - value);
    return res;
}

SignChangeReport sign_change_check(const NullCurveData& shifted_data, const AssembledForms& forms,
                                   const GalerkinBasis& basis, const SpectralReport& report) {
    if (report.lowest_eigenvalue >= 0)
        throw Error("sign-change check expects a negative lowest eigenvalue");
    const double gap = report.eigenvalues.size() > 1
                           ? report.eigenvalues(1) - report.eigenvalues(0)
                           : 1.0;
    if (gap <= 0) throw Error("lowest eigenvalue is not simple");

    SurfaceEvaluator ev(shifted_data);
    const auto& ecs = ev.end_charts();
    const int m = static_cast<int>(ecs.size());

    // raw end values of the mode (basis may be a restriction)
    std::vector<double> raw(size_t(m), 0.0);
    for (int i = 0; i < m; ++i)
        for (int c = 0; c < report.lowest_mode.size(); ++c)
            raw[size_t(i)] +=
                report.lowest_mode(c) * forms.end_values(report.basis_index[size_t(c)], i);

    // solve v(p_i) - alpha . nu_i = c for (alpha, c): the translation fields
    // nPsi^k take the values nu_i at the ends
    Eigen::MatrixXd A(m, 4);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
        A(i, 0) = ecs[size_t(i)].normal(0);
        A(i, 1) = ecs[size_t(i)].normal(1);
        A(i, 2) = ecs[size_t(i)].normal(2);
        A(i, 3) = 1.0;
        rhs(i) = raw[size_t(i)];
    }
    Eigen::Vector4d sol = A.colPivHouseholderQr().solve(rhs);
    double fit = (A * sol - rhs).cwiseAbs().maxCoeff();
    double vmax = 0.0;
    for (double r : raw) vmax = std::max(vmax, std::abs(r));
    if (fit > 1e-8 * (1.0 + vmax))
        throw EndValueDegenerate("end values cannot be equalized by kernel fields");
    double sign = 1.0;
    if (std::abs(sol(3)) < 1e-10 * (1.0 + vmax))
        throw EndValueDegenerate("equalized end value vanishes");
    if (sol(3) < 0) sign = -1.0;

    SignChangeReport out;
    out.raw_end_values = raw;
    out.kernel_coefficients = sign * Vec3(sol(0), sol(1), sol(2));
    out.equalized_value = sign * sol(3);
    for (int i = 0; i < m; ++i)
        out.adjusted_end_values.push_back(
            sign * (raw[size_t(i)] - Vec3(sol(0), sol(1), sol(2)).dot(ecs[size_t(i)].normal)));

    // dense sampling of the adjusted mode
    auto grid = sample_grid(shifted_data, 4000, 20202);
    std::vector<Jet> jets;
    double mn = 1e300, mx = -1e300;
    for (const auto& p : grid) {
        GeomState st = ev.state(p);
        basis.eval_jets(ev, p, jets);
        double val = 0.0;
        for (int c = 0; c < report.lowest_mode.size(); ++c) {
            const int bi = report.basis_index[size_t(c)];
            if (bi < forms.basis_size) val += report.lowest_mode(c) * jets[size_t(bi)].v.real();
        }
        val *= sign;
        for (int k = 0; k < 3; ++k)
            val -= out.kernel_coefficients(k) * st.nPsi[size_t(k)].v.real();
        mn = std::min(mn, val);
        mx = std::max(mx, val);
    }
    out.min_value = mn;
    out.max_value = mx;
    out.changes_sign = (mn < 0.0 && mx > 0.0);
    return out;
}

IndexPipelineResult run_index_pipeline(const NullCurveData& data, int L,
                                       const QuadratureOptions& quad) {
    IndexPipelineResult r;
    r.shifted = ensure_origin_off_surface(data);
    GalerkinBasis basis(L);
    r.forms = assemble_forms(r.shifted, basis, quad);
    const int nb = r.forms.basis_size;
    r.full = morse_index(r.forms.Q.topLeftCorner(nb, nb), r.forms.M.topLeftCorner(nb, nb));
    r.full.detected_order = r.forms.median_order;
    return r;
}

} // namespace willab
