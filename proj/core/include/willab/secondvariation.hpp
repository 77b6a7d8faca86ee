#pragma once

#include "willab/harmonics.hpp"
#include "willab/quadrature.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace willab {

// Discretized second variation of the Willmore energy at the inverted
// surface: Q_eps(u,v) = 1/2 Int_{Sigma_eps} L(|X|^2 u) L(|X|^2 v) dmu
//                       - (8 pi / eps^2) sum_i u(p_i) v(p_i),
// over a Galerkin basis of spherical harmonics plus the three injected
// normal-translation fields nPsi^k (diagnostic columns).
struct AssembledForms {
    int basis_size = 0;  // harmonics only
    int total = 0;       // harmonics + 3 injected fields
    std::vector<double> eps;
    std::vector<Eigen::MatrixXd> Q_eps; // total x total, one per eps
    Eigen::MatrixXd M;                  // mass form in the inverted metric
    Eigen::MatrixXd end_values;         // total x m
    Eigen::MatrixXd Q;                  // eps -> 0 extrapolation
    Eigen::MatrixXd detected_order;     // per entry; 0 where not estimable
    double median_order = 0.0;
    int flagged_entries = 0;
    double form_scale = 0.0;            // max |Q diagonal| over harmonics
    int end_count = 0;
};

struct SpectralReport {
    Eigen::VectorXd eigenvalues;
    int n_minus = 0, n_zero = 0, n_plus = 0;
    double tau = 0.0;
    std::vector<std::pair<double, int>> tau_sweep;
    bool stable = true;
    double lowest_eigenvalue = 0.0;
    Eigen::VectorXd lowest_mode; // coefficients over the basis used
    std::vector<int> basis_index; // mapping into the assembled basis
    bool restricted = false;
    double detected_order = 0.0;
    double symmetric_fraction = -1.0; // M-norm fraction of the lowest mode
                                      // in the p-invariant subspace
    std::string warnings;
};

AssembledForms assemble_forms(const NullCurveData& shifted_data, const GalerkinBasis& basis,
                              const QuadratureOptions& quad);

// Single-eps assembly (slice of the above).
Eigen::MatrixXd assemble_form_eps(const NullCurveData& shifted_data, const GalerkinBasis& basis,
                                  double eps);

struct ExtrapolationResult {
    Eigen::MatrixXd Q;
    Eigen::MatrixXd detected_order;
    double median_order = 0.0;
    int flagged = 0;
};
// Entrywise fit Q_eps ~ Q + c eps^r with empirically detected order r.
ExtrapolationResult extrapolate_form(const std::vector<double>& eps,
                                     const std::vector<Eigen::MatrixXd>& Q_eps,
                                     double flag_tol = 1e-4);

Eigen::MatrixXd mass_matrix(const NullCurveData& shifted_data, const GalerkinBasis& basis,
                            const QuadratureOptions& quad);

// Generalized symmetric eigenproblem Q x = lambda M x with inertia counted
// in the zero band [-tau, tau]; tau <= 0 selects 1e-4 * spectral radius.
// The tau sweep covers one decade; a changing n_minus flags UNSTABLE.
SpectralReport morse_index(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& M, double tau = -1.0);

// Restricted to the p-fold rotationally invariant harmonic subspace.
// Verifies the sampled 2p-fold symmetry of the shifted surface first.
SpectralReport equivariant_index(const NullCurveData& shifted_data, const AssembledForms& forms,
                                 const GalerkinBasis& basis, int p);

// Checks the surface's p-fold rotational symmetry z -> e^{2 pi i/p} z by
// sampling; returns the ambient rotation angle about the axis.
double sampled_symmetry_angle(const NullCurveData& data, int p, double tol = 1e-8);

struct EqualEndsResult {
    double value = 0.0;        // eps-free regularized evaluation
    double eps_path_value = 0.0;
    double eps_path_spread = 0.0;
};
// Second variation on a smooth field with equal end values v0, evaluated
// both by the regularized whole-sphere integrand and by the eps-corrected
// path (cross-check).
EqualEndsResult second_variation_equal_ends(const NullCurveData& shifted_data,
                                            const ScalarField& v, double v0,
                                            const QuadratureOptions& quad);

struct SignChangeReport {
    std::vector<double> raw_end_values;
    std::vector<double> adjusted_end_values;
    double equalized_value = 0.0; // common positive end value of the mode
    double min_value = 0.0, max_value = 0.0;
    bool changes_sign = false;
    Vec3 kernel_coefficients = Vec3::Zero(); // multiples of nPsi^k subtracted
};
// Adjusts the lowest mode by translation-kernel fields to equal positive
// end values and verifies the sign change by dense sampling.
SignChangeReport sign_change_check(const NullCurveData& shifted_data, const AssembledForms& forms,
                                   const GalerkinBasis& basis, const SpectralReport& report);

// Convenience: full pipeline for a flower-family curve (shifts the origin
// off the surface internally). Returns the report at max degree L plus the
// assembled forms for reuse.
struct IndexPipelineResult {
    NullCurveData shifted;
    AssembledForms forms;
    SpectralReport full;
};
IndexPipelineResult run_index_pipeline(const NullCurveData& data, int L,
                                       const QuadratureOptions& quad = {});

} // namespace willab
