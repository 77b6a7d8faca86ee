#include "willab/so3c.hpp"

#include <cmath>

namespace willab {

CMat3 matrix_exp(const CMat3& A) {
    const double nrm = A.cwiseAbs().maxCoeff();
    int squarings = 0;
    CMat3 B = A;
    while (B.cwiseAbs().maxCoeff() > 0.25 && squarings < 40) {
        B *= 0.5;
        ++squarings;
    }
    (void)nrm;
    CMat3 term = CMat3::Identity();
    CMat3 sum = CMat3::Identity();
    for (int k = 1; k <= 24; ++k) {
        term = (term * B) / double(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

CMat3 random_so3c(std::mt19937_64& rng, double modulus_bound) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&]() {
        // uniform in the closed disk of radius modulus_bound
        const double r = modulus_bound * std::sqrt(unit(rng));
        const double t = 2.0 * M_PI * unit(rng);
        return cdouble(r * std::cos(t), r * std::sin(t));
    };
    CMat3 A = CMat3::Zero();
    A(0, 1) = draw();
    A(0, 2) = draw();
    A(1, 2) = draw();
    A(1, 0) = -A(0, 1);
    A(2, 0) = -A(0, 2);
    A(2, 1) = -A(1, 2);
    return matrix_exp(A);
}

CMat3 rotation_z(double angle) {
    CMat3 R = CMat3::Identity();
    R(0, 0) = std::cos(angle);
    R(0, 1) = -std::sin(angle);
    R(1, 0) = std::sin(angle);
    R(1, 1) = std::cos(angle);
    return R;
}

CMat3 rotation_between(const Vec3& from, const Vec3& to) {
    Eigen::Vector3d f = from.normalized(), t = to.normalized();
    Eigen::Vector3d v = f.cross(t);
    const double c = f.dot(t);
    Eigen::Matrix3d R;
    if (v.norm() < 1e-14) {
        if (c > 0) R = Eigen::Matrix3d::Identity();
        else {
            // pick any axis orthogonal to f
            Eigen::Vector3d a = std::abs(f.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                      : Eigen::Vector3d::UnitY();
            Eigen::Vector3d axis = f.cross(a).normalized();
            R = Eigen::AngleAxisd(M_PI, axis).toRotationMatrix();
        }
    } else {
        R = Eigen::AngleAxisd(std::atan2(v.norm(), c), v.normalized()).toRotationMatrix();
    }
    return R.cast<cdouble>();
}

} // namespace willab
