// Copyright 2025 The gwstats Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gwstats {

using cplx = std::complex<double>;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

namespace detail {

inline double max_asymmetry(const RMat& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

inline double scale_of(const RMat& m) {
    return std::max(1.0, m.cwiseAbs().maxCoeff());
}

// standard symplectic form, blocks [[0,1],[-1,0]] per mode
inline RMat omega(int n_modes) {
    RMat om = RMat::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        om(2 * k, 2 * k + 1) = 1.0;
        om(2 * k + 1, 2 * k) = -1.0;
    }
    return om;
}

// block-diagonal quadrature -> ladder transform, rows (a_k, a_k^dagger)
inline CMat ladder_transform(int n_modes) {
    const double h = 1.0 / std::sqrt(2.0);
    CMat m = CMat::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        m(2 * k, 2 * k) = h;
        m(2 * k, 2 * k + 1) = cplx(0.0, h);
        m(2 * k + 1, 2 * k) = h;
        m(2 * k + 1, 2 * k + 1) = cplx(0.0, -h);
    }
    return m;
}

}  // namespace detail

// (alpha, xi = r e^{i theta}, nbar) of a displaced squeezed thermal mode.
struct GwSignalParams {
    cplx alpha{0.0, 0.0};
    double r = 0.0;
    double theta = 0.0;
    double nbar = 0.0;

    // non-coherent part (nbar + 1/2) cosh 2r - 1/2, written without cancellation
    double n_q() const {
        const double sr = std::sinh(r);
        return nbar * std::cosh(2.0 * r) + sr * sr;
    }
    double mean_occupation() const { return std::norm(alpha) + n_q(); }
};

// N-mode Gaussian state. The covariance is held as its excess over the vacuum,
// cov = I/2 + excess, so states that are close to vacuum keep relative precision.
class GaussianState {
public:
    GaussianState() : GaussianState(RMat::Zero(2, 2), RVec::Zero(2)) {}

    static GaussianState from_cov(const RMat& cov, const RVec& disp) {
        check_shapes(cov, disp);
        return GaussianState(cov - 0.5 * RMat::Identity(cov.rows(), cov.cols()), disp);
    }

    static GaussianState from_excess(const RMat& excess, const RVec& disp) {
        check_shapes(excess, disp);
        return GaussianState(excess, disp);
    }

    int num_modes() const { return static_cast<int>(disp_.size() / 2); }
    RMat cov() const { return excess_ + 0.5 * RMat::Identity(excess_.rows(), excess_.cols()); }
    const RMat& excess() const { return excess_; }
    const RVec& disp() const { return disp_; }

    // <a_k^dagger a_k>
    double mean_occupation(int mode) const {
        const int i = 2 * mode;
        return 0.5 * (excess_(i, i) + excess_(i + 1, i + 1)) +
               0.5 * (disp_(i) * disp_(i) + disp_(i + 1) * disp_(i + 1));
    }

    bool is_vacuum(double tol = 0.0) const {
        return excess_.cwiseAbs().maxCoeff() <= tol && disp_.cwiseAbs().maxCoeff() <= tol;
    }

private:
    GaussianState(RMat excess, RVec disp) : excess_(std::move(excess)), disp_(std::move(disp)) {
        if (detail::max_asymmetry(excess_) > 1e-12 * detail::scale_of(excess_)) {
            throw std::invalid_argument("GaussianState: covariance matrix is not symmetric");
        }
        excess_ = 0.5 * (excess_ + excess_.transpose()).eval();
    }

    static void check_shapes(const RMat& m, const RVec& d) {
        if (m.rows() == 0 || m.rows() % 2 != 0 || m.rows() != m.cols() || d.size() != m.rows()) {
            throw std::invalid_argument("GaussianState: expected 2N x 2N covariance and 2N displacement");
        }
    }

    RMat excess_;
    RVec disp_;
};

// Ladder-basis moments, ordering (a_1, a_1^dagger, ...). Sigma = M sigma M^dagger.
// Stored as sigma_normal = Sigma - I/2, whose (a, a^dagger) entry is <da^dagger da>.
struct LadderMoments {
    CMat sigma_normal;
    CVec abar;

    int num_modes() const { return static_cast<int>(abar.size() / 2); }
    CMat Sigma() const { return sigma_normal + 0.5 * CMat::Identity(abar.size(), abar.size()); }
    // s-ordered covariance Sigma - (s/2) I
    CMat Sigma_s(double s) const {
        return sigma_normal + 0.5 * (1.0 - s) * CMat::Identity(abar.size(), abar.size());
    }
    CMat SigmaQ() const { return sigma_normal + CMat::Identity(abar.size(), abar.size()); }
    cplx alpha(int mode = 0) const { return abar(2 * mode); }
    // <da^dagger da> and <da da>
    double C(int mode = 0) const { return sigma_normal(2 * mode, 2 * mode).real(); }
    cplx M(int mode = 0) const { return sigma_normal(2 * mode, 2 * mode + 1); }
};

class SymplecticMap {
public:
    explicit SymplecticMap(RMat matrix) : SymplecticMap(std::move(matrix), RVec()) {}

    SymplecticMap(RMat matrix, RVec displacement) : matrix_(std::move(matrix)) {
        const auto n = matrix_.rows();
        if (n == 0 || n % 2 != 0 || matrix_.cols() != n) {
            throw std::invalid_argument("SymplecticMap: expected a 2N x 2N matrix");
        }
        displacement_ = displacement.size() == 0 ? RVec::Zero(n) : std::move(displacement);
        if (displacement_.size() != n) {
            throw std::invalid_argument("SymplecticMap: displacement size mismatch");
        }
        const RMat om = detail::omega(static_cast<int>(n / 2));
        const double err = (matrix_ * om * matrix_.transpose() - om).cwiseAbs().maxCoeff();
        if (!(err < 1e-11)) {
            throw std::invalid_argument("SymplecticMap: matrix is not symplectic (err=" +
                                        std::to_string(err) + ")");
        }
        const RMat id = RMat::Identity(n, n);
        passive_ = (matrix_ * matrix_.transpose() - id).cwiseAbs().maxCoeff() < 1e-13;
    }

    static SymplecticMap identity(int n_modes) {
        return SymplecticMap(RMat::Identity(2 * n_modes, 2 * n_modes));
    }

    const RMat& matrix() const { return matrix_; }
    const RVec& displacement() const { return displacement_; }
    int num_modes() const { return static_cast<int>(matrix_.rows() / 2); }
    // orthogonal as well as symplectic: leaves the vacuum invariant
    bool passive() const { return passive_; }

    double symplectic_error() const {
        const RMat om = detail::omega(num_modes());
        return (matrix_ * om * matrix_.transpose() - om).cwiseAbs().maxCoeff();
    }

private:
    RMat matrix_;
    RVec displacement_;
    bool passive_ = false;
};

struct PhysicalityReport {
    std::vector<double> symplectic_eigenvalues;
    double min_eigenvalue = 0.0;
    bool physical = false;
};

inline GaussianState make_vacuum(int n_modes) {
    if (n_modes < 1) throw std::invalid_argument("make_vacuum: n_modes must be >= 1");
    return GaussianState::from_excess(RMat::Zero(2 * n_modes, 2 * n_modes), RVec::Zero(2 * n_modes));
}

inline void validate(const GwSignalParams& p) {
    if (!(p.r >= 0.0) || !std::isfinite(p.r)) throw std::invalid_argument("GwSignalParams: r must be >= 0");
    if (!(p.nbar >= 0.0) || !std::isfinite(p.nbar)) throw std::invalid_argument("GwSignalParams: nbar must be >= 0");
    if (!std::isfinite(p.theta) || !std::isfinite(p.alpha.real()) || !std::isfinite(p.alpha.imag())) {
        throw std::invalid_argument("GwSignalParams: non-finite parameter");
    }
}

// cov = (nbar + 1/2) F F^T with F = cosh r I - sinh r R_theta
inline GaussianState make_gw_state(const GwSignalParams& p) {
    validate(p);
    const double sr = std::sinh(p.r);
    const double cr = std::cosh(p.r);
    const double em2r = std::exp(-2.0 * p.r);
    const double sh = std::sinh(2.0 * p.r);
    const double sn = std::sin(0.5 * p.theta);
    const double cs = std::cos(0.5 * p.theta);
    const double N = p.nbar + 0.5;
    RMat e(2, 2);
    e(0, 0) = p.nbar * (em2r + 2.0 * sh * sn * sn) + sr * (2.0 * cr * sn * sn - std::exp(-p.r));
    e(1, 1) = p.nbar * (em2r + 2.0 * sh * cs * cs) + sr * (2.0 * cr * cs * cs - std::exp(-p.r));
    e(0, 1) = e(1, 0) = -N * sh * std::sin(p.theta);
    RVec d(2);
    d << std::sqrt(2.0) * p.alpha.real(), std::sqrt(2.0) * p.alpha.imag();
    return GaussianState::from_excess(e, d);
}

inline LadderMoments to_ladder(const GaussianState& s) {
    const CMat m = detail::ladder_transform(s.num_modes());
    LadderMoments out;
    out.sigma_normal = m * s.excess().cast<cplx>() * m.adjoint();
    out.abar = m * s.disp().cast<cplx>();
    return out;
}

inline GaussianState from_ladder(const LadderMoments& lm) {
    const CMat m = detail::ladder_transform(lm.num_modes());
    const CMat e = m.adjoint() * lm.sigma_normal * m;
    const CVec d = m.adjoint() * lm.abar;
    return GaussianState::from_excess(e.real(), d.real());
}

inline GaussianState apply_symplectic(const GaussianState& s, const SymplecticMap& map) {
    if (map.num_modes() != s.num_modes()) {
        throw std::invalid_argument("apply_symplectic: dimension mismatch");
    }
    const RMat& S = map.matrix();
    RMat e = S * s.excess() * S.transpose();
    if (!map.passive()) {
        e += 0.5 * (S * S.transpose() - RMat::Identity(S.rows(), S.cols()));
    }
    e = 0.5 * (e + e.transpose()).eval();
    return GaussianState::from_excess(e, S * s.disp() + map.displacement());
}

inline GaussianState reduce(const GaussianState& s, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("reduce: empty mode list");
    const int n = static_cast<int>(keep.size());
    RMat e(2 * n, 2 * n);
    RVec d(2 * n);
    for (int i = 0; i < n; ++i) {
        if (keep[i] < 0 || keep[i] >= s.num_modes()) throw std::out_of_range("reduce: mode index out of range");
        for (int j = 0; j < n; ++j) {
            e.block<2, 2>(2 * i, 2 * j) = s.excess().block<2, 2>(2 * keep[i], 2 * keep[j]);
        }
        d.segment<2>(2 * i) = s.disp().segment<2>(2 * keep[i]);
    }
    return GaussianState::from_excess(e, d);
}

inline GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    const auto na = a.excess().rows();
    const auto nb = b.excess().rows();
    RMat e = RMat::Zero(na + nb, na + nb);
    e.topLeftCorner(na, na) = a.excess();
    e.bottomRightCorner(nb, nb) = b.excess();
    RVec d(na + nb);
    d << a.disp(), b.disp();
    return GaussianState::from_excess(e, d);
}

// Symplectic spectrum. One and two modes use determinant invariants, which stay
// accurate for strongly squeezed pure states; larger systems use |eig(i Omega cov)|.
inline std::vector<double> symplectic_eigenvalues(const GaussianState& s) {
    const RMat cov = s.cov();
    const int n = s.num_modes();
    std::vector<double> nu;
    if (n == 1) {
        const double det = 0.25 + 0.5 * (s.excess()(0, 0) + s.excess()(1, 1)) + s.excess()(0, 0) * s.excess()(1, 1) -
                           s.excess()(0, 1) * s.excess()(1, 0);
        nu.push_back(std::sqrt(std::max(det, 0.0)));
    } else if (n == 2) {
        const double da = cov.block<2, 2>(0, 0).determinant();
        const double db = cov.block<2, 2>(2, 2).determinant();
        const double dc = cov.block<2, 2>(0, 2).determinant();
        const double delta = da + db + 2.0 * dc;
        const double det = cov.determinant();
        const double disc = std::sqrt(std::max(delta * delta - 4.0 * det, 0.0));
        const double hi = 0.5 * (delta + disc);
        const double lo = hi > 0.0 ? det / hi : 0.5 * (delta - disc);
        nu.push_back(std::sqrt(std::max(lo, 0.0)));
        nu.push_back(std::sqrt(std::max(hi, 0.0)));
    } else {
        const CMat a = cplx(0.0, 1.0) * detail::omega(n).cast<cplx>() * cov.cast<cplx>();
        Eigen::ComplexEigenSolver<CMat> es(a);
        std::vector<double> all;
        for (int i = 0; i < a.rows(); ++i) all.push_back(std::abs(es.eigenvalues()(i)));
        std::sort(all.begin(), all.end());
        for (int i = 0; i < n; ++i) nu.push_back(0.5 * (all[2 * i] + all[2 * i + 1]));
    }
    std::sort(nu.begin(), nu.end());
    return nu;
}

inline PhysicalityReport check_physical(const GaussianState& s, double tol = 1e-10) {
    PhysicalityReport rep;
    rep.symplectic_eigenvalues = symplectic_eigenvalues(s);
    rep.min_eigenvalue = *std::min_element(rep.symplectic_eigenvalues.begin(), rep.symplectic_eigenvalues.end());
    rep.physical = rep.min_eigenvalue >= 0.5 - tol;
    // a symmetric matrix with a negative eigenvalue can still have positive symplectic
    // invariants; positivity of cov is required as well
    if (rep.physical) {
        Eigen::SelfAdjointEigenSolver<RMat> es(s.cov(), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 0.0) rep.physical = false;
    }
    return rep;
}

}  // namespace gwstats
