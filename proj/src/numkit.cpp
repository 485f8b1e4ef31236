#include "phasetop/numkit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "phasetop/errors.hpp"

namespace phasetop {

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double unitarity_residual(const CMatrix& u) {
  return max_abs(u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols()));
}

double isometry_residual(const CMatrix& u) { return unitarity_residual(u); }

EigenSystem eigh(const CMatrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw DomainError("eigh: matrix must be square and nonempty");
  }
  const double asym = max_abs(h - h.adjoint());
  if (asym > 1e-10) {
    std::ostringstream msg;
    msg << "eigh: matrix is not Hermitian (||H - H^dagger||_max = " << asym << ")";
    throw DomainError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigh: eigensolver did not converge");
  }
  EigenSystem out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.vectors.rows(); ++r) {
      const cplx z = out.vectors(r, c);
      if (std::abs(z) > 1e-8) {
        out.vectors.col(c) *= std::conj(z) / std::abs(z);
        break;
      }
    }
  }
  return out;
}

CMatrix polar_unitary(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DomainError("polar_unitary: matrix must be square");
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-10) {
    std::ostringstream msg;
    msg << "polar_unitary: smallest singular value "
        << (sv.size() ? sv(sv.size() - 1) : 0.0) << " too small";
    throw SingularityError(msg.str());
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

cplx pfaffian(const CMatrix& s) {
  const Eigen::Index n = s.rows();
  if (s.cols() != n) throw DomainError("pfaffian: matrix must be square");
  if (n % 2 != 0) throw DomainError("pfaffian: dimension must be even");
  const double skew = max_abs(s + s.transpose());
  if (skew > 1e-9) {
    std::ostringstream msg;
    msg << "pfaffian: matrix is not skew-symmetric (||S + S^t||_max = " << skew << ")";
    throw DomainError(msg.str());
  }
  if (n == 0) return 1.0;

  CMatrix a = s;
  cplx pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    // pivot: largest entry in column k below the diagonal
    Eigen::Index pivot = k + 1;
    double best = std::abs(a(k + 1, k));
    for (Eigen::Index r = k + 2; r < n; ++r) {
      if (std::abs(a(r, k)) > best) {
        best = std::abs(a(r, k));
        pivot = r;
      }
    }
    if (pivot != k + 1) {
      a.row(k + 1).swap(a.row(pivot));
      a.col(k + 1).swap(a.col(pivot));
      pf = -pf;
    }
    if (a(k + 1, k) == cplx(0.0)) return 0.0;
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const Eigen::Index m = n - k - 2;
      const CVector tau = a.row(k).segment(k + 2, m).transpose() / a(k, k + 1);
      const CVector col = a.col(k + 1).segment(k + 2, m);
      a.block(k + 2, k + 2, m, m) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

PhaseLoop::PhaseLoop(std::vector<cplx> samples, double floor) : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw NumericalError("PhaseLoop: need at least two samples");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!(std::abs(samples_[i]) > floor)) {
      std::ostringstream msg;
      msg << "PhaseLoop: sample " << i << " has modulus " << std::abs(samples_[i])
          << " below floor " << floor;
      throw NumericalError(msg.str());
    }
  }
}

double phase_step(cplx a, cplx b) { return std::arg(b * std::conj(a)); }

int winding_number(const PhaseLoop& loop) {
  const auto& z = loop.samples();
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double step = phase_step(z[i], z[(i + 1) % z.size()]);
    if (std::abs(step) >= kPi / 2) {
      std::ostringstream msg;
      msg << "winding_number: phase step " << step << " at sample " << i
          << " of " << z.size() << "; refine sampling";
      throw ResolutionError(msg.str());
    }
    total += step;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

namespace {

struct UnitaryDiag {
  CMatrix basis;
  RVector phases;
};

UnitaryDiag diagonalise_unitary(const CMatrix& u) {
  Eigen::ComplexSchur<CMatrix> schur(u);
  if (schur.info() != Eigen::Success) throw NumericalError("unitary_log: Schur form failed");
  const CMatrix& t = schur.matrixT();
  UnitaryDiag out{schur.matrixU(), RVector(u.rows())};
  for (Eigen::Index i = 0; i < u.rows(); ++i) out.phases(i) = std::arg(t(i, i));
  return out;
}

}  // namespace

RVector unitary_phases(const CMatrix& u) { return diagonalise_unitary(u).phases; }

CMatrix unitary_log(const CMatrix& u) {
  const UnitaryDiag d = diagonalise_unitary(u);
  CMatrix h = d.basis * d.phases.cast<cplx>().asDiagonal() * d.basis.adjoint();
  return 0.5 * (h + h.adjoint());
}

CMatrix hermitian_exp_i(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (h + h.adjoint()));
  CVector phase(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    phase(i) = std::polar(1.0, t * solver.eigenvalues()(i));
  }
  return solver.eigenvectors() * phase.asDiagonal() * solver.eigenvectors().adjoint();
}

double unitary_angle(const CMatrix& a, const CMatrix& b) {
  return unitary_phases(a.adjoint() * b).cwiseAbs().maxCoeff();
}

}  // namespace phasetop
