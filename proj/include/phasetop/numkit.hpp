#pragma once

// Dense complex linear algebra used throughout: Hermitian eigensolver with a
// reproducible phase convention, polar retraction onto the unitary group,
// Pfaffians, unitary log/exp, and loop winding numbers.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace phasetop {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct EigenSystem {
  RVector values;   // ascending
  CMatrix vectors;  // columns, first significant component real positive
};

/// Hermitian eigendecomposition. Eigenvalues ascending; each eigenvector is
/// rotated so its first component with modulus above 1e-8 is real positive.
/// Throws DomainError when ||H - H^dagger||_max > 1e-10.
EigenSystem eigh(const CMatrix& h);

/// Unitary factor U of the polar decomposition A = U P.
/// Throws SingularityError when the smallest singular value is <= 1e-10.
CMatrix polar_unitary(const CMatrix& a);

/// Pfaffian of an even-dimensional skew-symmetric matrix, by skew-symmetric
/// Gaussian elimination with partial pivoting.
/// Throws DomainError for odd dimension or ||S + S^t||_max > 1e-9.
cplx pfaffian(const CMatrix& s);

/// Samples of a nonvanishing complex function on a closed loop; sample i sits
/// at angle 2*pi*i/L and the last sample wraps to the first.
class PhaseLoop {
 public:
  static constexpr double kDefaultFloor = 1e-10;

  /// Throws NumericalError when a sample modulus is at or below `floor` or
  /// the loop has fewer than two samples.
  explicit PhaseLoop(std::vector<cplx> samples, double floor = kDefaultFloor);

  const std::vector<cplx>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

 private:
  std::vector<cplx> samples_;
};

/// Degree of the loop: (1/2pi) * sum of principal-value phase increments.
/// Throws ResolutionError when any increment has magnitude >= pi/2.
int winding_number(const PhaseLoop& loop);

/// Principal phase increment arg(b / a) in (-pi, pi].
double phase_step(cplx a, cplx b);

/// Hermitian H with U = exp(iH), eigenphases in (-pi, pi]. U must be unitary
/// (normal); it is diagonalised through a complex Schur form.
CMatrix unitary_log(const CMatrix& u);

/// Eigenphases of a unitary, each in (-pi, pi].
RVector unitary_phases(const CMatrix& u);

/// exp(i t H) for Hermitian H.
CMatrix hermitian_exp_i(const CMatrix& h, double t = 1.0);

/// Largest |eigenphase| of a^dagger b: geodesic distance between unitaries.
double unitary_angle(const CMatrix& a, const CMatrix& b);

double max_abs(const CMatrix& m);
double unitarity_residual(const CMatrix& u);  // ||U^dagger U - I||_max

/// Orthonormality defect of the columns of a tall matrix.
double isometry_residual(const CMatrix& u);

}  // namespace phasetop
