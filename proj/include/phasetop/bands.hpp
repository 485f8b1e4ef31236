#pragma once

// Fermionic time reversal, TRI Hamiltonian fields, spectra, gapped band
// groups, smooth frames over fundamental domains and transition matrices.

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "phasetop/numkit.hpp"
#include "phasetop/phasespace.hpp"

namespace phasetop {

/// T x = J conj(x) with J unitary and J conj(J) = -I (T^2 = -1).
class AntiUnitary {
 public:
  /// Throws DomainError when J is not unitary to 1e-12, T^2 != -1 to 1e-12,
  /// or the dimension is odd.
  explicit AntiUnitary(CMatrix j);

  const CMatrix& matrix() const { return j_; }
  int dim() const { return static_cast<int>(j_.rows()); }

  /// T applied to each column.
  CMatrix apply(const CMatrix& x) const { return j_ * x.conjugate(); }

  /// T H T^{-1} = J conj(H) J^dagger.
  CMatrix conjugate_operator(const CMatrix& h) const { return j_ * h.conjugate() * j_.adjoint(); }

  /// ||J conj(J) + I||_max
  double fermionic_residual() const;

  /// i sigma_y on C^2.
  static AntiUnitary spin_half();

 private:
  CMatrix j_;
};

using FieldEvaluator = std::function<CMatrix(const PhasePoint&)>;

struct HamiltonianField {
  int dim = 0;
  Manifold manifold = Manifold::Sphere;
  AntiUnitary tr = AntiUnitary::spin_half();
  FieldEvaluator evaluate;
};

struct TriCheck {
  double max_residual = 0.0;
  bool pass = false;
};

/// max over vertices of ||J conj(H(tau x)) J^dagger - H(x)||_max.
/// Throws DomainError when the field and T disagree on dimension.
TriCheck check_tri(const HamiltonianField& h, const Grid& grid, double tol = 1e-9);

/// H(x) = (B(x) + J conj(B(tau x)) J^dagger) / 2.
HamiltonianField symmetrize_tri(FieldEvaluator b, int dim, Manifold manifold, const AntiUnitary& tr);

struct Spectrum {
  std::vector<EigenSystem> vertices;  // indexed by grid vertex
  int dim() const { return vertices.empty() ? 0 : static_cast<int>(vertices.front().values.size()); }
};

Spectrum spectrum_on_grid(const HamiltonianField& h, const Grid& grid);

/// Contiguous eigenvalue index range [first, last] (0-based, inclusive).
struct BandGroup {
  int first = 0;
  int last = 0;
  /// Smallest separation from the complementary bands over the grid;
  /// infinite when the group holds every band.
  double min_gap = std::numeric_limits<double>::infinity();

  int rank() const { return last - first + 1; }
};

/// Group [first, last] with its min_gap measured on the spectrum.
/// Throws DomainError for an invalid range.
BandGroup band_group(const Spectrum& spectrum, int first, int last);

/// Gap between bands k and k+1, minimised over all vertices.
double min_gap_above(const Spectrum& spectrum, int k);

/// Maximal gapped decomposition. Empty when no internal gap exceeds
/// gap_floor; otherwise the groups partition all bands.
std::vector<BandGroup> find_gapped_groups(const Spectrum& spectrum, double gap_floor = 1e-6);

/// Orthonormal eigenbasis of the group at a vertex (columns first..last).
CMatrix group_basis(const Spectrum& spectrum, const BandGroup& group, int vertex);

struct Frame {
  int rank = 0;
  std::vector<CMatrix> u;  // per vertex; empty outside the fundamental domain
  double orthonormality_residual = 0.0;  // max ||u^dagger u - I||
  double span_residual = 0.0;            // max ||(I - P) u||
  double continuity_constant = 0.0;      // max ||u(x) - u(y)||_F / dist(x, y) over domain edges
  /// Largest seam mismatch of the q-periodic twist (torus only).
  double seam_residual = 0.0;
};

/// Smooth frame on the fundamental domain by parallel transport with polar
/// orthonormalisation. Sphere: seeded at the north pole, transported down
/// every meridian to the equator. Torus: transported along p = 0 in q, the
/// seam holonomy distributed as exp(-q log(V)/2pi), then transported up
/// every q-line to p = pi.
/// Throws ResolutionError when the projected frame becomes rank deficient.
Frame smooth_frame(const Spectrum& spectrum, const BandGroup& group, const Grid& grid);

struct TransitionLoop {
  std::vector<CMatrix> samples;

  std::size_t size() const { return samples.size(); }
  int rank() const { return samples.empty() ? 0 : static_cast<int>(samples.front().rows()); }
  double unitarity_residual() const;
  /// max_j ||U(phi_j + pi)^t + U(phi_j)||_max (sphere property).
  double antisymmetry_residual() const;
  /// max_j ||U_j + U_j^t||_max (torus property).
  double skew_residual() const;
  /// det U sampled around the loop.
  std::vector<cplx> determinants() const;
};

/// U(phi)^t = u(pi/2, phi)^dagger T u(pi/2, phi + pi) on the equator.
/// Throws NumericalError when unitarity fails beyond 1e-9.
TransitionLoop transition_loop_sphere(const Frame& frame, const Grid& grid, const AntiUnitary& tr);

/// T u(q, 0) = u(q, 0) U+(q)^t and T u(q, pi) = u(q, pi) U-(q)^t.
std::pair<TransitionLoop, TransitionLoop> transition_loops_torus(const Frame& frame,
                                                                 const Grid& grid,
                                                                 const AntiUnitary& tr);

/// max |lambda_{2i} - lambda_{2i+1}| over vertices on p = 0 and p = pi.
/// Throws DomainError for a sphere grid.
double kramers_check(const Spectrum& spectrum, const Grid& grid);

}  // namespace phasetop
