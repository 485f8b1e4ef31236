#pragma once

// Gauge constructions: normal-form transition loops, the equator gauge
// solver and its winding obstruction, extension of an equator gauge over the
// northern disk, and the skew congruence normal form on the torus TRI lines.

#include <vector>

#include "phasetop/bands.hpp"

namespace phasetop {

struct NormalFormSpec {
  int chern = 0;
  int rank = 1;
  int samples = 64;  // even
  std::vector<double> angles;  // sample angles; empty means 2 pi j / samples
};

/// V(phi) = diag(e^{i(c - N_B + 1) phi}, e^{i phi}, ..., e^{i phi}) at the
/// sample angles. Throws DomainError when c and N_B differ in parity, the
/// sample count is odd or the angles do not match the sample count.
TransitionLoop normal_form_loop(const NormalFormSpec& spec);

struct GaugeLoop {
  std::vector<CMatrix> samples;  // W(pi/2, phi_j)
  double residual_at_pi = 0.0;   // |W(pi + 0) - W(pi)|
  double residual_at_2pi = 0.0;  // |W(2 pi - 0) - W(0)|
  double relation_residual = 0.0;  // max_j ||W(phi_j + pi)^t U_j W_j - V_j||
  int waypoints = 0;             // re-routed interpolation legs
};

/// Solves V(phi) = W(phi + pi)^t U(phi) W(phi) for W on the equator:
/// W(0) = U(0)^{-1} V(0), W(pi) = I, a unitary geodesic on (0, pi) (re-routed
/// through a waypoint when the principal log is ambiguous), and
/// W(phi + pi) = (V(phi) W(phi)^{-1} U(phi)^{-1})^t on (pi, 2 pi).
/// Throws DomainError for mismatched ranks or sample counts.
GaugeLoop solve_equator_gauge(const TransitionLoop& u, const TransitionLoop& v);

/// wn det W; zero iff W extends over the disk.
int winding_obstruction(const GaugeLoop& w);

struct DiskExtension {
  std::vector<CMatrix> values;  // per grid vertex; empty outside the northern hemisphere
  int sweeps = 0;
  double max_step = 0.0;        // largest neighbour geodesic distance (rad)
  double unitarity = 0.0;
  double boundary_mismatch = 0.0;
  int jitter_retries = 0;
};

/// Extends an equator gauge loop (sampled on the grid's equator) over the
/// closed northern hemisphere: radial blend toward a base unitary with polar
/// retraction, followed by neighbour-average smoothing sweeps until every
/// neighbour step is <= max_step rad.
/// Throws DomainError when the obstruction is nonzero or the grid is not a
/// sphere, ExtensionError when the blend is singular for every jitter or the
/// sweep cap is reached.
DiskExtension extend_to_disk(const GaugeLoop& w, const Grid& grid, double max_step = 0.2, int sweep_cap = 2000);

/// v = u conj(W) on every vertex where both are defined.
Frame apply_gauge(const Frame& frame, const std::vector<CMatrix>& w);

struct SkewNormalForm {
  TransitionLoop target_plus;   // alpha_1 = (c/2) q, others 0
  TransitionLoop target_minus;  // all alpha = 0
  std::vector<CMatrix> w_plus;  // W(q, 0)
  std::vector<CMatrix> w_minus; // W(q, pi)
  double congruence_residual = 0.0;  // max ||V - W^t U W||
  int wn_det_u_plus = 0;
  int wn_det_u_minus = 0;
  int wn_det_v_plus = 0;
  int wn_det_v_minus = 0;
  int wn_det_w_plus = 0;
  int wn_det_w_minus = 0;
  bool bookkeeping_ok = false;   // 2 wn det W = wn det V - wn det U on both lines
  int extension_obstruction() const { return wn_det_w_plus - wn_det_w_minus; }
};

/// Block normal form of the skew-symmetric unitary loops U+(q), U-(q):
/// W = conj(Q) S where the columns of Q are a quaternionic basis
/// e_1, U conj(e_1), e_2, U conj(e_2), ... built from fixed reference vectors
/// (continuous and periodic in q), and S carries the target phases.
/// Throws DomainError for odd rank or odd c, ResolutionError when a
/// reference vector degenerates.
SkewNormalForm skew_normal_form(const TransitionLoop& plus, const TransitionLoop& minus, int chern);

}  // namespace phasetop
