#include "phasetop/gauge.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "phasetop/errors.hpp"

namespace phasetop {

TransitionLoop normal_form_loop(const NormalFormSpec& spec) {
  if (spec.rank < 1) throw DomainError("normal_form_loop: rank must be positive");
  if (((spec.chern - spec.rank) % 2) != 0) {
    std::ostringstream msg;
    msg << "normal_form_loop: Chern number " << spec.chern << " and rank " << spec.rank
        << " differ in parity; no TRI bundle exists";
    throw DomainError(msg.str());
  }
  if (spec.samples < 2 || spec.samples % 2 != 0) throw DomainError("normal_form_loop: sample count must be even");
  if (!spec.angles.empty() && static_cast<int>(spec.angles.size()) != spec.samples) {
    throw DomainError("normal_form_loop: one angle per sample required");
  }
  TransitionLoop loop;
  const int lead = spec.chern - spec.rank + 1;
  for (int j = 0; j < spec.samples; ++j) {
    const double phi = spec.angles.empty() ? kTwoPi * j / spec.samples : spec.angles[j];
    CMatrix v = CMatrix::Zero(spec.rank, spec.rank);
    v(0, 0) = std::polar(1.0, lead * phi);
    for (int k = 1; k < spec.rank; ++k) v(k, k) = std::polar(1.0, phi);
    loop.samples.push_back(std::move(v));
  }
  return loop;
}

namespace {

// Distance of the eigenphases of a unitary from the principal-log cut at pi.
double distance_to_cut(const CMatrix& u) {
  const RVector phases = unitary_phases(u);
  double d = kPi;
  for (Eigen::Index i = 0; i < phases.size(); ++i) d = std::min(d, kPi - std::abs(phases(i)));
  return d;
}

// Geodesic samples from `from` to `to`, endpoints included.
std::vector<CMatrix> geodesic(const CMatrix& from, const CMatrix& to, int steps) {
  const CMatrix log = unitary_log(from.adjoint() * to);
  std::vector<CMatrix> out;
  for (int k = 0; k <= steps; ++k) out.push_back(from * hermitian_exp_i(log, static_cast<double>(k) / steps));
  out.back() = to;
  return out;
}

}  // namespace

GaugeLoop solve_equator_gauge(const TransitionLoop& u, const TransitionLoop& v) {
  const int n = static_cast<int>(u.size());
  if (n != static_cast<int>(v.size()) || n < 4 || n % 2 != 0) {
    throw DomainError("solve_equator_gauge: loops need equal, even sample counts");
  }
  if (u.rank() != v.rank()) throw DomainError("solve_equator_gauge: loops differ in rank");
  const int half = n / 2;
  const int rank = u.rank();
  const CMatrix identity = CMatrix::Identity(rank, rank);

  GaugeLoop w;
  w.samples.resize(n);
  const CMatrix start = u.samples[0].inverse() * v.samples[0];

  // Interpolation on [0, pi]: direct geodesic unless the principal log of
  // start^dagger sits on its branch cut, then through e^{i theta} start.
  std::vector<CMatrix> path;
  constexpr double kCutMargin = 1e-6;
  if (distance_to_cut(start.adjoint()) > kCutMargin) {
    path = geodesic(start, identity, half);
  } else {
    double best_theta = 0.0, best = -1.0;
    for (double theta : {kPi / 2, -kPi / 2, kPi / 3, -kPi / 3, 2 * kPi / 3, -2 * kPi / 3}) {
      const double d = distance_to_cut(std::polar(1.0, -theta) * start.adjoint());
      if (d > best) best = d, best_theta = theta;
    }
    const CMatrix waypoint = std::polar(1.0, best_theta) * start;
    const int mid = half / 2;
    path = geodesic(start, waypoint, mid);
    const auto second = geodesic(waypoint, identity, half - mid);
    path.insert(path.end(), second.begin() + 1, second.end());
    w.waypoints = 1;
  }
  for (int j = 0; j <= half; ++j) w.samples[j] = path[j];
  w.samples[0] = start;
  w.samples[half] = identity;

  auto continued = [&](int k) -> CMatrix {
    return (v.samples[k] * w.samples[k].inverse() * u.samples[k].inverse()).transpose();
  };
  for (int j = half + 1; j < n; ++j) w.samples[j] = continued(j - half);

  w.residual_at_pi = max_abs(continued(0) - w.samples[half]);
  w.residual_at_2pi = max_abs(continued(half) - w.samples[0]);
  for (int j = 0; j < n; ++j) {
    const CMatrix& far = w.samples[(j + half) % n];
    w.relation_residual =
        std::max(w.relation_residual, max_abs(far.transpose() * u.samples[j] * w.samples[j] - v.samples[j]));
  }
  return w;
}

int winding_obstruction(const GaugeLoop& w) {
  std::vector<cplx> dets;
  for (const auto& m : w.samples) dets.push_back(m.determinant());
  return winding_number(PhaseLoop(std::move(dets)));
}

namespace {

CMatrix random_special_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix a(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) a(r, c) = cplx(normal(rng), normal(rng));
  }
  CMatrix q = polar_unitary(a);
  const cplx det = q.determinant();
  return q * std::polar(1.0, -std::arg(det) / n);
}

double smallest_singular_value(const CMatrix& a) {
  const auto sv = Eigen::JacobiSVD<CMatrix>(a).singularValues();
  return sv(sv.size() - 1);
}

}  // namespace

DiskExtension extend_to_disk(const GaugeLoop& w, const Grid& grid, double max_step, int sweep_cap) {
  if (grid.manifold() != Manifold::Sphere) throw DomainError("extend_to_disk: sphere grid required");
  const int n = grid.n_lon();
  if (static_cast<int>(w.samples.size()) != n) {
    throw DomainError("extend_to_disk: gauge loop must be sampled on the grid equator");
  }
  const int obstruction = winding_obstruction(w);
  if (obstruction != 0) {
    std::ostringstream msg;
    msg << "extend_to_disk: det W winds " << obstruction << " times; no extension to the disk exists";
    throw DomainError(msg.str());
  }
  const int rank = static_cast<int>(w.samples[0].rows());
  const int top = grid.boundary_row();

  // W_j = e^{i theta_j / N} S_j with theta continuous and periodic, S_j in SU(N)
  std::vector<double> theta(n);
  theta[0] = std::arg(w.samples[0].determinant());
  for (int j = 1; j < n; ++j) {
    theta[j] = theta[j - 1] + phase_step(w.samples[j - 1].determinant(), w.samples[j].determinant());
  }
  std::vector<CMatrix> special(n);
  for (int j = 0; j < n; ++j) special[j] = std::polar(1.0, -theta[j] / rank) * w.samples[j];

  DiskExtension out;
  auto conditioning_of = [&](const CMatrix& base) {
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 1; i < top; ++i) {
      const double r = grid.lat_node(i) / grid.lat_node(top);
      for (int j = 0; j < n; ++j) {
        worst = std::min(worst, smallest_singular_value((1.0 - r) * base + r * special[j]));
      }
    }
    return worst;
  };
  auto spread_of = [&](const CMatrix& base) {
    double worst = 0.0;
    for (const auto& s : special) worst = std::max(worst, unitary_angle(base, s));
    return worst;
  };
  constexpr double kWellConditioned = 0.05;

  // Base unitary at the pole: the identity or the projected mean of the
  // boundary values, whichever keeps radial steps shorter.
  std::vector<CMatrix> candidates{CMatrix::Identity(rank, rank)};
  CMatrix mean = CMatrix::Zero(rank, rank);
  for (const auto& s : special) mean += s;
  try {
    CMatrix q = polar_unitary(mean);
    candidates.push_back(q * std::polar(1.0, -std::arg(q.determinant()) / rank));
  } catch (const SingularityError&) {
  }
  CMatrix best_base = candidates.front();
  double best_conditioning = -1.0;
  double best_spread = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    const double conditioning = conditioning_of(c);
    const double spread = spread_of(c);
    const bool good = conditioning >= kWellConditioned;
    const bool best_good = best_conditioning >= kWellConditioned;
    if ((good && (!best_good || spread < best_spread)) || (!good && !best_good && conditioning > best_conditioning)) {
      best_base = c, best_conditioning = conditioning, best_spread = spread;
    }
  }
  std::mt19937_64 rng(0x9a06e5eedULL);
  constexpr int kMaxJitter = 16;
  while (best_conditioning < kWellConditioned && out.jitter_retries < kMaxJitter) {
    ++out.jitter_retries;
    const CMatrix c = random_special_unitary(rank, rng);
    const double conditioning = conditioning_of(c);
    if (conditioning > best_conditioning) best_base = c, best_conditioning = conditioning;
  }
  if (best_conditioning <= 1e-10) {
    throw ExtensionError("extend_to_disk: radial blend singular for every jittered base unitary");
  }

  out.values.assign(grid.vertex_count(), CMatrix());
  out.values[grid.vertex(0, 0)] = best_base;
  for (int i = 1; i < top; ++i) {
    const double r = grid.lat_node(i) / grid.lat_node(top);
    for (int j = 0; j < n; ++j) {
      out.values[grid.vertex(i, j)] =
          std::polar(1.0, r * theta[j] / rank) * polar_unitary((1.0 - r) * best_base + r * special[j]);
    }
  }
  for (int j = 0; j < n; ++j) out.values[grid.vertex(top, j)] = w.samples[j];

  std::vector<std::vector<int>> neighbours(grid.vertex_count());
  std::vector<std::pair<int, int>> edges;
  for (const auto& [a, b] : grid.edges()) {
    if (grid.row_of(a) > top || grid.row_of(b) > top) continue;
    neighbours[a].push_back(b);
    neighbours[b].push_back(a);
    edges.emplace_back(a, b);
  }
  auto largest_step = [&] {
    double worst = 0.0;
    for (const auto& [a, b] : edges) worst = std::max(worst, unitary_angle(out.values[a], out.values[b]));
    return worst;
  };

  out.max_step = largest_step();
  while (out.max_step > max_step && out.sweeps < sweep_cap) {
    std::vector<CMatrix> next = out.values;
    for (int v = 0; v < grid.vertex_count(); ++v) {
      if (grid.row_of(v) >= top) continue;
      CMatrix sum = CMatrix::Zero(rank, rank);
      for (int nb : neighbours[v]) sum += out.values[nb];
      try {
        next[v] = polar_unitary(sum);
      } catch (const SingularityError&) {
        // keep the previous value; the neighbours move on the next sweep
      }
    }
    out.values = std::move(next);
    ++out.sweeps;
    out.max_step = largest_step();
  }
  if (out.max_step > max_step) {
    std::ostringstream msg;
    msg << "extend_to_disk: largest neighbour step " << out.max_step << " rad after " << out.sweeps
        << " sweeps exceeds " << max_step;
    throw ExtensionError(msg.str());
  }
  for (int v = 0; v < grid.vertex_count(); ++v) {
    if (out.values[v].size() == 0) continue;
    out.unitarity = std::max(out.unitarity, unitarity_residual(out.values[v]));
  }
  for (int j = 0; j < n; ++j) {
    out.boundary_mismatch = std::max(out.boundary_mismatch, max_abs(out.values[grid.vertex(top, j)] - w.samples[j]));
  }
  return out;
}

Frame apply_gauge(const Frame& frame, const std::vector<CMatrix>& w) {
  Frame out = frame;
  for (std::size_t v = 0; v < frame.u.size(); ++v) {
    if (frame.u[v].size() == 0 || v >= w.size() || w[v].size() == 0) continue;
    out.u[v] = frame.u[v] * w[v].conjugate();
  }
  return out;
}

namespace {

struct SkewLine {
  TransitionLoop target;
  std::vector<CMatrix> w;
  double residual = 0.0;
};

// Reference vectors e_{a_1}, e_{a_2}, ... chosen so every Gram-Schmidt
// remainder stays well away from zero on all samples.
std::vector<int> choose_references(const TransitionLoop& u) {
  const int rank = u.rank();
  std::vector<int> chosen;
  std::vector<CMatrix> spans(u.size(), CMatrix(rank, 0));
  for (int block = 0; block < rank / 2; ++block) {
    int best_index = -1;
    double best_min = -1.0;
    for (int a = 0; a < rank; ++a) {
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < u.size(); ++s) {
        CVector e = CVector::Unit(rank, a);
        e -= spans[s] * (spans[s].adjoint() * e);
        worst = std::min(worst, e.norm());
      }
      if (worst > best_min + 1e-12) best_min = worst, best_index = a;
    }
    if (best_min < 1e-3) {
      throw ResolutionError("skew_normal_form: quaternionic basis degenerates along the loop; refine sampling");
    }
    chosen.push_back(best_index);
    for (std::size_t s = 0; s < u.size(); ++s) {
      CVector e = CVector::Unit(rank, best_index);
      e -= spans[s] * (spans[s].adjoint() * e);
      e.normalize();
      const CVector te = u.samples[s] * e.conjugate();
      CMatrix grown(rank, spans[s].cols() + 2);
      grown << spans[s], e, te;
      spans[s] = grown;
    }
  }
  return chosen;
}

SkewLine skew_line(const TransitionLoop& u, double alpha_slope) {
  const int rank = u.rank();
  const int n = static_cast<int>(u.size());
  const std::vector<int> refs = choose_references(u);
  SkewLine line;
  for (int s = 0; s < n; ++s) {
    const double q = kTwoPi * s / n;
    const CMatrix& us = u.samples[s];
    CMatrix basis(rank, 0);
    for (int a : refs) {
      CVector e = CVector::Unit(rank, a);
      e -= basis * (basis.adjoint() * e);
      e.normalize();
      const CVector te = us * e.conjugate();
      CMatrix grown(rank, basis.cols() + 2);
      grown << basis, e, te;
      basis = grown;
    }
    CMatrix phases = CMatrix::Identity(rank, rank);
    phases(0, 0) = std::polar(1.0, alpha_slope * q);
    CMatrix w = basis.conjugate() * phases;

    CMatrix target = CMatrix::Zero(rank, rank);
    for (int b = 0; b < rank / 2; ++b) {
      const cplx e = b == 0 ? std::polar(1.0, alpha_slope * q) : cplx(1.0);
      target(2 * b, 2 * b + 1) = -e;
      target(2 * b + 1, 2 * b) = e;
    }
    line.residual = std::max(line.residual, max_abs(target - w.transpose() * us * w));
    line.target.samples.push_back(std::move(target));
    line.w.push_back(std::move(w));
  }
  return line;
}

int det_winding(const std::vector<CMatrix>& loop) {
  std::vector<cplx> dets;
  for (const auto& m : loop) dets.push_back(m.determinant());
  return winding_number(PhaseLoop(std::move(dets)));
}

}  // namespace

SkewNormalForm skew_normal_form(const TransitionLoop& plus, const TransitionLoop& minus, int chern) {
  if (plus.rank() % 2 != 0 || plus.rank() != minus.rank()) {
    throw DomainError("skew_normal_form: loops need equal, even rank");
  }
  if (chern % 2 != 0) throw DomainError("skew_normal_form: Chern number must be even");
  if (plus.size() != minus.size()) throw DomainError("skew_normal_form: loops differ in sample count");
  if (std::max(plus.skew_residual(), minus.skew_residual()) > 1e-8) {
    throw DomainError("skew_normal_form: transition loops are not skew-symmetric");
  }
  SkewLine p = skew_line(plus, chern / 2.0);
  SkewLine m = skew_line(minus, 0.0);
  SkewNormalForm out;
  out.congruence_residual = std::max(p.residual, m.residual);
  out.wn_det_u_plus = det_winding(plus.samples);
  out.wn_det_u_minus = det_winding(minus.samples);
  out.wn_det_v_plus = det_winding(p.target.samples);
  out.wn_det_v_minus = det_winding(m.target.samples);
  out.wn_det_w_plus = det_winding(p.w);
  out.wn_det_w_minus = det_winding(m.w);
  out.bookkeeping_ok = 2 * out.wn_det_w_plus == out.wn_det_v_plus - out.wn_det_u_plus &&
                       2 * out.wn_det_w_minus == out.wn_det_v_minus - out.wn_det_u_minus;
  out.target_plus = std::move(p.target);
  out.target_minus = std::move(m.target);
  out.w_plus = std::move(p.w);
  out.w_minus = std::move(m.w);
  return out;
}

}  // namespace phasetop
