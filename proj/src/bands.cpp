#include "phasetop/bands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phasetop/errors.hpp"
#include "phasetop/parallel.hpp"

namespace phasetop {

AntiUnitary::AntiUnitary(CMatrix j) : j_(std::move(j)) {
  if (j_.rows() != j_.cols() || j_.rows() == 0 || j_.rows() % 2 != 0) {
    throw DomainError("AntiUnitary: J must be square with even dimension");
  }
  if (unitarity_residual(j_) > 1e-12) throw DomainError("AntiUnitary: J is not unitary");
  if (fermionic_residual() > 1e-12) throw DomainError("AntiUnitary: J conj(J) != -I (T^2 != -1)");
}

double AntiUnitary::fermionic_residual() const {
  return max_abs(j_ * j_.conjugate() + CMatrix::Identity(j_.rows(), j_.cols()));
}

AntiUnitary AntiUnitary::spin_half() {
  CMatrix j(2, 2);
  j << 0.0, 1.0, -1.0, 0.0;
  return AntiUnitary(j);
}

TriCheck check_tri(const HamiltonianField& h, const Grid& grid, double tol) {
  if (h.tr.dim() != h.dim) throw DomainError("check_tri: field and time reversal differ in dimension");
  std::vector<double> residual(grid.vertex_count());
  parallel_for(residual.size(), [&](std::size_t v) {
    const CMatrix here = h.evaluate(grid.point(static_cast<int>(v)));
    const CMatrix there = h.evaluate(grid.point(grid.tr_vertex(static_cast<int>(v))));
    if (here.rows() != h.dim || there.rows() != h.dim) {
      throw DomainError("check_tri: evaluator returned a matrix of the wrong dimension");
    }
    residual[v] = max_abs(h.tr.conjugate_operator(there) - here);
  });
  TriCheck out;
  out.max_residual = *std::max_element(residual.begin(), residual.end());
  out.pass = out.max_residual <= tol;
  return out;
}

HamiltonianField symmetrize_tri(FieldEvaluator b, int dim, Manifold manifold, const AntiUnitary& tr) {
  if (tr.dim() != dim) throw DomainError("symmetrize_tri: field and time reversal differ in dimension");
  HamiltonianField h;
  h.dim = dim;
  h.manifold = manifold;
  h.tr = tr;
  h.evaluate = [b = std::move(b), tr, manifold](const PhasePoint& x) -> CMatrix {
    const CMatrix here = b(x);
    const CMatrix there = b(tr_image(manifold, x));
    CMatrix sym = 0.5 * (here + tr.conjugate_operator(there));
    return 0.5 * (sym + sym.adjoint());
  };
  return h;
}

Spectrum spectrum_on_grid(const HamiltonianField& h, const Grid& grid) {
  Spectrum s;
  s.vertices.resize(grid.vertex_count());
  parallel_for(s.vertices.size(), [&](std::size_t v) {
    const CMatrix m = h.evaluate(grid.point(static_cast<int>(v)));
    s.vertices[v] = eigh(0.5 * (m + m.adjoint()));
  });
  return s;
}

double min_gap_above(const Spectrum& spectrum, int k) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& e : spectrum.vertices) gap = std::min(gap, e.values(k + 1) - e.values(k));
  return gap;
}

BandGroup band_group(const Spectrum& spectrum, int first, int last) {
  const int n = spectrum.dim();
  if (first < 0 || last < first || last >= n) {
    std::ostringstream msg;
    msg << "band group [" << first << ", " << last << "] outside 0.." << n - 1;
    throw DomainError(msg.str());
  }
  BandGroup g{first, last, std::numeric_limits<double>::infinity()};
  if (first > 0) g.min_gap = std::min(g.min_gap, min_gap_above(spectrum, first - 1));
  if (last < n - 1) g.min_gap = std::min(g.min_gap, min_gap_above(spectrum, last));
  return g;
}

std::vector<BandGroup> find_gapped_groups(const Spectrum& spectrum, double gap_floor) {
  const int n = spectrum.dim();
  std::vector<int> cuts;  // band k is the top of a group
  for (int k = 0; k + 1 < n; ++k) {
    if (min_gap_above(spectrum, k) > gap_floor) cuts.push_back(k);
  }
  std::vector<BandGroup> groups;
  if (cuts.empty()) return groups;
  int first = 0;
  cuts.push_back(n - 1);
  for (int top : cuts) {
    groups.push_back(band_group(spectrum, first, top));
    first = top + 1;
  }
  return groups;
}

CMatrix group_basis(const Spectrum& spectrum, const BandGroup& group, int vertex) {
  return spectrum.vertices[vertex].vectors.middleCols(group.first, group.rank());
}

namespace {

// Parallel transport step: project onto the new eigenspace and retract.
CMatrix transport(const CMatrix& basis, const CMatrix& previous) {
  try {
    return basis * polar_unitary(basis.adjoint() * previous);
  } catch (const SingularityError& e) {
    throw ResolutionError(std::string("smooth_frame: projected frame is rank deficient; refine grid (") +
                          e.what() + ")");
  }
}

void fill_frame_diagnostics(Frame& f, const Spectrum& spectrum, const BandGroup& group,
                            const Grid& grid) {
  for (std::size_t v = 0; v < f.u.size(); ++v) {
    if (f.u[v].size() == 0) continue;
    const CMatrix basis = group_basis(spectrum, group, static_cast<int>(v));
    f.orthonormality_residual = std::max(f.orthonormality_residual, isometry_residual(f.u[v]));
    f.span_residual = std::max(f.span_residual, (f.u[v] - basis * (basis.adjoint() * f.u[v])).norm());
  }
  double worst = 0.0;
  for (const auto& [a, b] : grid.edges()) {
    if (f.u[a].size() == 0 || f.u[b].size() == 0) continue;
    worst = std::max(worst, (f.u[a] - f.u[b]).norm() / grid.distance(a, b));
  }
  f.continuity_constant = worst;
}

}  // namespace

Frame smooth_frame(const Spectrum& spectrum, const BandGroup& group, const Grid& grid) {
  Frame f;
  f.rank = group.rank();
  f.u.assign(grid.vertex_count(), CMatrix());
  const int top = grid.boundary_row();
  const int n_lon = grid.n_lon();
  auto basis = [&](int row, int col) { return group_basis(spectrum, group, grid.vertex(row, col)); };

  if (grid.manifold() == Manifold::Sphere) {
    const int pole = grid.vertex(0, 0);
    f.u[pole] = group_basis(spectrum, group, pole);
    parallel_for(static_cast<std::size_t>(n_lon), [&](std::size_t j) {
      CMatrix current = f.u[pole];
      for (int i = 1; i <= top; ++i) {
        current = transport(basis(i, static_cast<int>(j)), current);
        f.u[grid.vertex(i, static_cast<int>(j))] = current;
      }
    });
  } else {
    std::vector<CMatrix> line(n_lon + 1);
    line[0] = basis(0, 0);
    for (int j = 1; j <= n_lon; ++j) line[j] = transport(basis(0, j), line[j - 1]);
    const CMatrix holonomy = line[0].adjoint() * line[n_lon];
    // holonomy = exp(i L); eigenphase -1 maps to +pi and exp(iL) still equals the holonomy
    const CMatrix log_h = unitary_log(polar_unitary(holonomy));
    for (int j = 0; j <= n_lon; ++j) {
      const double fraction = j < n_lon ? grid.lon_node(j) / kTwoPi : 1.0;
      line[j] = line[j] * hermitian_exp_i(log_h, -fraction);
    }
    f.seam_residual = max_abs(line[n_lon] - line[0]);
    for (int j = 0; j < n_lon; ++j) f.u[grid.vertex(0, j)] = line[j];
    parallel_for(static_cast<std::size_t>(n_lon), [&](std::size_t jj) {
      const int j = static_cast<int>(jj);
      CMatrix current = line[j];
      for (int i = 1; i <= top; ++i) {
        current = transport(basis(i, j), current);
        f.u[grid.vertex(i, j)] = current;
      }
    });
  }
  fill_frame_diagnostics(f, spectrum, group, grid);
  return f;
}

double TransitionLoop::unitarity_residual() const {
  double worst = 0.0;
  for (const auto& u : samples) worst = std::max(worst, phasetop::unitarity_residual(u));
  return worst;
}

double TransitionLoop::antisymmetry_residual() const {
  const std::size_t n = samples.size();
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    worst = std::max(worst, max_abs(samples[(j + n / 2) % n].transpose() + samples[j]));
  }
  return worst;
}

double TransitionLoop::skew_residual() const {
  double worst = 0.0;
  for (const auto& u : samples) worst = std::max(worst, max_abs(u + u.transpose()));
  return worst;
}

std::vector<cplx> TransitionLoop::determinants() const {
  std::vector<cplx> out;
  out.reserve(samples.size());
  for (const auto& u : samples) out.push_back(u.determinant());
  return out;
}

namespace {

void require_unitary(const TransitionLoop& loop, const char* what) {
  const double r = loop.unitarity_residual();
  if (r > 1e-9) {
    std::ostringstream msg;
    msg << what << ": transition matrices not unitary (residual " << r
        << "); frame does not span the band space or the gap is lost";
    throw NumericalError(msg.str());
  }
}

}  // namespace

TransitionLoop transition_loop_sphere(const Frame& frame, const Grid& grid, const AntiUnitary& tr) {
  if (grid.manifold() != Manifold::Sphere) throw DomainError("transition_loop_sphere: sphere grid required");
  const int row = grid.boundary_row();
  const int n = grid.n_lon();
  TransitionLoop loop;
  loop.samples.reserve(n);
  for (int j = 0; j < n; ++j) {
    const CMatrix& here = frame.u[grid.vertex(row, j)];
    const CMatrix& opposite = frame.u[grid.vertex(row, j + n / 2)];
    loop.samples.push_back((here.adjoint() * tr.apply(opposite)).transpose());
  }
  require_unitary(loop, "transition_loop_sphere");
  return loop;
}

std::pair<TransitionLoop, TransitionLoop> transition_loops_torus(const Frame& frame, const Grid& grid,
                                                                 const AntiUnitary& tr) {
  if (grid.manifold() != Manifold::Torus) throw DomainError("transition_loops_torus: torus grid required");
  auto line = [&](int row) {
    TransitionLoop loop;
    for (int j = 0; j < grid.n_lon(); ++j) {
      const CMatrix& u = frame.u[grid.vertex(row, j)];
      loop.samples.push_back((u.adjoint() * tr.apply(u)).transpose());
    }
    require_unitary(loop, "transition_loops_torus");
    return loop;
  };
  return {line(0), line(grid.boundary_row())};
}

double kramers_check(const Spectrum& spectrum, const Grid& grid) {
  if (grid.manifold() != Manifold::Torus) throw DomainError("kramers_check: torus grid required");
  double worst = 0.0;
  for (int row : {0, grid.boundary_row()}) {
    for (int j = 0; j < grid.n_lon(); ++j) {
      const RVector& e = spectrum.vertices[grid.vertex(row, j)].values;
      for (Eigen::Index i = 0; i + 1 < e.size(); i += 2) worst = std::max(worst, std::abs(e(i + 1) - e(i)));
    }
  }
  return worst;
}

}  // namespace phasetop
