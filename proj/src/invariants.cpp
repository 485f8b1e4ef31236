#include "phasetop/invariants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "phasetop/errors.hpp"
#include "phasetop/parallel.hpp"

namespace phasetop {

double CurvatureField::max_abs_flux() const {
  double m = 0.0;
  for (double f : flux) m = std::max(m, std::abs(f));
  return m;
}

CurvatureField chern_plaquette(const std::vector<CMatrix>& frames, const Grid& grid) {
  const auto& plaquettes = grid.plaquettes();
  CurvatureField out;
  out.flux.resize(plaquettes.size());
  parallel_for(plaquettes.size(), [&](std::size_t p) {
    const auto& corners = plaquettes[p].corners;
    cplx product = 1.0;
    for (std::size_t k = 0; k < corners.size(); ++k) {
      const CMatrix& a = frames[corners[k]];
      const CMatrix& b = frames[corners[(k + 1) % corners.size()]];
      const cplx link = (a.adjoint() * b).determinant();
      if (std::abs(link) < 1e-8) {
        std::ostringstream msg;
        msg << "chern_plaquette: vanishing link " << std::abs(link) << " at plaquette " << p
            << " (gap closing or aliasing); refine grid";
        throw ResolutionError(msg.str());
      }
      product *= link / std::abs(link);
    }
    const double flux = -std::arg(product);
    if (std::abs(flux) >= kPi - 0.1) {
      std::ostringstream msg;
      msg << "chern_plaquette: flux " << flux << " at plaquette " << p << " unresolved; refine grid";
      throw ResolutionError(msg.str());
    }
    out.flux[p] = flux;
  });
  for (double f : out.flux) out.total += f;
  const double c = out.total / kTwoPi;
  out.chern = static_cast<int>(std::lround(c));
  if (std::abs(c - out.chern) > 1e-6) {
    std::ostringstream msg;
    msg << "chern_plaquette: total flux / 2pi = " << c << " is not an integer";
    throw NumericalError(msg.str());
  }
  return out;
}

CurvatureField chern_plaquette(const Spectrum& spectrum, const BandGroup& group, const Grid& grid) {
  std::vector<CMatrix> frames(grid.vertex_count());
  for (int v = 0; v < grid.vertex_count(); ++v) frames[v] = group_basis(spectrum, group, v);
  return chern_plaquette(frames, grid);
}

int chern_winding_sphere(const TransitionLoop& loop) { return winding_number(PhaseLoop(loop.determinants())); }

int chern_winding_torus(const TransitionLoop& plus, const TransitionLoop& minus) {
  return winding_number(PhaseLoop(plus.determinants())) - winding_number(PhaseLoop(minus.determinants()));
}

MField m_field(const Frame& frame, const AntiUnitary& tr, double zero_floor) {
  MField out;
  out.rank = frame.rank;
  out.m.resize(frame.u.size());
  out.pf.resize(frame.u.size());
  for (std::size_t v = 0; v < frame.u.size(); ++v) {
    const CMatrix& u = frame.u[v];
    if (u.size() == 0) continue;
    CMatrix m = u.adjoint() * tr.apply(u);
    out.skew_residual = std::max(out.skew_residual, max_abs(m + m.transpose()));
    m = 0.5 * (m - m.transpose());
    if (out.has_pfaffian()) {
      const cplx pf = pfaffian(m);
      const double det = std::abs(m.determinant());
      out.pf_consistency =
          std::max(out.pf_consistency, std::abs(std::norm(pf) - det) / std::max(det, 1e-12));
      out.pf[v] = pf;
      if (std::abs(pf) < zero_floor) out.small_vertices.push_back(static_cast<int>(v));
    }
    out.m[v] = std::move(m);
  }
  return out;
}

namespace {

int pfaffian_loop_winding(const MField& mfield, const std::vector<int>& loop, double zero_floor) {
  std::vector<cplx> samples;
  samples.reserve(loop.size());
  for (int v : loop) {
    const cplx pf = *mfield.pf[v];
    if (std::abs(pf) <= zero_floor) {
      std::ostringstream msg;
      msg << "km_boundary: |pf M| = " << std::abs(pf) << " on the domain boundary";
      throw DegenerateConfigurationError(msg.str());
    }
    samples.push_back(pf);
  }
  return winding_number(PhaseLoop(std::move(samples)));
}

}  // namespace

int km_boundary(const MField& mfield, const Grid& grid, double zero_floor) {
  if (!mfield.has_pfaffian()) throw DomainError("km_boundary: Pfaffian undefined for odd rank");
  const auto loops = boundary_loop_samples(grid.domain());
  if (grid.manifold() == Manifold::Sphere) return pfaffian_loop_winding(mfield, loops[0], zero_floor);
  return pfaffian_loop_winding(mfield, loops[0], zero_floor) -
         pfaffian_loop_winding(mfield, loops[1], zero_floor);
}

bool ZeroCensus::same_sign() const {
  bool pos = false, neg = false;
  for (const auto& z : zeros) (z.index > 0 ? pos : neg) = true;
  return !(pos && neg);
}

ZeroCensus km_census(const MField& mfield, const Grid& grid) {
  if (!mfield.has_pfaffian()) throw DomainError("km_census: Pfaffian undefined for odd rank");
  ZeroCensus census;
  const auto& plaquettes = grid.plaquettes();
  for (int p : grid.domain().plaquettes) {
    const auto& corners = plaquettes[p].corners;
    double total = 0.0;
    for (std::size_t k = 0; k < corners.size(); ++k) {
      const cplx a = *mfield.pf[corners[k]];
      const cplx b = *mfield.pf[corners[(k + 1) % corners.size()]];
      if (a == cplx(0.0) || b == cplx(0.0)) {
        throw ResolutionError("km_census: pf M vanishes exactly at a vertex; move the grid");
      }
      const double step = phase_step(a, b);
      if (std::abs(step) > kPi - 0.05) {
        std::ostringstream msg;
        msg << "km_census: ambiguous phase step " << step << " at plaquette " << p
            << " (zero on an edge); refine or move the grid";
        throw ResolutionError(msg.str());
      }
      total += step;
    }
    const int index = static_cast<int>(std::lround(total / kTwoPi));
    if (index != 0) census.zeros.push_back({p, index});
    census.total += index;
  }
  return census;
}

namespace {

struct LocalCensus {
  const HamiltonianField& h;
  const Grid& grid;
  int first, rank;
  int max_depth;
};

constexpr int kSubdivision = 8;
// Inside a subgrid a zero near the middle of a cell already turns the phase
// by about pi/2 per edge, so only near-pi steps call for another level. Deeper
// cells are closer to linear, where any step below pi is read correctly; the
// margin shrinks with the cell (this also settles strongly anisotropic zeros).
double local_max_step(int depth) { return kPi - 0.3 * std::pow(kSubdivision, -depth); }

CMatrix local_transport(const CMatrix& basis, const CMatrix& previous) {
  try {
    return basis * polar_unitary(basis.adjoint() * previous);
  } catch (const SingularityError& e) {
    throw ResolutionError(std::string("km_census: local frame rank deficient (") + e.what() + ")");
  }
}

// Total index of pf M zeros inside the coordinate cell [lat0, lat1] x [lon0, lon1].
int local_index(const LocalCensus& ctx, double lat0, double lat1, double lon0, double lon1, int depth) {
  constexpr int s = kSubdivision;
  std::vector<CMatrix> frame((s + 1) * (s + 1));
  std::vector<cplx> pf((s + 1) * (s + 1));
  auto at = [](int a, int b) { return a * (s + 1) + b; };
  auto basis = [&](int a, int b) {
    const CMatrix m = ctx.h.evaluate(ctx.grid.point_at(lat0 + (lat1 - lat0) * a / s, lon0 + (lon1 - lon0) * b / s));
    return CMatrix(eigh(0.5 * (m + m.adjoint())).vectors.middleCols(ctx.first, ctx.rank));
  };
  frame[at(0, 0)] = basis(0, 0);
  for (int b = 1; b <= s; ++b) frame[at(0, b)] = local_transport(basis(0, b), frame[at(0, b - 1)]);
  for (int a = 1; a <= s; ++a) {
    for (int b = 0; b <= s; ++b) frame[at(a, b)] = local_transport(basis(a, b), frame[at(a - 1, b)]);
  }
  for (int k = 0; k < (s + 1) * (s + 1); ++k) {
    CMatrix m = frame[k].adjoint() * ctx.h.tr.apply(frame[k]);
    pf[k] = pfaffian(0.5 * (m - m.transpose()));
    if (pf[k] == cplx(0.0)) throw ResolutionError("km_census: pf M vanishes exactly at a subgrid point");
  }
  const bool sphere = ctx.grid.manifold() == Manifold::Sphere;
  int total = 0;
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < s; ++b) {
      // same orientation as the grid plaquettes
      const std::array<int, 4> loop = sphere ? std::array<int, 4>{at(a, b), at(a + 1, b), at(a + 1, b + 1), at(a, b + 1)}
                                 : std::array<int, 4>{at(a, b), at(a, b + 1), at(a + 1, b + 1), at(a + 1, b)};
      double sum = 0.0;
      bool ambiguous = false;
      for (int k = 0; k < 4; ++k) {
        const double step = phase_step(pf[loop[k]], pf[loop[(k + 1) % 4]]);
        ambiguous = ambiguous || std::abs(step) > local_max_step(depth);
        sum += step;
      }
      if (!ambiguous) {
        total += static_cast<int>(std::lround(sum / kTwoPi));
        continue;
      }
      if (depth >= ctx.max_depth) {
        std::ostringstream msg;
        msg << "km_census: pf M zero not isolated after " << ctx.max_depth << " local subdivisions near ("
            << lat0 << ", " << lon0 << ")";
        throw ResolutionError(msg.str());
      }
      const double dlat = (lat1 - lat0) / s, dlon = (lon1 - lon0) / s;
      total += local_index(ctx, lat0 + a * dlat, lat0 + (a + 1) * dlat, lon0 + b * dlon, lon0 + (b + 1) * dlon,
                           depth + 1);
    }
  }
  return total;
}

}  // namespace

ZeroCensus km_census(const MField& mfield, const Grid& grid, const HamiltonianField& h, int first, int last,
                     double max_step, int max_depth) {
  if (!mfield.has_pfaffian()) throw DomainError("km_census: Pfaffian undefined for odd rank");
  const LocalCensus ctx{h, grid, first, last - first + 1, max_depth};
  const auto& plaquettes = grid.plaquettes();
  const std::vector<int> domain = grid.domain().plaquettes;
  std::vector<int> index(domain.size(), 0);
  std::vector<char> local(domain.size(), 0);
  parallel_for(domain.size(), [&](std::size_t n) {
    const Plaquette& p = plaquettes[domain[n]];
    const auto& corners = p.corners;
    double total = 0.0;
    bool ambiguous = false;
    for (std::size_t k = 0; k < corners.size(); ++k) {
      const cplx a = *mfield.pf[corners[k]];
      const cplx b = *mfield.pf[corners[(k + 1) % corners.size()]];
      if (a == cplx(0.0) || b == cplx(0.0)) {
        throw ResolutionError("km_census: pf M vanishes exactly at a vertex; move the grid");
      }
      const double step = phase_step(a, b);
      ambiguous = ambiguous || std::abs(step) > max_step;
      total += step;
    }
    if (!ambiguous) {
      index[n] = static_cast<int>(std::lround(total / kTwoPi));
      return;
    }
    local[n] = 1;
    const double lat1 = p.row + 1 < static_cast<int>(grid.lat_nodes().size()) ? grid.lat_node(p.row + 1) : kTwoPi;
    index[n] = local_index(ctx, grid.lat_node(p.row), lat1, grid.lon_node(p.col),
                           grid.lon_node(p.col) + grid.lon_interval(p.col), 0);
  });
  ZeroCensus census;
  for (std::size_t n = 0; n < domain.size(); ++n) {
    if (index[n] != 0) census.zeros.push_back({domain[n], index[n]});
    census.total += index[n];
    census.locally_resolved += local[n];
  }
  return census;
}

double curvature_tr_evenness(const CurvatureField& curvature, const Grid& grid) {
  double worst = 0.0;
  for (std::size_t p = 0; p < curvature.flux.size(); ++p) {
    worst = std::max(worst, std::abs(curvature.flux[p] - curvature.flux[grid.tr_plaquette(static_cast<int>(p))]));
  }
  return worst;
}

namespace {
constexpr int kMaxSide = 8192;  // adaptive subdivision stops before a grid side exceeds this
}  // namespace

bool HotSpots::any() const {
  return std::find(rows.begin(), rows.end(), true) != rows.end() ||
         std::find(cols.begin(), cols.end(), true) != cols.end();
}

HotSpots hot_spots(const Spectrum& spectrum, const BandGroup& group, const Grid& grid, double hot_flux) {
  const auto& plaquettes = grid.plaquettes();
  std::vector<double> flux(plaquettes.size());
  parallel_for(plaquettes.size(), [&](std::size_t p) {
    const auto& corners = plaquettes[p].corners;
    cplx product = 1.0;
    for (std::size_t k = 0; k < corners.size(); ++k) {
      const cplx link = (group_basis(spectrum, group, corners[k]).adjoint() *
                         group_basis(spectrum, group, corners[(k + 1) % corners.size()]))
                            .determinant();
      if (std::abs(link) < 1e-8) {
        flux[p] = kPi;
        return;
      }
      product *= link / std::abs(link);
    }
    flux[p] = -std::arg(product);
  });
  HotSpots hot{std::vector<bool>(grid.n_lat(), false), std::vector<bool>(grid.n_lon(), false)};
  std::vector<double> column(grid.n_lon(), 0.0);
  const int top = grid.boundary_row();
  for (std::size_t p = 0; p < plaquettes.size(); ++p) {
    const Plaquette& q = plaquettes[p];
    if (std::abs(flux[p]) > hot_flux) hot.rows[q.row] = hot.cols[q.col] = true;
    if (q.row < top) column[q.col] += flux[p];
  }
  for (int j = 0; j < grid.n_lon(); ++j) {
    if (std::abs(column[j]) > hot_flux) hot.cols[j] = true;
  }
  return hot;
}

AdaptedGrid adapt_grid(const HamiltonianField& h, int first, int last, Grid grid, const Tolerances& tol) {
  AdaptedGrid out{grid, spectrum_on_grid(h, grid), 0};
  while (out.passes < tol.adaptive_passes) {
    const BandGroup group = band_group(out.spectrum, first, last);
    if (!(group.min_gap > tol.gap_floor)) break;  // reported by the caller
    const HotSpots hot = hot_spots(out.spectrum, group, out.grid);
    if (!hot.any()) break;
    Grid next = out.grid.subdivided(hot.rows, hot.cols, 2);
    if (next.n_lat() > kMaxSide || next.n_lon() > kMaxSide) break;
    out.spectrum = spectrum_on_grid(h, next);
    out.grid = std::move(next);
    ++out.passes;
  }
  return out;
}

namespace {

struct ChernStage {
  Grid grid;
  Spectrum spectrum;
  BandGroup group;
  CurvatureField curvature;
  Frame frame;
  TransitionLoop plus;   // equator loop on the sphere, p = 0 on the torus
  TransitionLoop minus;  // p = pi on the torus
  int c_winding = 0;
  int passes = 0;
};

ChernStage chern_stage(const HamiltonianField& h, int first, int last, const Grid& start, const Tolerances& tol) {
  AdaptedGrid adapted = adapt_grid(h, first, last, start, tol);
  const Grid& grid = adapted.grid;
  ChernStage s{grid, std::move(adapted.spectrum), {}, {}, {}, {}, {}, 0, adapted.passes};
  s.group = band_group(s.spectrum, first, last);
  if (!(s.group.min_gap > tol.gap_floor)) {
    std::ostringstream msg;
    msg << "band group [" << first << ", " << last << "] is not gapped (min gap " << s.group.min_gap << ")";
    throw DomainError(msg.str());
  }
  s.curvature = chern_plaquette(s.spectrum, s.group, s.grid);
  s.frame = smooth_frame(s.spectrum, s.group, s.grid);
  if (s.grid.manifold() == Manifold::Sphere) {
    s.plus = transition_loop_sphere(s.frame, s.grid, h.tr);
    s.c_winding = chern_winding_sphere(s.plus);
  } else {
    std::tie(s.plus, s.minus) = transition_loops_torus(s.frame, s.grid, h.tr);
    s.c_winding = chern_winding_torus(s.plus, s.minus);
  }
  return s;
}

double pfaffian_identity_residual(const MField& mfield, const TransitionLoop& loop, const Grid& grid) {
  // With U(phi)^t = u(phi)^dagger T u(phi + pi): M(phi + pi) = U conj(M(phi)) U^t,
  // so pf M(phi + pi) = det U(phi) conj(pf M(phi)).
  const int n = grid.n_lon();
  const int row = grid.boundary_row();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const cplx here = *mfield.pf[grid.vertex(row, j)];
    const cplx there = *mfield.pf[grid.vertex(row, j + n / 2)];
    worst = std::max(worst, std::abs(there - loop.samples[j].determinant() * std::conj(here)));
  }
  return worst;
}

}  // namespace

InvariantReport verify_group(const HamiltonianField& h, int first, int last, const GridSpec& spec,
                             const Tolerances& tol) {
  if (h.manifold != spec.manifold) throw DomainError("verify_group: field and grid live on different manifolds");
  InvariantReport r;
  r.first = first;
  r.last = last;
  r.rank = last - first + 1;

  const TriCheck tri = check_tri(h, Grid(spec.manifold, spec.n_lat, spec.n_lon), tol.tri_tol);
  r.residuals.tri = tri.max_residual;
  if (!tri.pass) {
    std::ostringstream msg;
    msg << "verify_group: field is not time-reversal invariant (residual " << tri.max_residual << ")";
    throw DomainError(msg.str());
  }

  std::optional<ChernStage> stage;
  std::string last_error;
  bool refined_for_mismatch = false;
  for (int level = 0; level <= tol.max_refinements; ++level) {
    const Grid grid(spec.manifold, spec.n_lat << level, spec.n_lon << level);
    try {
      ChernStage s = chern_stage(h, first, last, grid, tol);
      r.grid.refinements = level;
      r.grid.adaptive_passes = s.passes;
      const bool agree = s.curvature.chern == s.c_winding;
      stage = std::move(s);
      if (agree || refined_for_mismatch || level == tol.max_refinements) break;
      refined_for_mismatch = true;
    } catch (const ResolutionError& e) {
      last_error = e.what();
    }
  }
  if (!stage) throw ResolutionError("verify_group: unresolved after refinement: " + last_error);

  const ChernStage& s = *stage;
  const bool sphere = spec.manifold == Manifold::Sphere;
  r.min_gap = s.group.min_gap;
  r.c_plaquette = s.curvature.chern;
  r.c_winding = s.c_winding;
  r.consistent = r.c_plaquette == r.c_winding;
  r.grid.n_lat = s.grid.n_lat();
  r.grid.n_lon = s.grid.n_lon();
  r.parity_ok = sphere ? (((r.c_plaquette - r.rank) % 2) == 0)
                       : (r.rank % 2 == 0 && r.c_plaquette % 2 == 0);

  r.residuals.frame_orthonormality = s.frame.orthonormality_residual;
  r.residuals.frame_span = s.frame.span_residual;
  r.residuals.frame_continuity = s.frame.continuity_constant;
  r.residuals.frame_seam = s.frame.seam_residual;
  r.residuals.transition_unitarity = std::max(s.plus.unitarity_residual(),
                                              sphere ? 0.0 : s.minus.unitarity_residual());
  r.residuals.transition_symmetry =
      sphere ? s.plus.antisymmetry_residual() : std::max(s.plus.skew_residual(), s.minus.skew_residual());
  r.residuals.curvature_evenness = curvature_tr_evenness(s.curvature, s.grid);
  r.residuals.curvature_evenness_tol = tol.evenness_tol(s.curvature);
  if (!sphere) r.residuals.kramers = kramers_check(s.spectrum, s.grid);
  r.curvature = s.curvature;
  r.chern_grid = s.grid;

  if (r.rank % 2 != 0) {
    r.km_status = "odd_rank";
    r.km_relation_ok = true;
    return r;
  }

  r.km_status = "degenerate";
  std::string km_error;
  for (int chart = 0; chart < tol.km_charts; ++chart) {
    try {
      std::optional<ChernStage> moved;
      if (chart > 0) {
        const Grid level_grid(spec.manifold, spec.n_lat << r.grid.refinements, spec.n_lon << r.grid.refinements,
                              Chart::numbered(spec.manifold, chart, spec.n_lat << r.grid.refinements,
                                              spec.n_lon << r.grid.refinements));
        moved = chern_stage(h, first, last, level_grid, tol);
      }
      const ChernStage& c = moved ? *moved : s;
      const MField mf = m_field(c.frame, h.tr, tol.zero_floor);
      const int k = km_boundary(mf, c.grid, tol.zero_floor);
      const ZeroCensus census = km_census(mf, c.grid, h, first, last);
      r.km_status = "ok";
      r.k_boundary = k;
      r.k_census = census.total;
      r.census = census;
      r.grid.km_chart = chart;
      r.residuals.m_skew = mf.skew_residual;
      r.residuals.pf_consistency = mf.pf_consistency;
      if (sphere) r.residuals.pfaffian_identity = pfaffian_identity_residual(mf, c.plus, c.grid);
      for (std::size_t v = 0; v < mf.pf.size(); ++v) {
        if (mf.pf[v]) r.pf_modulus.emplace_back(static_cast<int>(v), std::abs(*mf.pf[v]));
      }
      r.km_grid = c.grid;
      break;
    } catch (const DegenerateConfigurationError& e) {
      km_error = e.what();
    } catch (const ResolutionError& e) {
      km_error = e.what();
    }
  }
  if (r.km_status != "ok") {
    r.km_diagnostic = "no admissible fundamental domain after " + std::to_string(tol.km_charts) +
                      " charts: " + km_error;
    r.km_relation_ok = false;
    return r;
  }
  r.km_relation_ok = 2 * *r.k_boundary == r.c_plaquette && *r.k_census == *r.k_boundary;
  return r;
}

}  // namespace phasetop
