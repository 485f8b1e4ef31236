#pragma once

// Chern numbers by two independent routes (gauge-invariant plaquette flux and
// transition-matrix winding), the Kane-Mele integer by boundary Pfaffian
// winding and by zero census, Berry-curvature evenness, and the per-group
// report that cross-checks all of them.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phasetop/bands.hpp"

namespace phasetop {

struct CurvatureField {
  std::vector<double> flux;  // per plaquette, radians, coordinate orientation
  double total = 0.0;
  int chern = 0;
  double max_abs_flux() const;
};

/// Lattice Berry flux per plaquette from link variables det(u_x^dagger u_y)
/// of any per-vertex frame (no smoothness needed). The flux of a plaquette
/// is minus the principal argument of its oriented link product, so that
/// c = total / 2pi matches the transition-matrix winding.
/// Throws ResolutionError when a link nearly vanishes or |F_P| >= pi - 0.1.
CurvatureField chern_plaquette(const std::vector<CMatrix>& frames, const Grid& grid);
CurvatureField chern_plaquette(const Spectrum& spectrum, const BandGroup& group, const Grid& grid);

/// wn det U over the equator.
int chern_winding_sphere(const TransitionLoop& loop);

/// wn det U+ - wn det U-.
int chern_winding_torus(const TransitionLoop& plus, const TransitionLoop& minus);

struct MField {
  int rank = 0;
  std::vector<CMatrix> m;                 // M_nn' = <u_n, T u_n'>, per domain vertex
  std::vector<std::optional<cplx>> pf;    // even rank only
  double skew_residual = 0.0;             // max ||M + M^t||
  double pf_consistency = 0.0;            // max | |pf|^2 - |det M| | / max(|det M|, 1e-12)
  std::vector<int> small_vertices;        // |pf M| < zero_floor
  bool has_pfaffian() const { return rank % 2 == 0; }
};

MField m_field(const Frame& frame, const AntiUnitary& tr, double zero_floor = 1e-4);

/// Sphere: wn pf M along the equator. Torus: wn pf M(., 0) - wn pf M(., pi).
/// Throws DegenerateConfigurationError when |pf M| <= zero_floor on a
/// boundary loop (caller moves the fundamental domain and retries) and
/// DomainError for odd rank.
int km_boundary(const MField& mfield, const Grid& grid, double zero_floor = 1e-4);

struct CensusEntry {
  int plaquette = 0;
  int index = 0;
};

struct ZeroCensus {
  std::vector<CensusEntry> zeros;
  int total = 0;
  int locally_resolved = 0;  // plaquettes recounted on a subgrid
  bool same_sign() const;
};

/// Winding of pf M around every plaquette of the fundamental domain. The sum
/// telescopes to the boundary winding.
/// Throws ResolutionError when an edge increment is ambiguous (|step| within
/// 0.05 of pi) or pf M vanishes exactly at a vertex.
ZeroCensus km_census(const MField& mfield, const Grid& grid);

/// Census with local resolution: a plaquette with a Pfaffian phase step
/// above max_step is recounted on an 8x8 subgrid of its coordinate cell,
/// with a frame transported inside the cell (zeros and their indices do not
/// depend on the gauge), recursing into ambiguous subcells up to max_depth
/// levels (inside a subgrid only steps within 0.3 * 8^-depth of pi recurse). The total
/// is then an independent count, not a telescoped sum.
/// Throws ResolutionError when the depth is exhausted.
ZeroCensus km_census(const MField& mfield, const Grid& grid, const HamiltonianField& h, int first, int last,
                     double max_step = kPi / 2, int max_depth = 6);

/// max_P |F_P - F_tau(P)|.
double curvature_tr_evenness(const CurvatureField& curvature, const Grid& grid);

struct Tolerances {
  double tri_tol = 1e-9;
  double gap_floor = 1e-6;
  double zero_floor = 1e-4;
  double evenness_rel = 1e-6;  // evenness tolerance = rel * max|F| + abs
  double evenness_abs = 1e-9;
  int max_refinements = 3;
  int km_charts = 8;
  int adaptive_passes = 10;  // local subdivision rounds per refinement level

  double evenness_tol(const CurvatureField& f) const { return evenness_rel * f.max_abs_flux() + evenness_abs; }
};

struct GridSpec {
  Manifold manifold = Manifold::Sphere;
  int n_lat = 32;
  int n_lon = 64;
};

struct InvariantReport {
  int group_id = 0;
  int first = 0;
  int last = 0;
  int rank = 0;
  double min_gap = 0.0;

  int c_plaquette = 0;
  int c_winding = 0;
  bool consistent = false;  // c_plaquette == c_winding

  std::string km_status;  // "ok" | "odd_rank" | "degenerate"
  std::string km_diagnostic;
  std::optional<int> k_boundary;
  std::optional<int> k_census;
  ZeroCensus census;

  bool parity_ok = false;
  bool km_relation_ok = false;

  struct Residuals {
    double tri = 0.0;
    double frame_orthonormality = 0.0;
    double frame_span = 0.0;
    double frame_continuity = 0.0;
    double frame_seam = 0.0;
    double transition_unitarity = 0.0;
    double transition_symmetry = 0.0;  // antisymmetry (sphere) or skew (torus)
    double m_skew = 0.0;
    double pf_consistency = 0.0;
    std::optional<double> pfaffian_identity;  // sphere, even rank
    double curvature_evenness = 0.0;
    double curvature_evenness_tol = 0.0;
    std::optional<double> kramers;  // torus
  } residuals;

  struct GridInfo {
    int n_lat = 0;
    int n_lon = 0;
    int refinements = 0;
    int adaptive_passes = 0;
    int km_chart = 0;
  } grid;

  // Fields for dumps; not serialised into the report.
  CurvatureField curvature;
  std::vector<std::pair<int, double>> pf_modulus;  // (vertex, |pf M|) on the KM chart
  std::optional<Grid> km_grid;
  std::optional<Grid> chern_grid;

  bool theorems_ok() const { return consistent && parity_ok && km_relation_ok; }
};

/// Marks of row and column intervals that need subdividing: plaquettes with
/// |F_P| > hot_flux and columns whose flux over the fundamental-domain rows
/// exceeds hot_flux (a vanishing link counts as flux pi).
struct HotSpots {
  std::vector<bool> rows, cols;
  bool any() const;
};
HotSpots hot_spots(const Spectrum& spectrum, const BandGroup& group, const Grid& grid, double hot_flux = 0.3);

struct AdaptedGrid {
  Grid grid;
  Spectrum spectrum;
  int passes = 0;
};

/// Halves hot intervals (and their tau images) of `grid` until none is left,
/// tol.adaptive_passes rounds are spent or a side would exceed 8192 nodes.
AdaptedGrid adapt_grid(const HamiltonianField& h, int first, int last, Grid grid, const Tolerances& tol);

/// Full pipeline for the band group [first, last]: plaquette Chern, smooth
/// frame, transition loop(s) and winding Chern, KM index by both routes,
/// curvature evenness. Subdivides around curvature hot spots, refines the
/// whole grid on resolution errors and once on a
/// cross-method disagreement; moves the fundamental domain when pf M
/// vanishes on its boundary.
/// Throws DomainError when the field is not TRI or the group is not gapped,
/// ResolutionError when no refinement resolves it.
InvariantReport verify_group(const HamiltonianField& h, int first, int last, const GridSpec& spec,
                             const Tolerances& tol = {});

}  // namespace phasetop
