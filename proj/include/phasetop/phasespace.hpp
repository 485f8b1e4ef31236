#pragma once

// Phase-space manifolds (two-sphere, two-torus), their time-reversal
// involutions, tau-closed grids, fundamental domains and boundary loops.
//
// Orientation: d(theta) ^ d(phi) on the sphere and dq ^ dp on the torus are
// positive. Every Chern sign reported by the library is relative to this.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace phasetop {

enum class Manifold { Sphere, Torus };

std::string to_string(Manifold m);
Manifold manifold_from_string(const std::string& name);  // "sphere" | "torus"

/// Sphere: (a, b) = (theta, phi). Torus: (a, b) = (q, p).
struct PhasePoint {
  double a = 0.0;
  double b = 0.0;
};

/// Time-reversal image: antipode on the sphere, p -> -p on the torus.
/// Angles are returned reduced to [0, 2pi).
PhasePoint tr_image(Manifold m, const PhasePoint& x);

/// Unit vector of a sphere point.
Eigen::Vector3d unit_vector(const PhasePoint& x);
PhasePoint sphere_point(const Eigen::Vector3d& n);

/// Where the grid sits in the manifold. On the sphere the standard grid is
/// rotated rigidly (the antipodal map commutes with rotations); on the torus
/// the grid is shifted along q (p-lines 0 and pi must stay grid lines).
struct Chart {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  double q_shift = 0.0;
  double p_warp = 0.0;  // torus: p -> p + p_warp * sin(p), odd so tau still maps rows to rows
  int index = 0;

  /// Deterministic family of charts; index 0 is the identity chart.
  static Chart numbered(Manifold m, int index, int n_lat, int n_lon);
};

struct Plaquette {
  int row = 0;
  int col = 0;
  std::vector<int> corners;  // 3 (pole triangle) or 4, in coordinate orientation
};

struct FundamentalDomain {
  Manifold manifold = Manifold::Sphere;
  int boundary_row = 0;             // equator (sphere) or p = pi row (torus)
  std::vector<int> vertices;        // closed domain
  std::vector<int> plaquettes;      // plaquettes inside the domain
  std::vector<std::vector<int>> boundary_loops;
};

/// Tau-closed tensor-product grid.
///
/// Sphere: rows i = 0..n_lat at theta = lat_node(i); rows 0 and n_lat are the
/// poles (single vertices); other rows carry n_lon vertices at
/// phi = lon_node(j). Plaquette (i, j) spans rows i..i+1, columns j..j+1;
/// rows 0 and n_lat-1 are triangles.
///
/// Torus: rows i = 0..n_lat-1 at p = lat_node(i), columns at
/// q = lon_node(j) (+ chart shift), both periodic.
///
/// Nodes may be nonuniform but must be mapped onto themselves by tau.
class Grid {
 public:
  /// Throws ConfigError unless n_lat and n_lon are even and >= 8.
  Grid(Manifold manifold, int n_lat, int n_lon, Chart chart = {});
  /// Explicit nodes. Sphere latitudes run 0..pi inclusive, torus p nodes and
  /// all longitudes start at 0 and stay below 2*pi. Throws DomainError when
  /// the nodes are not increasing or not tau-symmetric.
  Grid(Manifold manifold, std::vector<double> lat_nodes, std::vector<double> lon_nodes, Chart chart = {});

  Manifold manifold() const { return manifold_; }
  int n_lat() const { return n_lat_; }
  int n_lon() const { return n_lon_; }
  const Chart& chart() const { return chart_; }

  int vertex_count() const { return vertex_count_; }
  int vertex(int row, int col) const;  // col taken modulo n_lon
  int row_of(int v) const { return rows_[v]; }
  int col_of(int v) const { return cols_[v]; }

  /// Phase-space point of a vertex (chart applied).
  const PhasePoint& point(int v) const { return points_[v]; }
  /// Phase-space point at grid coordinates (theta, phi) or (p, q), chart applied.
  PhasePoint point_at(double lat, double lon) const;

  const std::vector<Plaquette>& plaquettes() const { return plaquettes_; }
  int tr_vertex(int v) const { return tr_vertex_[v]; }
  int tr_plaquette(int p) const { return tr_plaquette_[p]; }

  /// Neighbouring vertex pairs (each undirected edge once).
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  double lat_node(int i) const { return lat_nodes_[i]; }
  double lon_node(int j) const { return lon_nodes_[j]; }
  const std::vector<double>& lat_nodes() const { return lat_nodes_; }
  const std::vector<double>& lon_nodes() const { return lon_nodes_; }
  /// Widths of row interval i and column interval j (periodic ones wrap).
  double lat_interval(int i) const;
  double lon_interval(int j) const;

  /// Largest coordinate spacing.
  double spacing() const;
  /// Geodesic (sphere) or flat periodic (torus) distance between vertices.
  double distance(int a, int b) const;

  /// Equator row (sphere) or the p = pi row (torus).
  int boundary_row() const { return n_lat_ / 2; }

  FundamentalDomain domain() const;

  /// Marked row and column intervals (and their tau images) cut into
  /// `parts` equal pieces.
  Grid subdivided(const std::vector<bool>& rows, const std::vector<bool>& cols, int parts) const;
  Grid refined() const;
  Grid with_chart(const Chart& chart) const { return Grid(manifold_, lat_nodes_, lon_nodes_, chart); }

 private:
  Manifold manifold_;
  int n_lat_;
  int n_lon_;
  Chart chart_;
  int vertex_count_ = 0;
  std::vector<int> rows_, cols_;
  std::vector<PhasePoint> points_;
  std::vector<Plaquette> plaquettes_;
  std::vector<int> tr_vertex_, tr_plaquette_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<double> lat_nodes_, lon_nodes_;
};

Grid build_grid(Manifold manifold, int n_lat, int n_lon);

/// Sphere: the equator in increasing phi. Torus: rows p = 0 and p = pi in
/// increasing q.
std::vector<std::vector<int>> boundary_loop_samples(const FundamentalDomain& domain);

}  // namespace phasetop
