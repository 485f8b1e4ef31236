#include "phasetop/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phasetop/errors.hpp"
#include "phasetop/numkit.hpp"

namespace phasetop {

namespace {

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

int mod(int a, int n) { return ((a % n) + n) % n; }

}  // namespace

std::string to_string(Manifold m) { return m == Manifold::Sphere ? "sphere" : "torus"; }

Manifold manifold_from_string(const std::string& name) {
  if (name == "sphere") return Manifold::Sphere;
  if (name == "torus") return Manifold::Torus;
  throw ConfigError("unknown manifold '" + name + "' (expected sphere or torus)");
}

PhasePoint tr_image(Manifold m, const PhasePoint& x) {
  if (m == Manifold::Sphere) return {kPi - x.a, wrap_angle(x.b + kPi)};
  return {x.a, wrap_angle(-x.b)};
}

Eigen::Vector3d unit_vector(const PhasePoint& x) {
  return {std::sin(x.a) * std::cos(x.b), std::sin(x.a) * std::sin(x.b), std::cos(x.a)};
}

PhasePoint sphere_point(const Eigen::Vector3d& n) {
  const double z = std::clamp(n.z() / n.norm(), -1.0, 1.0);
  const double rho = std::hypot(n.x(), n.y());
  return {std::acos(z), rho == 0.0 ? 0.0 : wrap_angle(std::atan2(n.y(), n.x()))};
}

Chart Chart::numbered(Manifold m, int index, int n_lat, int n_lon) {
  Chart chart;
  chart.index = index;
  if (index == 0) return chart;
  if (m == Manifold::Sphere) {
    const double golden = 0.5 * (1.0 + std::sqrt(5.0));
    Eigen::Vector3d axis(std::cos(golden * index), std::sin(golden * index), 0.3 + 0.1 * index);
    chart.rotation = Eigen::AngleAxisd(0.41 + 0.73 * index, axis.normalized()).toRotationMatrix();
  } else {
    const double frac = std::fmod(0.6180339887498949 * index, 1.0);
    chart.q_shift = frac * kTwoPi / n_lon;
    chart.p_warp = 0.5 * std::fmod(0.4142135623730951 * index, 1.0) * kTwoPi / n_lat;
  }
  return chart;
}

namespace {

std::vector<double> uniform_nodes(int count, double step) {
  std::vector<double> nodes(count);
  for (int k = 0; k < count; ++k) nodes[k] = step * k;
  return nodes;
}

void check_subdivisions(int n_lat, int n_lon) {
  if (n_lat < 8 || n_lon < 8 || n_lat % 2 != 0 || n_lon % 2 != 0) {
    std::ostringstream msg;
    msg << "grid subdivisions must be even and >= 8 (got " << n_lat << "x" << n_lon << ")";
    throw ConfigError(msg.str());
  }
}

std::vector<double> uniform_lat_nodes(Manifold m, int n_lat, int n_lon) {
  check_subdivisions(n_lat, n_lon);
  return m == Manifold::Sphere ? uniform_nodes(n_lat + 1, kPi / n_lat) : uniform_nodes(n_lat, kTwoPi / n_lat);
}

// Nodes of the first `half_intervals` intervals with the marked ones cut into
// `parts` pieces, completed to the whole range by `mirror`.
template <class Mirror>
std::vector<double> subdivide_half(const std::vector<double>& nodes, double period, const std::vector<bool>& marks,
                                   int parts, int half_intervals, Mirror mirror) {
  std::vector<double> half;
  for (int k = 0; k < half_intervals; ++k) {
    const double a = nodes[k];
    const double b = k + 1 < static_cast<int>(nodes.size()) ? nodes[k + 1] : period;
    half.push_back(a);
    if (marks[k]) {
      for (int m = 1; m < parts; ++m) half.push_back(a + (b - a) * m / parts);
    }
  }
  return mirror(std::move(half));
}

}  // namespace

Grid::Grid(Manifold manifold, int n_lat, int n_lon, Chart chart)
    : Grid(manifold, uniform_lat_nodes(manifold, n_lat, n_lon), uniform_nodes(n_lon, kTwoPi / n_lon),
           std::move(chart)) {}

Grid::Grid(Manifold manifold, std::vector<double> lat_nodes, std::vector<double> lon_nodes, Chart chart)
    : manifold_(manifold),
      n_lat_(static_cast<int>(lat_nodes.size()) - (manifold == Manifold::Sphere ? 1 : 0)),
      n_lon_(static_cast<int>(lon_nodes.size())),
      chart_(std::move(chart)),
      lat_nodes_(std::move(lat_nodes)),
      lon_nodes_(std::move(lon_nodes)) {
  check_subdivisions(n_lat_, n_lon_);
  const int n_lat = n_lat_, n_lon = n_lon_;
  const int half_lon = n_lon / 2;
  constexpr double kSymTol = 1e-12;
  auto fail = [](const char* what) { throw DomainError(std::string("grid nodes: ") + what); };
  for (std::size_t k = 1; k < lat_nodes_.size(); ++k) {
    if (!(lat_nodes_[k] > lat_nodes_[k - 1])) fail("latitude nodes must increase");
  }
  for (std::size_t k = 1; k < lon_nodes_.size(); ++k) {
    if (!(lon_nodes_[k] > lon_nodes_[k - 1])) fail("longitude nodes must increase");
  }
  if (lon_nodes_.front() != 0.0 || lon_nodes_.back() >= kTwoPi) fail("longitude nodes must lie in [0, 2pi) from 0");
  if (lat_nodes_.front() != 0.0) fail("latitude nodes must start at 0");
  if (manifold_ == Manifold::Sphere) {
    for (int j = 0; j < half_lon; ++j) {
      if (std::abs(lon_nodes_[j + half_lon] - lon_nodes_[j] - kPi) > kSymTol) {
        fail("longitude nodes must be invariant under phi -> phi + pi");
      }
    }
    if (std::abs(lat_nodes_.back() - kPi) > kSymTol) fail("latitude nodes must end at pi");
    for (int i = 0; i <= n_lat; ++i) {
      if (std::abs(lat_nodes_[i] + lat_nodes_[n_lat - i] - kPi) > kSymTol) {
        fail("latitude nodes must be invariant under theta -> pi - theta");
      }
    }
  } else {
    if (lat_nodes_.back() >= kTwoPi) fail("p nodes must lie in [0, 2pi)");
    for (int i = 1; i < n_lat; ++i) {
      if (std::abs(lat_nodes_[i] + lat_nodes_[n_lat - i] - kTwoPi) > kSymTol) {
        fail("p nodes must be invariant under p -> -p");
      }
    }
  }

  if (manifold_ == Manifold::Sphere) {
    vertex_count_ = 2 + (n_lat - 1) * n_lon;
    rows_.resize(vertex_count_);
    cols_.resize(vertex_count_);
    points_.resize(vertex_count_);
    tr_vertex_.resize(vertex_count_);
    for (int v = 0; v < vertex_count_; ++v) {
      int row, col;
      if (v == 0) {
        row = 0, col = 0;
      } else if (v == vertex_count_ - 1) {
        row = n_lat, col = 0;
      } else {
        row = 1 + (v - 1) / n_lon, col = (v - 1) % n_lon;
      }
      rows_[v] = row;
      cols_[v] = col;
      points_[v] = point_at(lat_nodes_[row], lon_nodes_[col]);
      tr_vertex_[v] = vertex(n_lat - row, col + half_lon);
    }
    for (int i = 0; i < n_lat; ++i) {
      for (int j = 0; j < n_lon; ++j) {
        Plaquette p{i, j, {}};
        const int a = vertex(i, j), b = vertex(i + 1, j), c = vertex(i + 1, j + 1),
                  d = vertex(i, j + 1);
        if (i == 0) {
          p.corners = {a, b, c};
        } else if (i == n_lat - 1) {
          p.corners = {a, b, d};
        } else {
          p.corners = {a, b, c, d};
        }
        plaquettes_.push_back(std::move(p));
      }
    }
    for (const auto& p : plaquettes_) {
      tr_plaquette_.push_back((n_lat - 1 - p.row) * n_lon + mod(p.col + half_lon, n_lon));
    }
    for (int i = 0; i < n_lat; ++i) {
      for (int j = 0; j < n_lon; ++j) {
        if (i == 0) {
          edges_.emplace_back(vertex(0, 0), vertex(1, j));
        } else {
          edges_.emplace_back(vertex(i, j), vertex(i + 1, j));
          edges_.emplace_back(vertex(i, j), vertex(i, j + 1));
        }
      }
    }
  } else {
    vertex_count_ = n_lat * n_lon;
    rows_.resize(vertex_count_);
    cols_.resize(vertex_count_);
    points_.resize(vertex_count_);
    tr_vertex_.resize(vertex_count_);
    for (int v = 0; v < vertex_count_; ++v) {
      const int row = v / n_lon, col = v % n_lon;
      rows_[v] = row;
      cols_[v] = col;
      points_[v] = point_at(lat_nodes_[row], lon_nodes_[col]);
      tr_vertex_[v] = vertex(mod(n_lat - row, n_lat), col);
    }
    for (int i = 0; i < n_lat; ++i) {
      for (int j = 0; j < n_lon; ++j) {
        plaquettes_.push_back(
            {i, j, {vertex(i, j), vertex(i, j + 1), vertex(i + 1, j + 1), vertex(i + 1, j)}});
        edges_.emplace_back(vertex(i, j), vertex(i, j + 1));
        edges_.emplace_back(vertex(i, j), vertex(i + 1, j));
      }
    }
    for (const auto& p : plaquettes_) {
      tr_plaquette_.push_back(mod(n_lat - 1 - p.row, n_lat) * n_lon + p.col);
    }
  }
}

PhasePoint Grid::point_at(double lat, double lon) const {
  if (manifold_ == Manifold::Sphere) return sphere_point(chart_.rotation * unit_vector({lat, lon}));
  return {wrap_angle(lon + chart_.q_shift), wrap_angle(lat + chart_.p_warp * std::sin(lat))};
}

int Grid::vertex(int row, int col) const {
  col = mod(col, n_lon_);
  if (manifold_ == Manifold::Sphere) {
    if (row == 0) return 0;
    if (row == n_lat_) return vertex_count_ - 1;
    return 1 + (row - 1) * n_lon_ + col;
  }
  return mod(row, n_lat_) * n_lon_ + col;
}

double Grid::lat_interval(int i) const {
  const double end = i + 1 < static_cast<int>(lat_nodes_.size()) ? lat_nodes_[i + 1] : kTwoPi;
  return end - lat_nodes_[i];
}

double Grid::lon_interval(int j) const {
  const double end = j + 1 < n_lon_ ? lon_nodes_[j + 1] : kTwoPi;
  return end - lon_nodes_[j];
}

double Grid::spacing() const {
  double worst = 0.0;
  for (int i = 0; i < n_lat_; ++i) worst = std::max(worst, lat_interval(i));
  for (int j = 0; j < n_lon_; ++j) worst = std::max(worst, lon_interval(j));
  return worst;
}

double Grid::distance(int a, int b) const {
  if (manifold_ == Manifold::Sphere) {
    const Eigen::Vector3d x = unit_vector(points_[a]), y = unit_vector(points_[b]);
    return std::atan2(x.cross(y).norm(), x.dot(y));
  }
  auto wrapped = [](double d) {
    d = std::fmod(std::abs(d), kTwoPi);
    return std::min(d, kTwoPi - d);
  };
  return std::hypot(wrapped(points_[a].a - points_[b].a), wrapped(points_[a].b - points_[b].b));
}

Grid Grid::subdivided(const std::vector<bool>& rows, const std::vector<bool>& cols, int parts) const {
  if (static_cast<int>(rows.size()) != n_lat_ || static_cast<int>(cols.size()) != n_lon_ || parts < 2) {
    throw DomainError("Grid::subdivided: one mark per interval and parts >= 2 required");
  }
  const int half_lat = n_lat_ / 2, half_lon = n_lon_ / 2;
  std::vector<bool> row_marks(n_lat_), col_marks(n_lon_);
  for (int i = 0; i < n_lat_; ++i) row_marks[i] = rows[i] || rows[n_lat_ - 1 - i];
  for (int j = 0; j < n_lon_; ++j) {
    col_marks[j] = cols[j] || cols[mod(j + half_lon, n_lon_)];  // keeps n_lon even on the torus too
  }

  std::vector<double> lat, lon;
  if (manifold_ == Manifold::Sphere) {
    lat = subdivide_half(lat_nodes_, kPi, row_marks, parts, half_lat, [](std::vector<double> half) {
      const std::size_t n = half.size();
      half.push_back(kPi / 2);
      for (std::size_t k = n; k-- > 0;) half.push_back(kPi - half[k]);
      return half;
    });
    lon = subdivide_half(lon_nodes_, kTwoPi, col_marks, parts, half_lon, [](std::vector<double> half) {
      const std::size_t n = half.size();
      for (std::size_t k = 0; k < n; ++k) half.push_back(half[k] + kPi);
      return half;
    });
  } else {
    lat = subdivide_half(lat_nodes_, kTwoPi, row_marks, parts, half_lat, [](std::vector<double> half) {
      const std::size_t n = half.size();
      half.push_back(kPi);
      for (std::size_t k = n; k-- > 1;) half.push_back(kTwoPi - half[k]);
      return half;
    });
    lon = subdivide_half(lon_nodes_, kTwoPi, col_marks, parts, n_lon_, [](std::vector<double> all) { return all; });
  }
  return Grid(manifold_, std::move(lat), std::move(lon), chart_);
}

Grid Grid::refined() const {
  return subdivided(std::vector<bool>(n_lat_, true), std::vector<bool>(n_lon_, true), 2);
}

FundamentalDomain Grid::domain() const {
  FundamentalDomain d;
  d.manifold = manifold_;
  d.boundary_row = boundary_row();
  for (int v = 0; v < vertex_count_; ++v) {
    if (rows_[v] <= d.boundary_row) d.vertices.push_back(v);
  }
  for (int p = 0; p < static_cast<int>(plaquettes_.size()); ++p) {
    if (plaquettes_[p].row < d.boundary_row) d.plaquettes.push_back(p);
  }
  auto row_loop = [&](int row) {
    std::vector<int> loop;
    for (int j = 0; j < n_lon_; ++j) loop.push_back(vertex(row, j));
    return loop;
  };
  if (manifold_ == Manifold::Sphere) {
    d.boundary_loops.push_back(row_loop(d.boundary_row));
  } else {
    d.boundary_loops.push_back(row_loop(0));
    d.boundary_loops.push_back(row_loop(d.boundary_row));
  }
  return d;
}

Grid build_grid(Manifold manifold, int n_lat, int n_lon) { return Grid(manifold, n_lat, n_lon); }

std::vector<std::vector<int>> boundary_loop_samples(const FundamentalDomain& domain) {
  return domain.boundary_loops;
}

}  // namespace phasetop
