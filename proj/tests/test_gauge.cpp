#include <cmath>

#include "doctest.h"
#include "fields.hpp"
#include "phasetop/errors.hpp"
#include "phasetop/gauge.hpp"
#include "phasetop/invariants.hpp"
#include "phasetop/models.hpp"

using namespace phasetop;
using namespace testfields;

namespace {

const cplx I1{0.0, 1.0};

GaugeLoop sampled_gauge(int n, const std::function<CMatrix(double)>& f) {
  GaugeLoop w;
  for (int j = 0; j < n; ++j) w.samples.push_back(f(kTwoPi * j / n));
  return w;
}

struct Equator {
  Grid grid;
  Frame frame;
  TransitionLoop u;
  int c = 0;
};

Equator equator_of(const HamiltonianField& h, int first, int last, int n_lat, int n_lon) {
  const Grid g(Manifold::Sphere, n_lat, n_lon);
  const Spectrum s = spectrum_on_grid(h, g);
  const BandGroup group = band_group(s, first, last);
  Frame f = smooth_frame(s, group, g);
  TransitionLoop u = transition_loop_sphere(f, g, h.tr);
  const int c = chern_winding_sphere(u);
  return {g, std::move(f), std::move(u), c};
}

}  // namespace

TEST_SUITE("gauge") {

TEST_CASE("normal-form loops") {
  const TransitionLoop v11 = normal_form_loop({1, 1, 64, {}});
  CHECK(v11.antisymmetry_residual() < 1e-14);
  CHECK(std::abs(v11.samples[16](0, 0) - std::exp(I1 * kPi / 2.0)) < 1e-14);

  const TransitionLoop v22 = normal_form_loop({2, 2, 64, {}});
  CHECK(v22.antisymmetry_residual() < 1e-14);
  for (int j = 0; j < 64; ++j) {
    const cplx phase = std::exp(I1 * (kTwoPi * j / 64));
    CHECK(std::abs(v22.samples[j](0, 0) - phase) < 1e-14);
    CHECK(std::abs(v22.samples[j](1, 1) - phase) < 1e-14);
    CHECK(std::abs(v22.samples[j](0, 1)) < 1e-14);
  }
  CHECK(chern_winding_sphere(v22) == 2);
}

TEST_CASE("normal-form parity and sampling errors") {
  CHECK_THROWS_AS(normal_form_loop({0, 1, 64, {}}), DomainError);
  CHECK_THROWS_AS(normal_form_loop({1, 2, 64, {}}), DomainError);
  CHECK_THROWS_AS(normal_form_loop({1, 1, 63, {}}), DomainError);
  CHECK_THROWS_AS(normal_form_loop({1, 1, 8, {0.0, 1.0}}), DomainError);
}

TEST_CASE("equator gauge between identical loops") {
  const TransitionLoop v = normal_form_loop({3, 1, 64, {}});
  const GaugeLoop w = solve_equator_gauge(v, v);
  CHECK(max_abs(w.samples[0] - CMatrix::Identity(1, 1)) < 1e-12);
  CHECK(w.relation_residual < 1e-12);
  CHECK(w.residual_at_pi < 1e-12);
  CHECK(w.residual_at_2pi < 1e-12);
  CHECK(winding_obstruction(w) == 0);
}

TEST_CASE("equator gauge of the spin-half band against its normal form") {
  const Equator e = equator_of(spin_half(), 0, 0, 32, 64);
  const TransitionLoop v = normal_form_loop({e.c, 1, 64, e.grid.lon_nodes()});
  const GaugeLoop w = solve_equator_gauge(e.u, v);
  CHECK(w.residual_at_pi <= 1e-8);
  CHECK(w.residual_at_2pi <= 1e-8);
  CHECK(w.relation_residual <= 1e-8);
  CHECK(winding_obstruction(w) == 0);

  const DiskExtension disk = extend_to_disk(w, e.grid);
  CHECK(disk.boundary_mismatch < 1e-8);
  CHECK(disk.unitarity < 1e-10);
  CHECK(disk.max_step <= 0.2);
  const TransitionLoop fixed = transition_loop_sphere(apply_gauge(e.frame, disk.values), e.grid, AntiUnitary::spin_half());
  double mismatch = 0.0;
  for (int j = 0; j < 64; ++j) mismatch = std::max(mismatch, max_abs(fixed.samples[j] - v.samples[j]));
  CHECK(mismatch <= 1e-6);
}

TEST_CASE("equator gauge of the Kramers pair at epsilon 0.1") {
  const HamiltonianField h = build(ModelSpec{KramersPairSphereSpec{0.1, 1}});
  const Equator e = equator_of(h, 0, 1, 32, 64);
  const TransitionLoop v = normal_form_loop({e.c, 2, 64, e.grid.lon_nodes()});
  const GaugeLoop w = solve_equator_gauge(e.u, v);
  CHECK(w.residual_at_pi <= 1e-8);
  CHECK(w.residual_at_2pi <= 1e-8);
  CHECK(winding_obstruction(w) == 0);
}

TEST_CASE("mismatched Chern number gives a unit obstruction") {
  const TransitionLoop u = normal_form_loop({1, 1, 64, {}});
  const TransitionLoop v = normal_form_loop({3, 1, 64, {}});
  const GaugeLoop w = solve_equator_gauge(u, v);
  CHECK(std::abs(winding_obstruction(w)) == 1);
  CHECK_THROWS_AS(extend_to_disk(w, Grid(Manifold::Sphere, 16, 64)), DomainError);
}

TEST_CASE("obstruction of hand-built gauge loops") {
  const GaugeLoop winding = sampled_gauge(64, [](double t) {
    CMatrix m = CMatrix::Identity(2, 2);
    m(0, 0) = std::exp(I1 * t);
    return m;
  });
  CHECK(winding_obstruction(winding) == 1);
  const GaugeLoop flat = sampled_gauge(64, [](double) { return CMatrix(CMatrix::Identity(2, 2)); });
  CHECK(winding_obstruction(flat) == 0);
}

TEST_CASE("solver rejects mismatched inputs") {
  CHECK_THROWS_AS(solve_equator_gauge(normal_form_loop({1, 1, 64, {}}), normal_form_loop({2, 2, 64, {}})),
                  DomainError);
  CHECK_THROWS_AS(solve_equator_gauge(normal_form_loop({1, 1, 64, {}}), normal_form_loop({1, 1, 32, {}})),
                  DomainError);
}

TEST_CASE("disk extension of the identity loop is the identity") {
  const Grid g(Manifold::Sphere, 16, 32);
  const GaugeLoop w = sampled_gauge(32, [](double) { return CMatrix(CMatrix::Identity(2, 2)); });
  const DiskExtension disk = extend_to_disk(w, g);
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.row_of(v) <= g.boundary_row()) CHECK(max_abs(disk.values[v] - CMatrix::Identity(2, 2)) < 1e-12);
  }
  CHECK(disk.max_step < 1e-12);
}

TEST_CASE("disk extension of exp(i sin phi) matches exp(i r sin phi)") {
  const Grid g(Manifold::Sphere, 16, 32);
  const GaugeLoop w = sampled_gauge(32, [](double t) { return CMatrix(CMatrix::Constant(1, 1, std::exp(I1 * std::sin(t)))); });
  const DiskExtension disk = extend_to_disk(w, g);
  CHECK(disk.boundary_mismatch < 1e-12);
  CHECK(disk.max_step <= 0.2);
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.row_of(v) > g.boundary_row()) continue;
    const double r = g.lat_node(g.row_of(v)) / g.lat_node(g.boundary_row());
    const cplx explicit_value = std::exp(I1 * r * std::sin(g.lon_node(g.col_of(v))));
    CHECK(std::abs(disk.values[v](0, 0) - explicit_value) < 1e-2);
  }
}

TEST_CASE("disk extension needs a sphere grid") {
  const GaugeLoop w = sampled_gauge(8, [](double) { return CMatrix(CMatrix::Identity(1, 1)); });
  CHECK_THROWS_AS(extend_to_disk(w, Grid(Manifold::Torus, 8, 8)), DomainError);
}

TEST_CASE("skew normal form of the doubled torus loops") {
  const HamiltonianField h = build(ModelSpec{TorusDoubledChernSpec{1.0, 0.0, 1}});
  const AdaptedGrid adapted = adapt_grid(h, 0, 1, Grid(Manifold::Torus, 32, 32), Tolerances{});
  const Grid& g = adapted.grid;
  const Spectrum& s = adapted.spectrum;
  const BandGroup group = band_group(s, 0, 1);
  const auto [plus, minus] = transition_loops_torus(smooth_frame(s, group, g), g, h.tr);
  const int c = chern_winding_torus(plus, minus);
  REQUIRE(std::abs(c) == 2);
  const SkewNormalForm snf = skew_normal_form(plus, minus, c);
  CHECK(snf.congruence_residual <= 1e-8);
  CHECK(snf.bookkeeping_ok);
  CHECK(snf.extension_obstruction() == 0);
  CHECK(snf.target_plus.skew_residual() < 1e-12);
  CHECK(snf.wn_det_v_plus - snf.wn_det_v_minus == c);

  const SkewNormalForm wrong = skew_normal_form(plus, minus, c + 2);
  CHECK(wrong.bookkeeping_ok);
  CHECK(wrong.extension_obstruction() != 0);
  CHECK_THROWS_AS(skew_normal_form(plus, minus, 1), DomainError);
}

}  // TEST_SUITE
