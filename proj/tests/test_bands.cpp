#include <cmath>

#include "doctest.h"
#include "fields.hpp"
#include "phasetop/errors.hpp"
#include "phasetop/invariants.hpp"
#include "phasetop/models.hpp"
#include "test_util.hpp"

using namespace phasetop;
using namespace testfields;

namespace {

HamiltonianField torus_doubled(double m) { return build(ModelSpec{TorusDoubledChernSpec{m, 0.0, 1}}); }

HamiltonianField constant_sigma_z() {
  HamiltonianField h;
  h.dim = 2;
  h.evaluate = [](const PhasePoint&) { return pauli(2); };
  return h;
}

}  // namespace

TEST_SUITE("bands") {

TEST_CASE("antiunitary validation") {
  CHECK(AntiUnitary::spin_half().fermionic_residual() < 1e-15);
  CHECK_THROWS_AS(AntiUnitary(CMatrix::Identity(2, 2)), DomainError);
  CHECK_THROWS_AS(AntiUnitary(CMatrix::Identity(3, 3)), DomainError);
  CHECK_THROWS_AS(AntiUnitary(2.0 * AntiUnitary::spin_half().matrix()), DomainError);
}

TEST_CASE("check_tri on the spin-half field and on a constant Zeeman term") {
  const Grid g(Manifold::Sphere, 8, 16);
  const TriCheck ok = check_tri(spin_half(), g);
  CHECK(ok.pass);
  CHECK(ok.max_residual < 1e-14);
  const TriCheck bad = check_tri(constant_sigma_z(), g);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_residual == doctest::Approx(2.0));
}

TEST_CASE("check_tri dimension mismatch") {
  HamiltonianField h = spin_half();
  h.tr = spin_orbital_tr();
  CHECK_THROWS_AS(check_tri(h, Grid(Manifold::Sphere, 8, 8)), DomainError);
}

TEST_CASE("symmetrize_tri") {
  const Grid g(Manifold::Sphere, 8, 16);
  const HamiltonianField same =
      symmetrize_tri(spin_half().evaluate, 2, Manifold::Sphere, AntiUnitary::spin_half());
  for (int v = 0; v < g.vertex_count(); ++v) {
    CHECK(max_abs(same.evaluate(g.point(v)) - spin_half().evaluate(g.point(v))) < 1e-14);
  }
  const HamiltonianField zero =
      symmetrize_tri(constant_sigma_z().evaluate, 2, Manifold::Sphere, AntiUnitary::spin_half());
  CHECK(max_abs(zero.evaluate({0.3, 1.0})) < 1e-15);
  const HamiltonianField random = symmetrize_tri(random_field(Manifold::Sphere, 4, 2, 9), 4, Manifold::Sphere,
                                                 spin_orbital_tr());
  CHECK(check_tri(random, g).max_residual < 1e-12);
}

TEST_CASE("gapped groups of the spin-half field") {
  const Grid g(Manifold::Sphere, 8, 16);
  const Spectrum s = spectrum_on_grid(spin_half(), g);
  const auto groups = find_gapped_groups(s);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].first == 0);
  CHECK(groups[0].last == 0);
  CHECK(groups[0].min_gap == doctest::Approx(2.0));
  CHECK(groups[1].first == 1);
}

TEST_CASE("gapped groups of the Kramers pair are rank 2") {
  const Spectrum s = spectrum_on_grid(kramers_pair(), Grid(Manifold::Sphere, 8, 16));
  const auto groups = find_gapped_groups(s);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].rank() == 2);
  CHECK(groups[1].rank() == 2);
  CHECK(band_group(s, 0, 1).min_gap == doctest::Approx(2.0));
  CHECK_THROWS_AS(band_group(s, 2, 1), DomainError);
  CHECK_THROWS_AS(band_group(s, 0, 4), DomainError);
}

TEST_CASE("gapped groups of the doubled torus model") {
  const Grid g(Manifold::Torus, 16, 16);
  const auto open = find_gapped_groups(spectrum_on_grid(torus_doubled(1.0), g));
  REQUIRE(open.size() == 2);
  CHECK(open[0].first == 0);
  CHECK(open[0].last == 1);
  // At m = 2 the gap closes at q = p = 0, a grid vertex.
  CHECK(find_gapped_groups(spectrum_on_grid(torus_doubled(2.0), g)).empty());
}

TEST_CASE("smooth frame of the spin-half lower band") {
  const Grid g(Manifold::Sphere, 16, 32);
  const Spectrum s = spectrum_on_grid(spin_half(), g);
  const Frame f = smooth_frame(s, band_group(s, 0, 0), g);
  CHECK(f.span_residual < 1e-12);
  CHECK(f.orthonormality_residual < 1e-12);
  CHECK(f.continuity_constant < 5.0);
  CHECK(f.u[0].size() == 2);
  CHECK(f.u[g.vertex_count() - 1].size() == 0);
}

TEST_CASE("smooth frame of a constant field is constant") {
  const Grid g(Manifold::Sphere, 8, 16);
  const Spectrum s = spectrum_on_grid(trivial_rank2(), g);
  const Frame f = smooth_frame(s, band_group(s, 0, 1), g);
  for (int v : g.domain().vertices) CHECK(max_abs(f.u[v] - f.u[0]) < 1e-12);
}

TEST_CASE("torus frame closes across the q seam") {
  const Grid g(Manifold::Torus, 16, 16);
  const Spectrum s = spectrum_on_grid(torus_doubled(1.0), g);
  const Frame f = smooth_frame(s, band_group(s, 0, 1), g);
  CHECK(f.seam_residual < 1e-8);
  CHECK(f.span_residual < 1e-12);
}

TEST_CASE("transition loop of the spin-half lower band") {
  const Grid g(Manifold::Sphere, 16, 32);
  const Spectrum s = spectrum_on_grid(spin_half(), g);
  const BandGroup group = band_group(s, 0, 0);
  const TransitionLoop u = transition_loop_sphere(smooth_frame(s, group, g), g, AntiUnitary::spin_half());
  CHECK(u.size() == 32);
  CHECK(u.unitarity_residual() < 1e-12);
  CHECK(u.antisymmetry_residual() < 1e-12);
  const int wn = chern_winding_sphere(u);
  CHECK(std::abs(wn) == 1);
  CHECK(wn == chern_plaquette(s, group, g).chern);
}

TEST_CASE("transition loop of a trivial rank-2 bundle has even winding") {
  const Grid g(Manifold::Sphere, 8, 16);
  const Spectrum s = spectrum_on_grid(trivial_rank2(), g);
  const TransitionLoop u = transition_loop_sphere(smooth_frame(s, band_group(s, 0, 1), g), g, spin_orbital_tr());
  CHECK(u.antisymmetry_residual() < 1e-12);
  CHECK(chern_winding_sphere(u) == 0);
}

TEST_CASE("torus transition loops are skew") {
  const HamiltonianField h = torus_doubled(1.0);
  const AdaptedGrid adapted = adapt_grid(h, 0, 1, Grid(Manifold::Torus, 16, 16), Tolerances{});
  const Grid& g = adapted.grid;
  const Spectrum& s = adapted.spectrum;
  const auto [plus, minus] = transition_loops_torus(smooth_frame(s, band_group(s, 0, 1), g), g, h.tr);
  CHECK(plus.skew_residual() < 1e-10);
  CHECK(minus.skew_residual() < 1e-10);
  CHECK(std::abs(chern_winding_torus(plus, minus)) == 2);
}

TEST_CASE("Kramers degeneracy on the TRI lines") {
  const Grid g(Manifold::Torus, 16, 16);
  CHECK(kramers_check(spectrum_on_grid(torus_doubled(1.0), g), g) < 1e-10);
  HamiltonianField broken = torus_doubled(1.0);
  const FieldEvaluator base = broken.evaluate;
  const CMatrix zeeman = kron(pauli(2), CMatrix::Identity(2, 2));
  broken.evaluate = [base, zeeman](const PhasePoint& x) { return CMatrix(base(x) + 0.5 * zeeman); };
  CHECK(kramers_check(spectrum_on_grid(broken, g), g) > 0.1);
  const Grid sphere(Manifold::Sphere, 8, 8);
  CHECK_THROWS_AS(kramers_check(spectrum_on_grid(spin_half(), sphere), sphere), DomainError);
}

}  // TEST_SUITE
