#include <cmath>

#include "doctest.h"
#include "fields.hpp"
#include "phasetop/errors.hpp"
#include "phasetop/models.hpp"

using namespace phasetop;
using namespace testfields;

namespace {

const cplx I1{0.0, 1.0};

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

ModelSpec rotor(double j, double eps = 0.0, std::uint64_t seed = 1) { return ModelSpec{RotorSpinSpec{j, eps, seed}}; }

}  // namespace

TEST_SUITE("models") {

TEST_CASE("spin matrices satisfy the angular momentum algebra") {
  for (double j : {0.5, 1.0, 1.5}) {
    const SpinMatrices s = spin_matrices(j);
    CHECK(max_abs(commutator(s.x, s.y) - I1 * s.z) < 1e-12);
    CHECK(max_abs(commutator(s.y, s.z) - I1 * s.x) < 1e-12);
    const CMatrix casimir = s.x * s.x + s.y * s.y + s.z * s.z;
    CHECK(max_abs(casimir - j * (j + 1) * CMatrix::Identity(casimir.rows(), casimir.cols())) < 1e-12);
  }
}

TEST_CASE("rotor spin-half is n.J") {
  const HamiltonianField h = build(rotor(0.5));
  CHECK(h.dim == 2);
  CHECK(h.tr.fermionic_residual() < 1e-12);
  const Grid g(Manifold::Sphere, 8, 16);
  for (int v = 0; v < g.vertex_count(); ++v) {
    CHECK(max_abs(h.evaluate(g.point(v)) - 0.5 * n_dot_sigma(unit_vector(g.point(v)))) < 1e-12);
  }
  CHECK(check_tri(h, g).pass);
}

TEST_CASE("rotor spin-3/2 spectrum") {
  const HamiltonianField h = build(rotor(1.5));
  CHECK(h.dim == 4);
  const EigenSystem es = eigh(h.evaluate({0.7, 2.0}));
  for (int k = 0; k < 4; ++k) CHECK(es.values(k) == doctest::Approx(-1.5 + k));
  CHECK(check_tri(h, Grid(Manifold::Sphere, 8, 16)).pass);
}

TEST_CASE("perturbed models stay TRI") {
  const Grid sphere(Manifold::Sphere, 8, 16);
  CHECK(check_tri(build(rotor(0.5, 0.2, 4)), sphere).pass);
  CHECK(check_tri(build(ModelSpec{KramersPairSphereSpec{0.1, 3}}), sphere).pass);
  CHECK(check_tri(build(ModelSpec{RandomTriSpec{Manifold::Sphere, 4, 2, 5}}), sphere).pass);
  const Grid torus(Manifold::Torus, 8, 8);
  CHECK(check_tri(build(ModelSpec{TorusDoubledChernSpec{1.0, 0.1, 2}}), torus).pass);
  CHECK(check_tri(build(ModelSpec{RandomTriSpec{Manifold::Torus, 4, 2, 5}}), torus).pass);
}

TEST_CASE("TRI-broken control has residual twice its strength") {
  TriBrokenControlSpec broken;
  broken.base = std::make_shared<const ModelSpec>(rotor(0.5));
  broken.breaking_strength = 0.25;
  const TriCheck tri = check_tri(build(ModelSpec{broken}), Grid(Manifold::Sphere, 8, 16));
  CHECK_FALSE(tri.pass);
  CHECK(tri.max_residual == doctest::Approx(0.5));
}

TEST_CASE("builds are deterministic") {
  const HamiltonianField a = build(ModelSpec{RandomTriSpec{Manifold::Sphere, 4, 2, 17}});
  const HamiltonianField b = build(ModelSpec{RandomTriSpec{Manifold::Sphere, 4, 2, 17}});
  const HamiltonianField c = build(ModelSpec{RandomTriSpec{Manifold::Sphere, 4, 2, 18}});
  const PhasePoint x{0.4, 1.3};
  CHECK(max_abs(a.evaluate(x) - b.evaluate(x)) == 0.0);
  CHECK(max_abs(a.evaluate(x) - c.evaluate(x)) > 1e-6);
}

TEST_CASE("random fields are bounded") {
  const FieldEvaluator b = random_field(Manifold::Torus, 4, 2, 3);
  const Grid g(Manifold::Torus, 16, 16);
  for (int v = 0; v < g.vertex_count(); ++v) CHECK(b(g.point(v)).operatorNorm() <= 1.0 + 1e-12);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(build(rotor(1.0)), ConfigError);
  CHECK_THROWS_AS(build(rotor(0.3)), ConfigError);
  CHECK_THROWS_AS(build(rotor(0.5, -0.1)), ConfigError);
  CHECK_THROWS_AS(build(ModelSpec{RandomTriSpec{Manifold::Sphere, 3, 2, 1}}), ConfigError);
  CHECK_THROWS_AS(build(ModelSpec{RandomTriSpec{Manifold::Sphere, 4, -1, 1}}), ConfigError);
}

TEST_CASE("interpolation endpoints") {
  const HamiltonianField h0 = build(rotor(0.5));
  const HamiltonianField h1 = build(rotor(0.5, 0.3, 2));
  const PhasePoint x{1.0, 0.2};
  CHECK(max_abs(interpolate(h0, h1, 0.0).evaluate(x) - h0.evaluate(x)) < 1e-15);
  CHECK(max_abs(interpolate(h0, h1, 1.0).evaluate(x) - h1.evaluate(x)) < 1e-15);
}

TEST_CASE("path between perturbed rotors keeps c") {
  const TriPath path = tri_path(build(rotor(0.5)), build(rotor(0.5, 0.2, 3)), 0, 0, 11, {Manifold::Sphere, 16, 32});
  CHECK(path.verdict == "GAPPED-CONSTANT-C");
  CHECK_FALSE(path.bracket.has_value());
  for (const auto& s : path.samples) {
    CHECK(s.status == "gapped");
    CHECK(s.chern == path.samples.front().chern);
  }
}

TEST_CASE("path from the Kramers pair to a trivial bundle closes the gap") {
  const TriPath path = tri_path(build(ModelSpec{KramersPairSphereSpec{0.1, 1}}), trivial_rank2(), 0, 1, 11,
                                {Manifold::Sphere, 16, 32});
  CHECK(path.verdict == "GAP-CLOSES");
  REQUIRE(path.bracket.has_value());
  CHECK(path.bracket->first < path.bracket->second);
}

TEST_CASE("path between opposite rank-1 Chern numbers closes the gap") {
  HamiltonianField flipped = spin_half();
  flipped.evaluate = [](const PhasePoint& x) { return CMatrix(-n_dot_sigma(unit_vector(x))); };
  const TriPath path = tri_path(spin_half(), flipped, 0, 0, 11, {Manifold::Sphere, 16, 32});
  CHECK(path.verdict == "GAP-CLOSES");
  REQUIRE(path.bracket.has_value());
  CHECK(path.bracket->first <= 0.5);
  CHECK(path.bracket->second >= 0.5);
}

TEST_CASE("path endpoint errors") {
  CHECK_THROWS_AS(tri_path(spin_half(), trivial_rank2(), 0, 0, 5, {Manifold::Sphere, 8, 16}), DomainError);
  CHECK_THROWS_AS(tri_path(build(ModelSpec{KramersPairSphereSpec{0.1, 1}}), trivial_rank2(), 0, 0, 5,
                           {Manifold::Sphere, 8, 16}),
                  TrackingError);
}

}  // TEST_SUITE
