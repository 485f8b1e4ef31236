#pragma once

// Model zoo of TRI band Hamiltonians, randomized TRI ensembles, TRI-breaking
// controls and linear TRI deformation paths.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "phasetop/invariants.hpp"

namespace phasetop {

/// Rigid rotor coupled to a spin j: H(n) = n.J on the sphere, N_A = 2j + 1,
/// T = exp(-i pi J_y) conj. j must be a positive half-integer.
struct RotorSpinSpec {
  double j = 0.5;
  double epsilon = 0.0;
  std::uint64_t seed = 1;
};

/// H(n) = (n.sigma) x I_2 on the sphere, T = (i sigma_y x I_2) conj.
struct KramersPairSphereSpec {
  double epsilon = 0.0;
  std::uint64_t seed = 1;
};

/// H = diag(A(q,p), conj(A(q,-p))) with
/// A = sin q sigma_x + sin p sigma_y + (m - cos q - cos p) sigma_z and
/// T(x, y) = (-conj(y), conj(x)). Gapped for m not in {0, +-2}.
struct TorusDoubledChernSpec {
  double m = 1.0;
  double epsilon = 0.0;
  std::uint64_t seed = 1;
};

/// TRI-symmetrised random field: polynomial of degree <= cutoff in the unit
/// vector (sphere) or trigonometric polynomial with |k_q|, |k_p| <= cutoff
/// (torus). T = (I_{N_A/2} x i sigma_y) conj.
struct RandomTriSpec {
  Manifold manifold = Manifold::Sphere;
  int n_a = 4;
  int cutoff = 2;
  std::uint64_t seed = 1;
};

struct ModelSpec;

/// Base model plus breaking_strength * X, X a constant T-odd matrix with
/// ||X||_max = 1, so the TRI residual is 2 * breaking_strength.
struct TriBrokenControlSpec {
  std::shared_ptr<const ModelSpec> base;
  double breaking_strength = 0.5;
};

struct ModelSpec {
  std::variant<RotorSpinSpec, KramersPairSphereSpec, TorusDoubledChernSpec, RandomTriSpec, TriBrokenControlSpec>
      variant;

  std::string kind() const;
  Manifold manifold() const;
};

/// Deterministic for a fixed spec. Throws ConfigError for out-of-range
/// parameters (non-half-integer j, odd or non-positive N_A, negative epsilon
/// or cutoff). An ungapped parameter choice is not an error here.
HamiltonianField build(const ModelSpec& spec);

/// Spin-j angular momentum matrices in the basis m = j, j-1, ..., -j.
struct SpinMatrices {
  CMatrix x, y, z;
};
SpinMatrices spin_matrices(double j);

/// Random Hermitian field B (not TRI) of the given degree, normalised so
/// ||B(x)|| <= 1 everywhere.
FieldEvaluator random_field(Manifold manifold, int dim, int cutoff, std::uint64_t seed);

/// (1 - s) H0 + s H1.
HamiltonianField interpolate(const HamiltonianField& h0, const HamiltonianField& h1, double s);

struct PathSample {
  double s = 0.0;
  double gap = 0.0;
  std::string status;  // "gapped" | "closed" | "unresolved"
  std::optional<int> chern;
};

struct TriPath {
  int first = 0;
  int last = 0;
  std::vector<PathSample> samples;
  /// "GAPPED-CONSTANT-C", "GAP-CLOSES" or "UNRESOLVED".
  std::string verdict;
  std::optional<std::pair<double, double>> bracket;  // s interval containing the closing
};

/// Tracks the band group [first, last] along H_s = (1 - s) H0 + s H1 at
/// `samples` equally spaced s in [0, 1]. A Chern jump between consecutive
/// gapped samples counts as a gap closing in between.
/// Throws DomainError for incompatible endpoints and TrackingError when the
/// group is not gapped at both endpoints.
TriPath tri_path(const HamiltonianField& h0, const HamiltonianField& h1, int first, int last, int samples,
                 const GridSpec& grid, const Tolerances& tol = {});

}  // namespace phasetop
