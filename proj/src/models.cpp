#include "phasetop/models.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "phasetop/errors.hpp"
#include "phasetop/parallel.hpp"

namespace phasetop {

namespace {

constexpr cplx kI(0.0, 1.0);

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

CMatrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix a(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) a(r, c) = cplx(normal(rng), normal(rng));
  }
  return 0.5 * (a + a.adjoint());
}

double spectral_norm(const CMatrix& a) {
  return Eigen::JacobiSVD<CMatrix>(a).singularValues()(0);
}

CMatrix pauli(int k) {
  CMatrix s(2, 2);
  switch (k) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -kI, kI, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

AntiUnitary paired_spin_half(int dim) {
  return AntiUnitary(kron(CMatrix::Identity(dim / 2, dim / 2), AntiUnitary::spin_half().matrix()));
}

// H0 + epsilon * symmetrised random perturbation
HamiltonianField perturbed(HamiltonianField base, double epsilon, std::uint64_t seed) {
  if (epsilon < 0) throw ConfigError("perturbation strength epsilon must be >= 0");
  if (epsilon == 0.0) return base;
  const int cutoff = base.manifold == Manifold::Sphere ? 2 : 1;
  const HamiltonianField pert =
      symmetrize_tri(random_field(base.manifold, base.dim, cutoff, seed), base.dim, base.manifold, base.tr);
  HamiltonianField out = base;
  out.evaluate = [h0 = base.evaluate, p = pert.evaluate, epsilon](const PhasePoint& x) -> CMatrix {
    return h0(x) + epsilon * p(x);
  };
  return out;
}

HamiltonianField build_rotor(const RotorSpinSpec& s) {
  const double twice = 2.0 * s.j;
  if (!(s.j > 0) || std::abs(twice - std::round(twice)) > 1e-12 || static_cast<long>(std::lround(twice)) % 2 == 0) {
    throw ConfigError("RotorSpin: j must be a positive half-integer");
  }
  const SpinMatrices spin = spin_matrices(s.j);
  CMatrix j = hermitian_exp_i(spin.y, -kPi);
  j = polar_unitary(j);
  HamiltonianField h;
  h.dim = static_cast<int>(spin.z.rows());
  h.manifold = Manifold::Sphere;
  h.tr = AntiUnitary(j);
  h.evaluate = [spin](const PhasePoint& x) -> CMatrix {
    const Eigen::Vector3d n = unit_vector(x);
    return n.x() * spin.x + n.y() * spin.y + n.z() * spin.z;
  };
  return perturbed(std::move(h), s.epsilon, s.seed);
}

HamiltonianField build_kramers(const KramersPairSphereSpec& s) {
  HamiltonianField h;
  h.dim = 4;
  h.manifold = Manifold::Sphere;
  h.tr = AntiUnitary(kron(AntiUnitary::spin_half().matrix(), CMatrix::Identity(2, 2)));
  const CMatrix sx = kron(pauli(1), pauli(0)), sy = kron(pauli(2), pauli(0)), sz = kron(pauli(3), pauli(0));
  h.evaluate = [sx, sy, sz](const PhasePoint& x) -> CMatrix {
    const Eigen::Vector3d n = unit_vector(x);
    return n.x() * sx + n.y() * sy + n.z() * sz;
  };
  return perturbed(std::move(h), s.epsilon, s.seed);
}

HamiltonianField build_torus_doubled(const TorusDoubledChernSpec& s) {
  HamiltonianField h;
  h.dim = 4;
  h.manifold = Manifold::Torus;
  CMatrix j = CMatrix::Zero(4, 4);
  j.block(0, 2, 2, 2) = -CMatrix::Identity(2, 2);
  j.block(2, 0, 2, 2) = CMatrix::Identity(2, 2);
  h.tr = AntiUnitary(j);
  const double m = s.m;
  h.evaluate = [m](const PhasePoint& x) -> CMatrix {
    auto upper = [m](double q, double p) -> CMatrix {
      return std::sin(q) * pauli(1) + std::sin(p) * pauli(2) + (m - std::cos(q) - std::cos(p)) * pauli(3);
    };
    CMatrix out = CMatrix::Zero(4, 4);
    out.block(0, 0, 2, 2) = upper(x.a, x.b);
    out.block(2, 2, 2, 2) = upper(x.a, -x.b).conjugate();
    return out;
  };
  return perturbed(std::move(h), s.epsilon, s.seed);
}

HamiltonianField build_random(const RandomTriSpec& s) {
  if (s.n_a <= 0 || s.n_a % 2 != 0) throw ConfigError("RandomTRI: n_a must be a positive even integer");
  if (s.cutoff < 0) throw ConfigError("RandomTRI: cutoff must be >= 0");
  const AntiUnitary tr = paired_spin_half(s.n_a);
  return symmetrize_tri(random_field(s.manifold, s.n_a, s.cutoff, s.seed), s.n_a, s.manifold, tr);
}

HamiltonianField build_control(const TriBrokenControlSpec& s) {
  if (!s.base) throw ConfigError("TRIBrokenControl: missing base model");
  if (!(s.breaking_strength > 0)) throw ConfigError("TRIBrokenControl: breaking_strength must be > 0");
  HamiltonianField base = build(*s.base);
  std::mt19937_64 rng(0x7e1b0c3aULL);
  CMatrix odd = CMatrix::Zero(base.dim, base.dim);
  while (max_abs(odd) < 1e-3) {
    const CMatrix c = random_hermitian(base.dim, rng);
    odd = 0.5 * (c - base.tr.conjugate_operator(c));
  }
  odd /= max_abs(odd);
  HamiltonianField out = base;
  out.evaluate = [h0 = base.evaluate, odd, b = s.breaking_strength](const PhasePoint& x) -> CMatrix {
    return h0(x) + b * odd;
  };
  return out;
}

}  // namespace

std::string ModelSpec::kind() const {
  return std::visit(overloaded{[](const RotorSpinSpec&) { return std::string("RotorSpin"); },
                               [](const KramersPairSphereSpec&) { return std::string("KramersPairSphere"); },
                               [](const TorusDoubledChernSpec&) { return std::string("TorusDoubledChern"); },
                               [](const RandomTriSpec&) { return std::string("RandomTRI"); },
                               [](const TriBrokenControlSpec&) { return std::string("TRIBrokenControl"); }},
                    variant);
}

Manifold ModelSpec::manifold() const {
  return std::visit(overloaded{[](const RotorSpinSpec&) { return Manifold::Sphere; },
                               [](const KramersPairSphereSpec&) { return Manifold::Sphere; },
                               [](const TorusDoubledChernSpec&) { return Manifold::Torus; },
                               [](const RandomTriSpec& s) { return s.manifold; },
                               [](const TriBrokenControlSpec& s) {
                                 if (!s.base) throw ConfigError("TRIBrokenControl: missing base model");
                                 return s.base->manifold();
                               }},
                    variant);
}

HamiltonianField build(const ModelSpec& spec) {
  return std::visit(overloaded{[](const RotorSpinSpec& s) { return build_rotor(s); },
                               [](const KramersPairSphereSpec& s) { return build_kramers(s); },
                               [](const TorusDoubledChernSpec& s) { return build_torus_doubled(s); },
                               [](const RandomTriSpec& s) { return build_random(s); },
                               [](const TriBrokenControlSpec& s) { return build_control(s); }},
                    spec.variant);
}

SpinMatrices spin_matrices(double j) {
  const int dim = static_cast<int>(std::lround(2.0 * j)) + 1;
  CMatrix plus = CMatrix::Zero(dim, dim);
  SpinMatrices s{CMatrix::Zero(dim, dim), CMatrix::Zero(dim, dim), CMatrix::Zero(dim, dim)};
  for (int a = 0; a < dim; ++a) {
    const double m = j - a;
    s.z(a, a) = m;
    if (a > 0) plus(a - 1, a) = std::sqrt(j * (j + 1) - m * (m + 1));  // J+ |m> -> |m+1>
  }
  const CMatrix minus = plus.adjoint();
  s.x = 0.5 * (plus + minus);
  s.y = -0.5 * kI * (plus - minus);
  return s;
}

FieldEvaluator random_field(Manifold manifold, int dim, int cutoff, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (manifold == Manifold::Sphere) {
    struct Term {
      int ex, ey, ez;
      CMatrix coeff;
    };
    std::vector<Term> terms;
    double norm = 0.0;
    for (int deg = 0; deg <= cutoff; ++deg) {
      for (int ex = deg; ex >= 0; --ex) {
        for (int ey = deg - ex; ey >= 0; --ey) {
          terms.push_back({ex, ey, deg - ex - ey, random_hermitian(dim, rng)});
          norm += spectral_norm(terms.back().coeff);
        }
      }
    }
    for (auto& t : terms) t.coeff /= norm;
    return [terms, dim](const PhasePoint& x) -> CMatrix {
      const Eigen::Vector3d n = unit_vector(x);
      CMatrix out = CMatrix::Zero(dim, dim);
      for (const auto& t : terms) {
        out += std::pow(n.x(), t.ex) * std::pow(n.y(), t.ey) * std::pow(n.z(), t.ez) * t.coeff;
      }
      return out;
    };
  }
  struct Mode {
    int kq, kp;
    CMatrix cos_coeff, sin_coeff;
  };
  std::vector<Mode> modes;
  double norm = 0.0;
  for (int kq = 0; kq <= cutoff; ++kq) {
    for (int kp = -cutoff; kp <= cutoff; ++kp) {
      if (kq == 0 && kp < 0) continue;
      Mode mode{kq, kp, random_hermitian(dim, rng), random_hermitian(dim, rng)};
      if (kq == 0 && kp == 0) mode.sin_coeff.setZero();
      norm += spectral_norm(mode.cos_coeff) + spectral_norm(mode.sin_coeff);
      modes.push_back(std::move(mode));
    }
  }
  for (auto& m : modes) {
    m.cos_coeff /= norm;
    m.sin_coeff /= norm;
  }
  return [modes, dim](const PhasePoint& x) -> CMatrix {
    CMatrix out = CMatrix::Zero(dim, dim);
    for (const auto& m : modes) {
      const double arg = m.kq * x.a + m.kp * x.b;
      out += std::cos(arg) * m.cos_coeff + std::sin(arg) * m.sin_coeff;
    }
    return out;
  };
}

HamiltonianField interpolate(const HamiltonianField& h0, const HamiltonianField& h1, double s) {
  HamiltonianField out = h0;
  out.evaluate = [a = h0.evaluate, b = h1.evaluate, s](const PhasePoint& x) -> CMatrix {
    return (1.0 - s) * a(x) + s * b(x);
  };
  return out;
}

TriPath tri_path(const HamiltonianField& h0, const HamiltonianField& h1, int first, int last, int samples,
                 const GridSpec& spec, const Tolerances& tol) {
  if (h0.dim != h1.dim || h0.manifold != h1.manifold || max_abs(h0.tr.matrix() - h1.tr.matrix()) > 1e-12) {
    throw DomainError("tri_path: endpoints differ in dimension, manifold or time reversal");
  }
  if (h0.manifold != spec.manifold) throw DomainError("tri_path: grid manifold does not match the fields");
  if (samples < 2) throw DomainError("tri_path: need at least two samples");

  TriPath path;
  path.first = first;
  path.last = last;
  path.samples.resize(samples);
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t idx) {
    const int k = static_cast<int>(idx);
    const double s = static_cast<double>(k) / (samples - 1);
    const HamiltonianField h = interpolate(h0, h1, s);
    PathSample& sample = path.samples[k];
    sample.s = s;
    for (int level = 0; level <= tol.max_refinements; ++level) {
      const AdaptedGrid adapted =
          adapt_grid(h, first, last, Grid(spec.manifold, spec.n_lat << level, spec.n_lon << level), tol);
      const Grid& grid = adapted.grid;
      const Spectrum& spectrum = adapted.spectrum;
      const BandGroup group = band_group(spectrum, first, last);
      if (level == 0) sample.gap = group.min_gap;
      sample.gap = std::min(sample.gap, group.min_gap);
      if (!(group.min_gap > tol.gap_floor)) {
        sample.status = "closed";
        break;
      }
      try {
        sample.chern = chern_plaquette(spectrum, group, grid).chern;
        sample.status = "gapped";
        break;
      } catch (const ResolutionError&) {
        sample.status = "unresolved";
      }
    }
    if ((k == 0 || k == samples - 1) && sample.status != "gapped") {
      std::ostringstream msg;
      msg << "tri_path: group [" << first << ", " << last << "] is " << sample.status << " at endpoint s = " << s
          << " (gap " << sample.gap << ")";
      throw TrackingError(msg.str());
    }
  });

  const PathSample* previous = nullptr;
  bool unresolved = false;
  for (const auto& sample : path.samples) {
    if (sample.status == "unresolved") {
      unresolved = true;
      continue;
    }
    if (sample.status == "closed" || (previous && *previous->chern != *sample.chern)) {
      path.verdict = "GAP-CLOSES";
      path.bracket = std::make_pair(previous ? previous->s : 0.0, sample.s);
      return path;
    }
    previous = &sample;
  }
  path.verdict = unresolved ? "UNRESOLVED" : "GAPPED-CONSTANT-C";
  return path;
}

}  // namespace phasetop
