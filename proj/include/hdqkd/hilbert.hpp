#pragma once

// d-dimensional OAM/ANG state space: basis construction, Born-rule
// probabilities, and annulus detection probabilities on sampled radial
// profiles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdqkd {

using Complex = std::complex<double>;

enum class Basis { OAM, ANG };

inline const char* basis_name(Basis b) { return b == Basis::OAM ? "OAM" : "ANG"; }

// Odd dimension d = 2N+1; mode indices run over -N..N.
class Dimension {
 public:
  explicit Dimension(int d) : d_(d) {
    if (d < 3 || d % 2 == 0)
      throw std::invalid_argument("dimension must be odd and >= 3, got " + std::to_string(d));
  }
  int d() const { return d_; }
  int half_range() const { return (d_ - 1) / 2; }  // N
  // Mode index l in -N..N  <->  array index 0..d-1.
  int index_of(int mode) const {
    const int n = half_range();
    if (mode < -n || mode > n)
      throw std::out_of_range("mode index " + std::to_string(mode) + " outside |l| <= " +
                              std::to_string(n));
    return mode + n;
  }

 private:
  int d_;
};

struct StateVector {
  Dimension dim;
  std::vector<Complex> amplitudes;  // indexed by l + N

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
  }
};

inline StateVector oam_state(int mode, Dimension dim) {
  StateVector v{dim, std::vector<Complex>(static_cast<std::size_t>(dim.d()), Complex{0.0, 0.0})};
  v.amplitudes[static_cast<std::size_t>(dim.index_of(mode))] = Complex{1.0, 0.0};
  return v;
}

// ANG mode n: amplitude (1/sqrt(d)) exp(i 2 pi n l / d) on OAM mode l.
inline StateVector ang_state(int mode, Dimension dim) {
  const int d = dim.d();
  const int n_half = dim.half_range();
  dim.index_of(mode);  // range check
  StateVector v{dim, std::vector<Complex>(static_cast<std::size_t>(d))};
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int l = -n_half; l <= n_half; ++l) {
    const double phase = 2.0 * std::numbers::pi * mode * l / d;
    v.amplitudes[static_cast<std::size_t>(dim.index_of(l))] =
        scale * Complex{std::cos(phase), std::sin(phase)};
  }
  return v;
}

inline Complex overlap(const StateVector& a, const StateVector& b) {
  if (a.dim.d() != b.dim.d()) throw std::invalid_argument("overlap: dimension mismatch");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
    s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return s;
}

inline StateVector basis_state(Basis basis, int mode, Dimension dim) {
  return basis == Basis::OAM ? oam_state(mode, dim) : ang_state(mode, dim);
}

// Born-rule outcome distribution for a projective measurement in `basis`.
inline std::vector<double> detection_probabilities(const StateVector& sent, Basis basis,
                                                   Dimension dim) {
  const int n_half = dim.half_range();
  std::vector<double> probs(static_cast<std::size_t>(dim.d()));
  for (int m = -n_half; m <= n_half; ++m)
    probs[static_cast<std::size_t>(dim.index_of(m))] =
        std::norm(overlap(basis_state(basis, m, dim), sent));
  return probs;
}

// Max deviation of |<ANG_n|OAM_l>|^2 from 1/d over all pairs.
inline double verify_mub(Dimension dim) {
  const int n_half = dim.half_range();
  const double target = 1.0 / dim.d();
  double worst = 0.0;
  for (int n = -n_half; n <= n_half; ++n) {
    const StateVector ang = ang_state(n, dim);
    for (int l = -n_half; l <= n_half; ++l)
      worst = std::max(worst, std::abs(std::norm(overlap(ang, oam_state(l, dim))) - target));
  }
  return worst;
}

// Sampled radial profiles psi_l(r), one per OAM mode, on a shared grid.
struct RadialProfileSet {
  Dimension dim;
  std::vector<double> grid;                    // strictly increasing radii
  std::vector<std::vector<Complex>> profiles;  // [mode index][grid point]
  std::string plane_label;                     // metadata only

  void validate() const {
    if (grid.size() < 2) throw std::invalid_argument("radial grid needs >= 2 points");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("radial grid must be increasing");
    if (profiles.size() != static_cast<std::size_t>(dim.d()))
      throw std::invalid_argument("need one profile per mode");
    for (const auto& p : profiles)
      if (p.size() != grid.size()) throw std::invalid_argument("profile/grid length mismatch");
  }
};

struct AnnulusSpec {
  double r_inner;
  double r_outer;  // grid maximum stands in for infinity

  AnnulusSpec(double r_in, double r_out) : r_inner(r_in), r_outer(r_out) {
    if (r_in < 0.0 || !(r_out > r_in)) throw std::invalid_argument("need 0 <= r_inner < r_outer");
  }
};

namespace detail {

// Trapezoidal integral of f(r) r dr over [annulus.r_inner, annulus.r_outer],
// where f is sampled on grid; partial end intervals use linear interpolation.
inline double annulus_integral(const std::vector<double>& grid, const std::vector<double>& f,
                               const AnnulusSpec& annulus) {
  if (annulus.r_inner < grid.front() - 1e-12 || annulus.r_outer > grid.back() + 1e-12)
    throw std::invalid_argument("annulus outside radial grid");
  const double a = std::max(annulus.r_inner, grid.front());
  const double b = std::min(annulus.r_outer, grid.back());
  auto value_at = [&](double r) {
    auto it = std::lower_bound(grid.begin(), grid.end(), r);
    if (it == grid.begin()) return f.front() * r;
    if (it == grid.end()) return f.back() * r;
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    const std::size_t lo = hi - 1;
    const double t = (r - grid[lo]) / (grid[hi] - grid[lo]);
    return (f[lo] + t * (f[hi] - f[lo])) * r;
  };
  double sum = 0.0;
  double prev_r = a;
  double prev_v = value_at(a);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= a) continue;
    if (grid[i] >= b) break;
    const double v = f[i] * grid[i];
    sum += 0.5 * (prev_v + v) * (grid[i] - prev_r);
    prev_r = grid[i];
    prev_v = v;
  }
  sum += 0.5 * (prev_v + value_at(b)) * (b - prev_r);
  return sum;
}

}  // namespace detail

// P_OAM over an annulus: (1/d) sum_l 2*pi * integral |psi_l(r)|^2 r dr.
inline double annulus_probability_oam(const RadialProfileSet& profiles,
                                      const AnnulusSpec& annulus) {
  profiles.validate();
  const double two_pi = 2.0 * std::numbers::pi;
  double total = 0.0;
  std::vector<double> intensity(profiles.grid.size());
  for (const auto& psi : profiles.profiles) {
    for (std::size_t i = 0; i < psi.size(); ++i) intensity[i] = std::norm(psi[i]);
    total += two_pi * detail::annulus_integral(profiles.grid, intensity, annulus);
  }
  return total / profiles.dim.d();
}

// P_ANG over the same annulus, computed the long way: build each
// Psi_ANG^n(r,phi) on an (r,phi) grid, integrate |.|^2 r dr dphi, average
// over n. Uniform azimuthal sampling is exact for the l-band-limited
// integrand once azimuthal_points >= 4d.
inline double annulus_probability_ang(const RadialProfileSet& profiles, const AnnulusSpec& annulus,
                                      int azimuthal_points) {
  profiles.validate();
  const int d = profiles.dim.d();
  const int n_half = profiles.dim.half_range();
  if (azimuthal_points < 4 * d)
    throw std::invalid_argument("azimuthal_points must be >= 4d for Nyquist-safe sampling");
  const double dphi = 2.0 * std::numbers::pi / azimuthal_points;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const std::size_t nr = profiles.grid.size();

  std::vector<double> intensity(nr);
  std::vector<Complex> field(nr);
  double total = 0.0;
  for (int n = -n_half; n <= n_half; ++n) {
    std::fill(intensity.begin(), intensity.end(), 0.0);
    for (int k = 0; k < azimuthal_points; ++k) {
      const double phi = k * dphi;
      std::fill(field.begin(), field.end(), Complex{0.0, 0.0});
      for (int l = -n_half; l <= n_half; ++l) {
        const double phase = l * phi + 2.0 * std::numbers::pi * n * l / d;
        const Complex factor = scale * Complex{std::cos(phase), std::sin(phase)};
        const auto& psi = profiles.profiles[static_cast<std::size_t>(profiles.dim.index_of(l))];
        for (std::size_t i = 0; i < nr; ++i) field[i] += factor * psi[i];
      }
      for (std::size_t i = 0; i < nr; ++i) intensity[i] += std::norm(field[i]) * dphi;
    }
    total += detail::annulus_integral(profiles.grid, intensity, annulus);
  }
  return total / d;
}

// Random profile set on a uniform grid, for randomized identity checks.
inline RadialProfileSet random_radial_profiles(Dimension dim, std::size_t n_points, double r_max,
                                               std::uint64_t seed) {
  if (n_points < 2) throw std::invalid_argument("need >= 2 grid points");
  RadialProfileSet set{dim, {}, {}, "random"};
  set.grid.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i)
    set.grid[i] = r_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  set.profiles.resize(static_cast<std::size_t>(dim.d()));
  for (auto& psi : set.profiles) {
    psi.resize(n_points);
    for (auto& v : psi) v = Complex{amp(rng), amp(rng)};
  }
  return set;
}

}  // namespace hdqkd
