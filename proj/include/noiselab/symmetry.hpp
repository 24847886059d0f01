#pragma once

#include <span>
#include <vector>

#include "noiselab/mixture.hpp"
#include "noiselab/parallel.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/sampler.hpp"

namespace noiselab {

// One-dimensional slice of a score field: the selected coordinate of
// eps(t, c * x) on a symmetric grid of c values in [-1, 1].
struct SliceCurve {
  std::vector<double> grid;    // odd count, symmetric about 0
  std::vector<double> values;  // f(c) per grid point
  std::vector<double> anchor;  // the x being scaled
  int coord = 0;
  int t = 0;
};

SliceCurve slice_curve(const ScoreField& score, int t,
                       std::span<const double> anchor, int coord,
                       int grid_size);

// Fraction of the curve's variance removed by antithetic averaging:
//   1 - integral (f(c)/2 + f(-c)/2 - fbar)^2 / integral (f - fbar)^2
// with trapezoid quadrature on the curve's own grid. 1 iff the curve is
// affine antisymmetric, 0 iff affine symmetric; errors on constant curves.
double antisymmetry_score(const SliceCurve& curve);

// Per-step mean/SD over pairs of the Pearson correlation between the two
// members' states and eps outputs; both plain and group-centralized forms.
struct TemporalCorrelation {
  // index 0..T for states, 1..T for eps (entry 0 unused there)
  std::vector<double> state_mean, state_sd;
  std::vector<double> eps_mean, eps_sd;
  std::vector<double> state_cent_mean, state_cent_sd;
  std::vector<double> eps_cent_mean, eps_cent_sd;
};

TemporalCorrelation temporal_correlation(
    const std::vector<std::pair<Trajectory, Trajectory>>& pn_pairs);

// Estimated symmetry center of the selected coordinate at step t:
// mean over standard-normal probes x of (f(x) + f(-x)) / 2.
double symmetry_center(const ScoreField& score, int t, int coord,
                       int probe_count, RngStream stream);

}  // namespace noiselab
