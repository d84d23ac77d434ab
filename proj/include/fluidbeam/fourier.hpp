#pragma once

#include "fluidbeam/beam_spec.hpp"
#include "fluidbeam/steering.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace fluidbeam
{

/// Closed-form Fourier weights for arbitrary port positions:
///     w_l = sum_z G_z exp(+j 2pi/lambda (u_z x_l + v_z y_l)),
/// i.e. the conjugate steering response of each port projected onto the
/// beam. Evaluated by direct summation over the nonzero samples of G.
Eigen::VectorXcd weights_from_beam(const BeamPattern& beam, std::span<const Point2> ports, double wavelength,
                                   VMode mode);

/// Unnormalized forward 2-D DFT, X(u,v) = sum x(a,b) exp(-j2pi(ua/P + vb/Q)).
Eigen::MatrixXcd dft2_forward(const Eigen::MatrixXcd& x);

/// Inverse 2-D DFT scaled by 1/(P Q), so dft2_inverse(dft2_forward(x)) == x.
Eigen::MatrixXcd dft2_inverse(const Eigen::MatrixXcd& x);

/// Where the retained aperture block sits in the spatial-domain matrix.
/// Centered: quadrant-swap so zero offset is at the middle, keep the middle
/// block, swap back. The kept offsets are symmetric about zero.
/// Corner: keep the leading block of the unshifted matrix.
enum class BlockPlacement
{
  Centered,
  Corner,
};

struct PhaseRetrievalOptions
{
  std::size_t iterations = 50;
  BlockPlacement placement = BlockPlacement::Centered;
  /// Stop once the relative residual improvement of one iteration falls
  /// below this value. Zero disables early stopping.
  double early_stop_tolerance = 0.0;
};

struct PhaseRetrievalResult
{
  BeamPattern pattern;
  /// residuals[k] is the aperture-constraint residual of the pattern after k
  /// iterations, so there are iterations_run + 1 entries.
  std::vector<double> residuals;
  std::size_t iterations_run = 0;
};

/// || |G| - |F{crop(F^-1{G})}| ||_2 for a pattern and aperture side
/// `block`. Measures how far G is from being radiated by a block-limited
/// aperture.
double aperture_residual(const BeamPattern& pattern, std::size_t block,
                         BlockPlacement placement = BlockPlacement::Centered);

/// Iterative Fourier phase retrieval with a sqrt(S) x sqrt(S) aperture.
/// Each iteration runs one inverse and one forward FFT, keeps the magnitude
/// of the input pattern and takes the phase of the aperture-limited beam.
///
/// Throws ParameterError if `active_ports` is not a perfect square or its
/// root exceeds min(P, Q).
PhaseRetrievalResult phase_retrieve(const BeamPattern& desired, std::size_t active_ports,
                                    const PhaseRetrievalOptions& options = {});

/// Integer square root when `value` is a perfect square, zero otherwise.
std::size_t exact_sqrt(std::size_t value) noexcept;

} // namespace fluidbeam
