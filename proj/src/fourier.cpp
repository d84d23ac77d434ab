#include "fluidbeam/fourier.hpp"

#include "fluidbeam/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <algorithm>
#include <mutex>
#include <numbers>
#include <string>

namespace fluidbeam
{

namespace
{

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}

// In-place forward/backward plans on an owned, FFTW-aligned buffer. Eigen's
// column-major P x Q matrix is a row-major Q x P array, and the 2-D DFT is
// the same either way round.
class Dft2Plan
{
public:
  Dft2Plan(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols)
  {
    const std::lock_guard lock(planner_mutex());
    buffer_ = fftw_alloc_complex(static_cast<std::size_t>(rows * cols));
    if (buffer_ == nullptr)
      throw std::bad_alloc();
    forward_ = fftw_plan_dft_2d(static_cast<int>(cols), static_cast<int>(rows), buffer_, buffer_, FFTW_FORWARD,
                                FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(static_cast<int>(cols), static_cast<int>(rows), buffer_, buffer_, FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
  }

  Dft2Plan(const Dft2Plan&) = delete;
  Dft2Plan& operator=(const Dft2Plan&) = delete;

  ~Dft2Plan()
  {
    const std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }

  void forward(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) { run(forward_, in, out, 1.0); }

  void inverse(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out)
  {
    run(backward_, in, out, 1.0 / static_cast<double>(rows_ * cols_));
  }

private:
  void run(fftw_plan plan, const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out, double scale)
  {
    const auto count = static_cast<std::size_t>(rows_ * cols_);
    // std::complex<double> is layout-compatible with fftw_complex.
    std::copy_n(in.data(), count, reinterpret_cast<cplx*>(buffer_));
    fftw_execute(plan);
    out.resize(rows_, cols_);
    std::copy_n(reinterpret_cast<const cplx*>(buffer_), count, out.data());
    if (scale != 1.0)
      out *= scale;
  }

  Eigen::Index rows_;
  Eigen::Index cols_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

// Indices of one axis kept by the aperture crop. For the centered placement
// this is the middle `block` of the quadrant-swapped axis, mapped back to
// unshifted indices.
std::vector<bool> kept_axis(Eigen::Index length, std::size_t block, BlockPlacement placement)
{
  const auto n = static_cast<std::size_t>(length);
  std::vector<bool> keep(n, false);
  if (placement == BlockPlacement::Corner)
  {
    for (std::size_t i = 0; i < block; ++i)
      keep[i] = true;
    return keep;
  }
  const std::size_t start = (n - block) / 2;
  const std::size_t half = n / 2;
  for (std::size_t t = 0; t < block; ++t)
    keep[(start + t + n - half) % n] = true;
  return keep;
}

class ApertureProjector
{
public:
  ApertureProjector(Eigen::Index rows, Eigen::Index cols, std::size_t block, BlockPlacement placement)
      : plan_(rows, cols), keep_rows_(kept_axis(rows, block, placement)), keep_cols_(kept_axis(cols, block, placement))
  {
  }

  // F{crop(F^-1{g})}
  const Eigen::MatrixXcd& project(const Eigen::MatrixXcd& g)
  {
    plan_.inverse(g, spatial_);
    for (Eigen::Index c = 0; c < spatial_.cols(); ++c)
      for (Eigen::Index r = 0; r < spatial_.rows(); ++r)
        if (!keep_rows_[static_cast<std::size_t>(r)] || !keep_cols_[static_cast<std::size_t>(c)])
          spatial_(r, c) = cplx{};
    plan_.forward(spatial_, beam_);
    return beam_;
  }

private:
  Dft2Plan plan_;
  std::vector<bool> keep_rows_;
  std::vector<bool> keep_cols_;
  Eigen::MatrixXcd spatial_;
  Eigen::MatrixXcd beam_;
};

std::size_t checked_block(const AngularGrid& grid, std::size_t active_ports)
{
  const std::size_t block = exact_sqrt(active_ports);
  if (block == 0)
    throw ParameterError("active port count " + std::to_string(active_ports) + " is not a nonzero perfect square");
  if (block > std::min(grid.azimuth_count(), grid.elevation_count()))
    throw ParameterError("aperture block " + std::to_string(block) + " exceeds the angular grid");
  return block;
}

} // namespace

std::size_t exact_sqrt(std::size_t value) noexcept
{
  auto root = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(value))));
  while (root * root > value)
    --root;
  while ((root + 1) * (root + 1) <= value)
    ++root;
  return root * root == value ? root : 0;
}

Eigen::VectorXcd weights_from_beam(const BeamPattern& beam, std::span<const Point2> ports, double wavelength,
                                   VMode mode)
{
  if (!(wavelength > 0.0))
    throw ParameterError("wavelength must be positive");

  const AngularGrid& grid = beam.grid();
  struct Term
  {
    cplx value;
    SpatialFrequency freq;
  };
  std::vector<Term> terms;
  for (std::size_t q = 0; q < grid.elevation_count(); ++q)
    for (std::size_t p = 0; p < grid.azimuth_count(); ++p)
    {
      const cplx g = beam(p, q);
      if (g != cplx{})
        terms.push_back({g, spatial_frequency(grid.phi(p), grid.theta(q), mode)});
    }

  const double k = 2.0 * std::numbers::pi / wavelength;
  Eigen::VectorXcd w(static_cast<Eigen::Index>(ports.size()));
  for (std::size_t l = 0; l < ports.size(); ++l)
  {
    const Point2 pos = ports[l];
    if (!std::isfinite(pos.x) || !std::isfinite(pos.y))
      throw ParameterError("port position must be finite");
    cplx acc{};
    for (const auto& t : terms)
      acc += t.value * std::polar(1.0, k * (t.freq.u * pos.x + t.freq.v * pos.y));
    w(static_cast<Eigen::Index>(l)) = acc;
  }
  return w;
}

Eigen::MatrixXcd dft2_forward(const Eigen::MatrixXcd& x)
{
  if (x.size() == 0)
    return x;
  Dft2Plan plan(x.rows(), x.cols());
  Eigen::MatrixXcd out;
  plan.forward(x, out);
  return out;
}

Eigen::MatrixXcd dft2_inverse(const Eigen::MatrixXcd& x)
{
  if (x.size() == 0)
    return x;
  Dft2Plan plan(x.rows(), x.cols());
  Eigen::MatrixXcd out;
  plan.inverse(x, out);
  return out;
}

double aperture_residual(const BeamPattern& pattern, std::size_t block, BlockPlacement placement)
{
  const auto& g = pattern.values();
  if (block == 0 || block > static_cast<std::size_t>(std::min(g.rows(), g.cols())))
    throw ParameterError("aperture block must be between 1 and min(P, Q)");
  ApertureProjector projector(g.rows(), g.cols(), block, placement);
  const auto& radiated = projector.project(g);
  return (g.cwiseAbs() - radiated.cwiseAbs()).norm();
}

PhaseRetrievalResult phase_retrieve(const BeamPattern& desired, std::size_t active_ports,
                                    const PhaseRetrievalOptions& options)
{
  const std::size_t block = checked_block(desired.grid(), active_ports);
  if (!(options.early_stop_tolerance >= 0.0))
    throw ParameterError("early-stop tolerance must be nonnegative");

  const Eigen::MatrixXd target = desired.magnitude();
  Eigen::MatrixXcd g = desired.values();
  ApertureProjector projector(g.rows(), g.cols(), block, options.placement);

  std::vector<double> residuals;
  residuals.reserve(options.iterations + 1);
  std::size_t done = 0;
  for (; done < options.iterations; ++done)
  {
    const Eigen::MatrixXcd& radiated = projector.project(g);
    const double r = (target - radiated.cwiseAbs()).norm();
    if (options.early_stop_tolerance > 0.0 && !residuals.empty() &&
        residuals.back() - r < options.early_stop_tolerance * residuals.back())
    {
      residuals.push_back(r);
      break;
    }
    residuals.push_back(r);

    // Keep the desired magnitude, take the phase the aperture can radiate.
    for (Eigen::Index i = 0; i < g.size(); ++i)
      g(i) = std::polar(target(i), std::arg(radiated(i)));
  }

  PhaseRetrievalResult result{BeamPattern(desired.grid(), std::move(g)), std::move(residuals), done};
  if (result.residuals.size() == done)
    result.residuals.push_back(aperture_residual(result.pattern, block, options.placement));
  return result;
}

} // namespace fluidbeam
