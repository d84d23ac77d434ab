#pragma once

// Straight-line reference implementations used as test oracles. They follow
// the textbook formulas term by term and share no code path with the library
// beyond its plain data types.

#include "fluidbeam/beam_spec.hpp"
#include "fluidbeam/geometry.hpp"
#include "fluidbeam/steering.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle
{

using cplx = std::complex<double>;
using fluidbeam::VMode;

inline constexpr double kPi = std::numbers::pi;

inline cplx steering(double x, double y, double phi, double theta, double lambda, VMode mode)
{
  const double v = mode == VMode::Coupled ? std::sin(phi) * std::sin(theta) : std::sin(phi);
  const double path = x * std::cos(phi) * std::sin(theta) + y * v;
  return std::exp(cplx(0.0, -2.0 * kPi / lambda * path));
}

// Z x L, row z = p + q*P, column = position index.
inline Eigen::MatrixXcd dictionary(const std::vector<fluidbeam::Point2>& ports, const fluidbeam::AngularGrid& grid,
                                   double lambda, VMode mode)
{
  const auto P = grid.azimuth_count();
  const auto Q = grid.elevation_count();
  Eigen::MatrixXcd D(static_cast<Eigen::Index>(P * Q), static_cast<Eigen::Index>(ports.size()));
  for (std::size_t l = 0; l < ports.size(); ++l)
    for (std::size_t q = 0; q < Q; ++q)
      for (std::size_t p = 0; p < P; ++p)
        D(static_cast<Eigen::Index>(p + q * P), static_cast<Eigen::Index>(l)) =
            steering(ports[l].x, ports[l].y, grid.phi(p), grid.theta(q), lambda, mode);
  return D;
}

// y(phi, theta) = sum over ports of w * exp(-j 2pi/lambda (...)), evaluated per angle.
inline Eigen::MatrixXcd synthesis(const std::vector<fluidbeam::Point2>& ports, const Eigen::VectorXcd& w,
                                  const fluidbeam::AngularGrid& grid, double lambda, VMode mode)
{
  Eigen::MatrixXcd y(static_cast<Eigen::Index>(grid.azimuth_count()),
                     static_cast<Eigen::Index>(grid.elevation_count()));
  for (std::size_t p = 0; p < grid.azimuth_count(); ++p)
    for (std::size_t q = 0; q < grid.elevation_count(); ++q)
    {
      cplx acc = 0.0;
      for (std::size_t l = 0; l < ports.size(); ++l)
        acc += w(static_cast<Eigen::Index>(l)) *
               steering(ports[l].x, ports[l].y, grid.phi(p), grid.theta(q), lambda, mode);
      y(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = acc;
    }
  return y;
}

// w_l = sum_p sum_q G(p,q) exp(+j 2pi/lambda (...)), over every sample.
inline Eigen::VectorXcd weights(const Eigen::MatrixXcd& G, const std::vector<fluidbeam::Point2>& ports,
                                const fluidbeam::AngularGrid& grid, double lambda, VMode mode)
{
  Eigen::VectorXcd w(static_cast<Eigen::Index>(ports.size()));
  for (std::size_t l = 0; l < ports.size(); ++l)
  {
    cplx acc = 0.0;
    for (std::size_t p = 0; p < grid.azimuth_count(); ++p)
      for (std::size_t q = 0; q < grid.elevation_count(); ++q)
        acc += G(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) *
               std::conj(steering(ports[l].x, ports[l].y, grid.phi(p), grid.theta(q), lambda, mode));
    w(static_cast<Eigen::Index>(l)) = acc;
  }
  return w;
}

// Direct O(n^4) 2-D DFT with the given exponent sign, no scaling.
inline Eigen::MatrixXcd dft2(const Eigen::MatrixXcd& x, int sign)
{
  const auto R = x.rows();
  const auto C = x.cols();
  Eigen::MatrixXcd out(R, C);
  for (Eigen::Index u = 0; u < R; ++u)
    for (Eigen::Index v = 0; v < C; ++v)
    {
      cplx acc = 0.0;
      for (Eigen::Index a = 0; a < R; ++a)
        for (Eigen::Index b = 0; b < C; ++b)
        {
          const double angle = 2.0 * kPi * (static_cast<double>(u * a) / static_cast<double>(R) +
                                            static_cast<double>(v * b) / static_cast<double>(C));
          acc += x(a, b) * std::exp(cplx(0.0, sign * angle));
        }
      out(u, v) = acc;
    }
  return out;
}

inline double euclid(const fluidbeam::Point2& a, const fluidbeam::Point2& b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct ReferenceRun
{
  std::vector<std::size_t> support;
  bool exhausted = false;
};

// Greedy selection written out step by step: exhaustive argmax of
// |sum_z conj(D_zj) e_z| (optionally over unit-norm columns) among allowed
// ports, lowest index among values within `tie_tolerance` of the maximum; exclusion by brute-force distance from the
// port coordinates; weights re-derived from the closed form for the whole
// support each step; e = g - alpha y / ||y||.
inline ReferenceRun greedy_selection(const Eigen::MatrixXcd& D, const std::vector<fluidbeam::Point2>& ports,
                                     const Eigen::VectorXcd& g, std::size_t S, double alpha, double d_min,
                                     bool normalize, double tie_tolerance = 1e-12)
{
  const auto Z = D.rows();
  const auto L = D.cols();
  Eigen::MatrixXcd atoms = D;
  if (normalize)
    for (Eigen::Index j = 0; j < L; ++j)
      atoms.col(j) /= atoms.col(j).norm();

  ReferenceRun run;
  std::vector<bool> allowed(static_cast<std::size_t>(L), true);
  Eigen::VectorXcd e = g;
  for (std::size_t k = 0; k < S; ++k)
  {
    std::vector<double> score(static_cast<std::size_t>(L), -1.0);
    double best = -1.0;
    for (Eigen::Index j = 0; j < L; ++j)
    {
      if (!allowed[static_cast<std::size_t>(j)])
        continue;
      cplx ip = 0.0;
      for (Eigen::Index z = 0; z < Z; ++z)
        ip += std::conj(atoms(z, j)) * e(z);
      score[static_cast<std::size_t>(j)] = std::abs(ip);
      best = std::max(best, std::abs(ip));
    }
    Eigen::Index pick = -1;
    for (Eigen::Index j = 0; j < L && pick < 0; ++j)
      if (allowed[static_cast<std::size_t>(j)] && score[static_cast<std::size_t>(j)] >= best * (1.0 - tie_tolerance))
        pick = j;
    if (pick < 0)
    {
      run.exhausted = true;
      return run;
    }
    run.support.push_back(static_cast<std::size_t>(pick));
    for (Eigen::Index j = 0; j < L; ++j)
      if (j == pick || euclid(ports[static_cast<std::size_t>(j)], ports[static_cast<std::size_t>(pick)]) < d_min)
        allowed[static_cast<std::size_t>(j)] = false;

    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(Z);
    for (auto l : run.support)
    {
      cplx w = 0.0;
      for (Eigen::Index z = 0; z < Z; ++z)
        w += g(z) * std::conj(D(z, static_cast<Eigen::Index>(l)));
      y += w * D.col(static_cast<Eigen::Index>(l));
    }
    e = g - alpha * y / y.norm();
  }
  return run;
}

inline Eigen::MatrixXcd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng)
{
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m(i) = cplx(n(rng), n(rng));
  return m;
}

inline double max_rel_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
  {
    const double scale = std::max({std::abs(a(i)), std::abs(b(i)), 1e-300});
    worst = std::max(worst, std::abs(a(i) - b(i)) / scale);
  }
  return worst;
}

} // namespace oracle
