#include "fluidbeam/errors.hpp"
#include "fluidbeam/evaluation.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

using namespace fluidbeam;

namespace
{

const double pi = oracle::kPi;

std::size_t count_lines(const std::string& s)
{
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST_CASE("reconstruction error examples")
{
  const auto grid = build_angular_grid(20, 20);
  const TargetRegion region{0.2, 0.9, 0.0, 0.6};
  const auto g = make_desired_beam(grid, region, 0.1);
  CHECK(reconstruction_error(g, g) == 0.0);
  CHECK(reconstruction_error(g, BeamPattern(grid)) ==
        doctest::Approx(static_cast<double>(region_support_count(grid, region))));

  std::mt19937_64 rng(6);
  const BeamPattern a(grid, oracle::random_matrix(20, 20, rng));
  const BeamPattern b(grid, oracle::random_matrix(20, 20, rng));
  double brute = 0.0;
  for (std::size_t p = 0; p < 20; ++p)
    for (std::size_t q = 0; q < 20; ++q)
      brute += std::norm(a(p, q) - b(p, q));
  CHECK(reconstruction_error(a, b) == doctest::Approx(brute).epsilon(1e-12));
  CHECK(reconstruction_error(a, b) == doctest::Approx(reconstruction_error(b, a)).epsilon(1e-14));

  CHECK_THROWS_AS(reconstruction_error(a, BeamPattern(build_angular_grid(20, 21))), ParameterError);
}

TEST_CASE("normalization")
{
  const auto grid = build_angular_grid(6, 5);
  const BeamPattern flat(grid, Eigen::MatrixXcd::Constant(6, 5, cplx(0.0, 3.0)));
  CHECK((normalize_beam(flat).array() - 1.0).abs().maxCoeff() < 1e-15);

  Eigen::MatrixXcd imp = Eigen::MatrixXcd::Zero(6, 5);
  imp(2, 3) = cplx(-4.0, 0.0);
  const auto n = normalize_beam(BeamPattern(grid, imp));
  CHECK(n(2, 3) == 1.0);
  CHECK(n.sum() == 1.0);

  CHECK_THROWS_AS(normalize_beam(BeamPattern(grid)), DegenerateBeamError);

  std::mt19937_64 rng(7);
  const BeamPattern r(grid, oracle::random_matrix(6, 5, rng));
  const auto once = normalize_beam(r);
  CHECK(once.maxCoeff() == 1.0);
  CHECK(once.minCoeff() >= 0.0);
  const BeamPattern scaled(grid, r.values() * cplx(0.0, 7.5));
  CHECK((normalize_beam(scaled) - once).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((normalize_beam(BeamPattern(grid, once.cast<cplx>())) - once).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("cross sections")
{
  const auto grid = build_angular_grid(180, 180);
  const BeamPattern flat(grid, Eigen::MatrixXcd::Constant(180, 180, cplx(2.0)));
  const auto c = cross_section(flat, CrossSectionAxis::FixedTheta, 20.0 * pi / 180.0);
  CHECK(c.magnitude.size() == 180);
  for (double v : c.magnitude)
    CHECK(v == doctest::Approx(1.0));

  // nearest line
  std::size_t brute = 0;
  for (std::size_t q = 1; q < 180; ++q)
    if (std::abs(grid.theta(q) - 20.0 * pi / 180.0) < std::abs(grid.theta(brute) - 20.0 * pi / 180.0))
      brute = q;
  CHECK(c.line == brute);
  CHECK(c.grid_angle == grid.theta(brute));

  // equidistant between two samples picks the lower index
  const auto odd = build_angular_grid(4, 4);
  const BeamPattern f4(odd, Eigen::MatrixXcd::Ones(4, 4));
  CHECK(cross_section(f4, CrossSectionAxis::FixedPhi, 0.0).line == 1);

  CHECK_THROWS_AS(cross_section(flat, CrossSectionAxis::FixedPhi, 2.0), ParameterError);

  std::mt19937_64 rng(3);
  const BeamPattern r(grid, oracle::random_matrix(180, 180, rng));
  const auto s = cross_section(r, CrossSectionAxis::FixedPhi, 55.0 * pi / 180.0);
  for (double v : s.magnitude)
  {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("guard mask dilates the region")
{
  const auto grid = build_angular_grid(21, 21);
  // phi in [0, pi/20] holds two samples; theta in [0, 0] holds one
  const double step = pi / 20;
  const TargetRegion region{0.0, step, 0.0, 0.0};
  CHECK(guarded_region_mask(grid, region, 0).count() == 2);
  CHECK(guarded_region_mask(grid, region, 1).count() == 4 * 3);
  CHECK(guarded_region_mask(grid, region, 3).count() == 8 * 7);
  // clipped at the grid edge
  CHECK(guarded_region_mask(grid, {-pi / 2, -pi / 2, -pi / 2, -pi / 2}, 2).count() == 9);
}

TEST_CASE("metrics of an exact reconstruction")
{
  const auto grid = build_angular_grid(40, 40);
  const TargetRegion region{pi / 6, pi / 3, 0.0, pi / 6};
  const auto g = make_desired_beam(grid, region, 0.1);
  const auto m = compute_metrics(g, g, region);
  CHECK(m.reconstruction_error < 1e-20);
  CHECK(m.mainlobe_mean_gain == doctest::Approx(1.0));
  CHECK(m.peak_sidelobe == 0.0);
  CHECK(m.peak_gain_db == doctest::Approx(0.0).epsilon(1e-12));

  // a scaled, rotated copy is just as good
  const BeamPattern scaled(grid, g.values() * cplx(0.0, 5.0));
  const auto s = compute_metrics(g, scaled, region);
  CHECK(s.reconstruction_error < 1e-20);
  CHECK(s.peak_gain_db == doctest::Approx(20.0 * std::log10(5.0)));

  const auto z = compute_metrics(g, BeamPattern(grid), region);
  CHECK(z.reconstruction_error == doctest::Approx(static_cast<double>(region_support_count(grid, region))));
  CHECK(z.mainlobe_mean_gain == 0.0);
  CHECK(z.peak_gain_db == kDbFloor);
}

TEST_CASE("sidelobe ignores the guard band")
{
  const auto grid = build_angular_grid(30, 30);
  const TargetRegion region{0.0, 0.3, 0.0, 0.3};
  Eigen::MatrixXcd y = make_desired_beam(grid, region, 0.0).values();
  const auto inside = guarded_region_mask(grid, region, 0);
  Eigen::Index p0 = -1;
  Eigen::Index q0 = -1;
  for (Eigen::Index q = 0; q < 30 && p0 < 0; ++q)
    for (Eigen::Index p = 0; p < 30; ++p)
      if (inside(p, q))
      {
        p0 = p;
        q0 = q;
        break;
      }
  y(p0 - 2, q0) = 0.9; // inside the guard
  y(0, 0) = 0.4;       // outside
  const auto m = compute_metrics(make_desired_beam(grid, region, 0.0), BeamPattern(grid, y), region, 3);
  CHECK(m.peak_sidelobe == doctest::Approx(0.4));
}

TEST_CASE("comparison table")
{
  const auto grid = build_angular_grid(20, 20);
  const TargetRegion region{0.2, 0.9, 0.0, 0.6};
  const auto g = make_desired_beam(grid, region, 0.1);
  const auto t = compare_configs({{"a", g, g}, {"b", g, g}}, region);
  REQUIRE(t.rows.size() == 2);
  REQUIRE(t.deltas.size() == 1);
  CHECK(t.deltas[0].from == "a");
  CHECK(t.deltas[0].to == "b");
  CHECK(t.deltas[0].delta.reconstruction_error == 0.0);
  CHECK(t.deltas[0].delta.mainlobe_mean_gain == 0.0);

  const auto u = compare_configs({{"good", g, g}, {"empty", g, BeamPattern(grid)}}, region);
  CHECK(u.deltas[0].delta.reconstruction_error ==
        doctest::Approx(static_cast<double>(region_support_count(grid, region))));

  const auto other = build_angular_grid(21, 20);
  const auto h = make_desired_beam(other, region, 0.1);
  CHECK_THROWS_AS(compare_configs({{"a", g, g}, {"b", h, h}}, region), ParameterError);

  const auto three = compare_configs({{"x", g, g}, {"y", g, g}, {"z", g, g}}, region);
  CHECK(three.deltas.size() == 3);

  std::ostringstream csv;
  write_metrics_csv(csv, three);
  CHECK(csv.str().rfind("kind,label,reconstruction_error,mainlobe_mean_gain,peak_sidelobe,peak_gain_db\n", 0) == 0);
  CHECK(count_lines(csv.str()) == 7);
  CHECK(csv.str().find("delta,z - y,") != std::string::npos);
}

TEST_CASE("csv writers")
{
  Eigen::MatrixXd m(2, 3);
  m << 1.0, 0.5, 0.0, 0.25, 1e-5, 0.125;
  std::ostringstream lin;
  write_heatmap_csv(lin, m, false);
  CHECK(lin.str() == "1,0.5,0\n0.25,1e-05,0.125\n");

  std::ostringstream db;
  write_heatmap_csv(db, m, true);
  CHECK(db.str().rfind("0,-6.02059991328,-80\n", 0) == 0);
  CHECK(db.str().find("\n-12.0411998266,-80,-18.0617997398\n") != std::string::npos);

  const auto grid = build_angular_grid(3, 3);
  const BeamPattern flat(grid, Eigen::MatrixXcd::Ones(3, 3));
  std::ostringstream x;
  write_cross_section_csv(x, cross_section(flat, CrossSectionAxis::FixedTheta, 0.0));
  CHECK(x.str() == "angle_deg,normalized_magnitude\n-90,1\n0,1\n90,1\n");

  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}
