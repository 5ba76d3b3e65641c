// Published benchmark values. Several are not reproduced; the failures are
// expected and explained in the README.
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hjdd/analysis.hpp"
#include "hjdd/tables.hpp"

using namespace hjdd;

namespace {

double kruzkov(const ValueField& f, const Grid& g, bool mean = false) {
  const ErrorReport e =
      error_norms(f, [](const Vec2& x) { return exact_solution(BuiltinName::EikonalKruzkov, x); }, g);
  return mean ? e.delta_1 : e.delta_inf;
}

SolveResult direct(const ProblemDef& p, const Grid& g, int workers = 1) {
  SolveParams s;
  s.h = g.spacing();
  s.workers = workers;
  return solve(p, g, sample_controls(p), s);
}

IsaConfig four_parts(int fine, int workers = 1) {
  IsaConfig c;
  c.coarse = GridSpec::unit_square(20);
  c.fine = GridSpec::unit_square(fine);
  c.workers = workers;
  return c;
}

}  // namespace

TEST(DistanceFunction, DirectSolveAtTwoHundredCells) {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  const Grid g = build_grid(GridSpec::unit_square(200), p.geometry);
  const SolveResult r = direct(p, g);
  EXPECT_NEAR(kruzkov(r.field, g), 2.5e-3, 2.5e-3);       // within a factor of 2
  EXPECT_NEAR(kruzkov(r.field, g, true), 1.6e-3, 0.8e-3);
}

TEST(DistanceFunction, FourSubsetsAtHundredCells) {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  const IsaResult r = run_isa(p, four_parts(100));
  const double isa = kruzkov(r.field, r.fine_grid);
  EXPECT_LE(isa, 2.0 * 4.6e-3);
  EXPECT_GE(isa, 4.6e-3 / 2.0);
  EXPECT_LE(isa, 6.5e-3 * 2.0);
}

TEST(DistanceFunction, CoverageAtFifteenCells) {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  BenchScenario s;
  s.mode = BenchScenario::Mode::Reconstruction;
  s.coarse_cells = 15;
  const double f = *bench_run(s).front().max_fraction;
  EXPECT_NEAR(f, 0.35, 0.10);
  EXPECT_GE(f, 0.25);
}

TEST(VanDerPol, CoverageAtTwentyCells) {
  BenchScenario s;
  s.problem = BuiltinName::VanDerPol;
  s.mode = BenchScenario::Mode::Reconstruction;
  s.coarse_cells = 20;
  s.ra = van_der_pol_ra();
  EXPECT_NEAR(*bench_run(s).front().max_fraction, 0.47, 0.10);
}

TEST(Timing, IsaFasterThanDirectWithFourWorkers) {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  const Grid g = build_grid(GridSpec::unit_square(100), p.geometry);
  const double nd = direct(p, g, 4).report.wall_time;
  const IsaResult r = run_isa(p, four_parts(100, 4));
  EXPECT_GE(nd / r.seconds.total(), 1.5) << "nd " << nd << " s, isa " << r.seconds.total() << " s";
}

TEST(Timing, NonSolveStagesAreNegligible) {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  const IsaResult r = run_isa(p, four_parts(100));
  EXPECT_LE(r.seconds.projection + r.seconds.assembly, 0.05 * r.seconds.total());
}

TEST(DistanceFunction, ConvergenceOrderAtLeastOneHalf) {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  std::vector<double> errors;
  for (int cells : {50, 100, 200}) {
    const Grid g = build_grid(GridSpec::unit_square(cells), p.geometry);
    errors.push_back(kruzkov(direct(p, g).field, g));
  }
  EXPECT_LT(errors[1], errors[0]);
  EXPECT_LT(errors[2], errors[1]);
  const double order = std::log(errors[0] / errors[2]) / std::log(4.0);
  EXPECT_GE(order, 0.5);
}
