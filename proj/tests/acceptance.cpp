// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance [--criterion N] [--reference PATH]
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hjdd/analysis.hpp"
#include "hjdd/tables.hpp"

using namespace hjdd;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

bool within_factor(double measured, double target, double factor) {
  return measured <= factor * target && measured >= target / factor;
}

SolveParams params_for(const Grid& g, double tol = 1e-6, int workers = 1) {
  SolveParams s;
  s.h = g.spacing();
  s.tol = tol;
  s.workers = workers;
  return s;
}

double kruzkov_error(const ValueField& f, const Grid& g) {
  return error_norms(f, [](const Vec2& x) { return exact_solution(BuiltinName::EikonalKruzkov, x); }, g)
      .delta_inf;
}

IsaConfig kruzkov_isa(int fine, int workers = 1) {
  IsaConfig c;
  c.coarse = GridSpec::unit_square(20);
  c.fine = GridSpec::unit_square(fine);
  c.parts = 4;
  c.workers = workers;
  return c;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

Verdict criterion_1() {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  const ControlGrid c = sample_controls(p);
  const double target[] = {1.2e-2, 6.5e-3, 2.5e-3};
  const int sizes[] = {50, 100, 200};
  bool ok = c.a.size() >= 64;
  double seconds = 0.0, previous = 1e300;
  std::string detail;
  for (int n = 0; n < 3; ++n) {
    const Grid g = build_grid(GridSpec::unit_square(sizes[n]), p.geometry);
    const SolveResult r = solve(p, g, c, params_for(g));
    seconds += r.report.wall_time;
    const double e = kruzkov_error(r.field, g);
    ok = ok && r.report.converged && within_factor(e, target[n], 2.0) && e < previous;
    previous = e;
    detail += std::to_string(sizes[n]) + ": " + fmt(e) + " vs " + fmt(target[n]) + "; ";
  }
  ok = ok && seconds <= 300.0;
  return {ok, detail + "time " + fmt(seconds) + " s"};
}

Verdict criterion_2() {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  const double target[] = {9e-3, 4.6e-3, 1.4e-3};
  const int sizes[] = {50, 100, 200};
  const double tol = 1e-6;
  bool ok = true;
  std::string detail;
  for (int n = 0; n < 3; ++n) {
    const IsaResult r = run_isa(p, kruzkov_isa(sizes[n]));
    const double isa = kruzkov_error(r.field, r.fine_grid);
    const double nd =
        kruzkov_error(solve(p, r.fine_grid, sample_controls(p), params_for(r.fine_grid)).field, r.fine_grid);
    const bool row = isa <= nd + 2 * tol && within_factor(isa, target[n], 2.0);
    ok = ok && row;
    detail += std::to_string(sizes[n]) + ": isa " + fmt(isa) + " nd " + fmt(nd) + " vs " +
              fmt(target[n]) + (row ? "" : " (out)") + "; ";
  }
  return {ok, detail};
}

Verdict criterion_3() {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  const int sizes[] = {10, 15, 20, 30};
  const double target[] = {0.38, 0.35, 0.33, 0.30};
  bool ok = true;
  double previous = 1.0;
  std::string detail;
  for (int n = 0; n < 4; ++n) {
    const Grid g = build_grid(GridSpec::unit_square(sizes[n]), p.geometry);
    const auto part = partition_boundary(g, p.geometry, 4, PartitionScheme::SquareEdges);
    const RAResult r = run_ra(p, g, sample_controls(p), params_for(g), part, RAParams{});
    const double f = max_area_fraction(r.masks, g);
    ok = ok && std::abs(f - target[n]) <= 0.10 && f <= previous && f >= 0.25;
    previous = f;
    detail += std::to_string(sizes[n]) + ": " + fmt(f) + " vs " + fmt(target[n]) + "; ";
  }
  return {ok, detail};
}

Verdict criterion_4() {
  const ProblemDef p = make_builtin(BuiltinName::EikonalSquare);
  const ControlGrid c = sample_controls(p);
  std::size_t members = 0, missed = 0;
  std::vector<RAResult> results;
  std::vector<Grid> grids;
  for (int cells : {15, 20, 30, 40}) {
    grids.push_back(build_grid(GridSpec::unit_square(cells), p.geometry));
    const Grid& g = grids.back();
    const auto part = partition_boundary(g, p.geometry, 4, PartitionScheme::SquareEdges);
    results.push_back(run_ra(p, g, c, params_for(g), part, RAParams{}));
    for (int i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < g.size(); ++k)
        if (exact_square_subdomain(g.position(k), i)) {
          ++members;
          missed += !results.back().masks[static_cast<std::size_t>(i)].contains(k);
        }
  }
  // nesting between 15 cells (dx 0.133) and 40 cells (dx 0.05)
  const Grid& coarse = grids.front();
  const Grid& fine = grids.back();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t in_fine = 0, violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const Vec2 x{u(rng), u(rng)};
    for (int i = 0; i < 4; ++i) {
      if (!in_mask_hull(fine, results.back().masks[static_cast<std::size_t>(i)], x, true)) continue;
      ++in_fine;
      violations += !in_mask_hull(coarse, results.front().masks[static_cast<std::size_t>(i)], x, true);
    }
  }
  return {missed == 0 && violations == 0,
          std::to_string(members - missed) + "/" + std::to_string(members) +
              " exact members inside; nesting " + std::to_string(violations) + " violations over " +
              std::to_string(in_fine) + " hull hits"};
}

// Independent fixed-point iteration for the 9x9 eikonal grid.
std::vector<double> brute_force(const ProblemDef& p, const std::vector<Vec2>& controls) {
  const int n = 9;
  const double d = 0.25, h = 0.25;
  std::vector<double> v(n * n, 1e3);
  const auto at = [&](int i, int j) -> double& { return v[j * n + i]; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) at(i, j) = 0.0;
  for (int it = 0; it < 100000; ++it) {
    std::vector<double> next = v;
    double change = 0.0;
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        const Vec2 x{-1.0 + i * d, -1.0 + j * d};
        double best = 1e300;
        for (const Vec2& a : controls) {
          const Vec2 f = p.dynamics(x, a, {0, 0});
          const double px = std::clamp(x[0] + h * f[0], -1.0, 1.0);
          const double py = std::clamp(x[1] + h * f[1], -1.0, 1.0);
          const double sx = (px + 1.0) / d, sy = (py + 1.0) / d;
          const int ci = std::min(static_cast<int>(sx), n - 2), cj = std::min(static_cast<int>(sy), n - 2);
          const double tx = sx - ci, ty = sy - cj;
          const double val = (1 - tx) * (1 - ty) * at(ci, cj) + tx * (1 - ty) * at(ci + 1, cj) +
                             (1 - tx) * ty * at(ci, cj + 1) + tx * ty * at(ci + 1, cj + 1);
          best = std::min(best, h * p.running_cost(x, a, {0, 0}) + val / (1.0 + p.discount * h));
        }
        change = std::max(change, std::abs(best - at(i, j)));
        next[j * n + i] = best;
      }
    v.swap(next);
    if (change == 0.0) break;
  }
  return v;
}

Verdict criterion_5() {
  double worst = 0.0;
  for (auto name : {BuiltinName::EikonalSquare, BuiltinName::EikonalKruzkov}) {
    const ProblemDef p = make_builtin(name);
    const Grid g = build_grid(GridSpec::unit_square(8), p.geometry);
    ControlGrid c;
    for (int k = 0; k < 8; ++k) c.a.push_back({std::cos(k * std::numbers::pi / 4), std::sin(k * std::numbers::pi / 4)});
    c.b = {{0.0, 0.0}};
    const SolveResult r = solve(p, g, c, params_for(g, 1e-15));
    const auto oracle = brute_force(p, c.a);
    for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(r.field[k] - oracle[k]));
  }
  return {worst <= 1e-12, "max nodewise difference " + fmt(worst)};
}

Verdict criterion_6() {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  std::vector<std::uint64_t> hashes;
  for (int w : {1, 2, 8}) {
    const IsaResult r = run_isa(p, kruzkov_isa(100, w));
    std::ostringstream field, masks;
    write_field(field, r.fine_grid.spec(), r.field);
    write_mask_list(masks, r.fine_masks);
    for (const auto& m : r.fine_masks) write_mask_pgm(masks, r.fine_grid, m);
    hashes.push_back(fnv1a(field.str()) ^ (fnv1a(masks.str()) * 31));
  }
  std::ostringstream os;
  os << std::hex << hashes[0] << ' ' << hashes[1] << ' ' << hashes[2];
  return {hashes[0] == hashes[1] && hashes[1] == hashes[2], "hashes " + os.str()};
}

Verdict criterion_7() {
  std::string detail;
  bool ok = true;
  {
    const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
    const Grid g = build_grid(GridSpec::unit_square(20), p.geometry);
    const ControlGrid c = sample_controls(p);
    const double h = g.spacing(), beta = 1.0 / (1.0 + h);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int mono = 0, contr = 0;
    for (int t = 0; t < 100; ++t) {
      ValueField v(g.size()), w(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) {
        v[k] = u(rng);
        w[k] = v[k] + u(rng);
      }
      const ValueField tv = apply_operator(p, g, c, v, h), tw = apply_operator(p, g, c, w, h);
      double in = 0.0, out = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        mono += tv[k] > tw[k] + 1e-12;
        in = std::max(in, std::abs(v[k] - w[k]));
        out = std::max(out, std::abs(tv[k] - tw[k]));
      }
      contr += out > beta * in + 1e-12;
    }
    ok = ok && mono == 0 && contr == 0;
    detail += "monotone " + std::to_string(mono) + " contraction " + std::to_string(contr) + " violations; ";
  }
  int below = 0, gcond = 0;
  std::string h2;
  for (auto name : {BuiltinName::EikonalSquare, BuiltinName::EikonalKruzkov, BuiltinName::StripFlat,
                    BuiltinName::VanDerPol, BuiltinName::PursuitEvasion}) {
    const ProblemDef p = make_builtin(name);
    const Grid g = build_grid(GridSpec::unit_square(20), p.geometry);
    const ControlGrid c = sample_controls(p);
    const PartitionScheme scheme = natural_scheme(p.geometry);
    const int m = scheme == PartitionScheme::StripSides ? 2 : 4;
    const auto part = partition_boundary(g, p.geometry, m, scheme);
    for (int i = 0; i < m; ++i) gcond += gcond_violations(p, g, part, build_auxiliary_cost(p, part, i, 1.0)).size();
    RAParams ra;
    if (name == BuiltinName::VanDerPol) ra.q = 0.75;
    if (name == BuiltinName::PursuitEvasion) ra.M = 3.0;
    const SolveParams prm = params_for(g);
    const RAResult r = run_ra(p, g, c, prm, part, ra);
    std::vector<ValueField> fields;
    for (const auto& a : r.auxiliaries) fields.push_back(a.field);
    for (const auto& f : fields)
      for (std::size_t k = 0; k < g.size(); ++k) below += r.combined.field[k] > f[k];
    if (c.b.size() == 1) {
      const double cap = finite_value_bound(p, g, c, prm.h, default_sentinel(p, g, c, prm.h));
      const H2Report rep = check_h2(p, c, fields, r.combined.field, r.combined.active, g, 16,
                                    10.0 * g.spacing(), cap);
      ok = ok && rep.passed;
      h2 += to_string(name) + (rep.passed ? " pass " : " FAIL ") + std::to_string(rep.nodes_checked) + "; ";
    }
  }
  ok = ok && below == 0 && gcond == 0;
  return {ok, detail + "min above input " + std::to_string(below) + "; gcond violations " +
                  std::to_string(gcond) + "; h2 " + h2};
}

Verdict criterion_8() {
  const ProblemDef p = make_builtin(BuiltinName::EikonalKruzkov);
  const int workers = 4;
  const Grid g = build_grid(GridSpec::unit_square(100), p.geometry);
  const SolveResult nd = solve(p, g, sample_controls(p), params_for(g, 1e-6, workers));
  const IsaResult isa = run_isa(p, kruzkov_isa(100, workers));
  const double total = isa.seconds.total();
  const double other = isa.seconds.projection + isa.seconds.assembly;
  const bool ok = total <= 0.7 * nd.report.wall_time && other <= 0.05 * total;
  return {ok, "isa " + fmt(total) + " s, nd " + fmt(nd.report.wall_time) + " s, ratio " +
                  fmt(total / nd.report.wall_time) + "; non-solve share " + fmt(other / total) +
                  "; max fine mask " + fmt(max_area_fraction(isa.fine_masks, isa.fine_grid)) +
                  "; hardware threads " + std::to_string(std::thread::hardware_concurrency())};
}

Verdict criterion_9(const std::string& reference_path) {
  const ProblemDef p = make_builtin(BuiltinName::VanDerPol);
  const ReferenceField ref = load_or_build_reference(p, 400, 1e-8, reference_path);
  const double target[] = {0.09, 0.03, 0.01};
  const int sizes[] = {50, 100, 200};
  bool ok = true;
  std::string detail;
  for (int n = 0; n < 3; ++n) {
    BenchScenario s;
    s.problem = BuiltinName::VanDerPol;
    s.fine_cells = sizes[n];
    s.ra = van_der_pol_ra();
    s.reference = &ref;
    const double nd = *bench_run(s).front().delta_inf;
    s.mode = BenchScenario::Mode::Isa;
    const double isa = *bench_run(s).back().delta_inf;
    const bool same = fmt(nd, 2) == fmt(isa, 2);
    ok = ok && within_factor(nd, target[n], 3.0) && within_factor(isa, target[n], 3.0) && same;
    detail += std::to_string(sizes[n]) + ": nd " + fmt(nd) + " isa " + fmt(isa) + " vs " + fmt(target[n]) + "; ";
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  std::string reference = "van_der_pol_400.txt";
  app.add_option("--criterion", only, "run only this criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_option("--reference", reference, "van_der_pol 400-cell reference field (built if missing)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Verdict()>> checks{
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, [&] { return criterion_9(reference); }};
  bool all = true;
  for (int n = 1; n <= 9; ++n) {
    if (only && n != only) continue;
    Verdict v{false, ""};
    const auto start = std::chrono::steady_clock::now();
    try {
      v = checks[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << " (" << v.detail << ") ["
              << fmt(sec) << " s]" << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
