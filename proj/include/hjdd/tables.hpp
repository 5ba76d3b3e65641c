#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hjdd/analysis.hpp"
#include "hjdd/error.hpp"

namespace hjdd {

/// Benchmark tables of the harness. Each id maps to a fixed list of scenarios.
///   t1  RA coverage, eikonal_kruzkov, 4 parts, coarse {10,15,20,30}
///   t2  wall-clock of the direct solve against ISA (coarse 20, 4 parts), fine {50,100,200}
///   t3  errors of the direct solve and ISA with {2,4,8} parts, fine {50,100,200}
///   t4  RA coverage, van_der_pol, 4 parts, q = 3/4, coarse {10,20,40}
///   t5  van_der_pol errors against the stored 400-cell reference, direct and ISA
///   t6  RA coverage, pursuit_evasion, 4 parts, C = 1, M = 3, coarse {10,20,30}
inline const std::vector<std::string>& table_ids() {
  static const std::vector<std::string> ids{"t1", "t2", "t3", "t4", "t5", "t6"};
  return ids;
}

struct TableOptions {
  int workers = 1;
  int repetitions = 1;
  /// Where the van_der_pol reference lives (built on first use).
  std::string reference_path = "van_der_pol_400.txt";
  int reference_cells = 400;
  double reference_tol = 1e-8;
};

inline RAParams van_der_pol_ra() {
  RAParams p;
  p.q = 0.75;
  return p;
}

inline RAParams pursuit_ra() {
  RAParams p;
  p.M = 3.0;
  return p;
}

inline std::vector<BenchScenario> table_scenarios(std::string_view id, const TableOptions& opt,
                                                  const ReferenceField* reference = nullptr) {
  using Mode = BenchScenario::Mode;
  std::vector<BenchScenario> out;
  const auto base = [&](BuiltinName name, Mode mode) {
    BenchScenario s;
    s.problem = name;
    s.mode = mode;
    s.workers = opt.workers;
    s.reference = reference;
    return s;
  };
  if (id == "t1" || id == "t4" || id == "t6") {
    const BuiltinName name = id == "t1"   ? BuiltinName::EikonalKruzkov
                             : id == "t4" ? BuiltinName::VanDerPol
                                          : BuiltinName::PursuitEvasion;
    const std::vector<int> sizes = id == "t1"   ? std::vector<int>{10, 15, 20, 30}
                                   : id == "t4" ? std::vector<int>{10, 20, 40}
                                                : std::vector<int>{10, 20, 30};
    for (int cells : sizes) {
      BenchScenario s = base(name, Mode::Reconstruction);
      s.coarse_cells = cells;
      if (id == "t4") s.ra = van_der_pol_ra();
      if (id == "t6") s.ra = pursuit_ra();
      out.push_back(s);
    }
  } else if (id == "t2" || id == "t3" || id == "t5") {
    const BuiltinName name = id == "t5" ? BuiltinName::VanDerPol : BuiltinName::EikonalKruzkov;
    const std::vector<int> parts = id == "t3" ? std::vector<int>{2, 4, 8} : std::vector<int>{4};
    for (int fine : {50, 100, 200}) {
      BenchScenario d = base(name, Mode::Direct);
      d.fine_cells = fine;
      if (id == "t5") d.ra = van_der_pol_ra();
      out.push_back(d);
      for (int m : parts) {
        BenchScenario s = d;
        s.mode = Mode::Isa;
        s.parts = m;
        s.coarse_cells = 20;
        out.push_back(s);
      }
    }
  } else {
    throw InvalidArgument("unknown table '" + std::string(id) + "'");
  }
  return out;
}

/// Runs every scenario of table `id`, handing each row to `sink` as soon as it exists.
inline void run_table(std::string_view id, const TableOptions& opt,
                      const std::function<void(const BenchRow&)>& sink) {
  ReferenceField reference;
  const ReferenceField* ref = nullptr;
  if (id == "t5") {
    reference = load_or_build_reference(make_builtin(BuiltinName::VanDerPol), opt.reference_cells,
                                        opt.reference_tol, opt.reference_path, opt.workers);
    ref = &reference;
  }
  for (const BenchScenario& s : table_scenarios(id, opt, ref))
    for (const BenchRow& row : bench_run(s, opt.repetitions)) sink(row);
}

}  // namespace hjdd
