#pragma once

// Random small grids for property tests.

#include "ucscreen/netmodel.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace ucscreen::testing {

// Connected grid with `buses` buses, up to `max_lines` lines (at least a
// spanning tree) and `generators` units; every fourth unit is renewable.
inline PowerSystem random_grid(std::mt19937_64& rng, std::size_t buses, std::size_t generators,
                               std::size_t max_lines = 8) {
  std::uniform_real_distribution<double> susc(0.5, 5.0);
  std::uniform_real_distribution<double> cap(10.0, 80.0);
  std::uniform_real_distribution<double> demand(0.0, 60.0);
  std::vector<Bus> bs;
  for (std::size_t n = 0; n < buses; ++n) bs.push_back({static_cast<int>(n + 1), demand(rng)});

  std::set<std::pair<int, int>> used;
  std::vector<Line> ls;
  auto add = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    if (a == b || used.count(key)) return;
    used.insert(key);
    ls.push_back({static_cast<int>(ls.size() + 1), a, b, susc(rng), cap(rng)});
  };
  for (std::size_t n = 1; n < buses; ++n) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    add(static_cast<int>(pick(rng) + 1), static_cast<int>(n + 1));
  }
  const std::size_t limit = std::max(max_lines, buses - 1);
  std::uniform_int_distribution<int> any(1, static_cast<int>(buses));
  for (int tries = 0; tries < 50 && ls.size() < limit; ++tries) {
    if (rng() % 3 == 0) break;
    add(any(rng), any(rng));
  }

  std::uniform_real_distribution<double> pmin(5.0, 25.0);
  std::uniform_real_distribution<double> width(10.0, 100.0);
  std::uniform_real_distribution<double> cost(5.0, 50.0);
  std::vector<Generator> gs;
  for (std::size_t g = 0; g < generators; ++g) {
    Generator gen;
    gen.id = static_cast<int>(g + 1);
    gen.bus = any(rng);
    if (g % 4 == 3) {
      gen.kind = GeneratorKind::Renewable;
      gen.p_min = 0.0;
      gen.p_max = width(rng);
      gen.cost = 0.0;
    } else {
      gen.kind = GeneratorKind::Thermal;
      gen.p_min = pmin(rng);
      gen.p_max = gen.p_min + width(rng);
      gen.cost = cost(rng);
    }
    gs.push_back(gen);
  }
  return PowerSystem(std::move(bs), std::move(ls), std::move(gs));
}

inline Scenario random_scenario(std::mt19937_64& rng, const PowerSystem& sys) {
  Scenario sc;
  for (const auto& b : sys.buses()) {
    std::uniform_real_distribution<double> d(0.0, 2.0 * b.nominal_demand);
    sc.demand.push_back(d(rng));
  }
  std::uniform_real_distribution<double> rho(0.0, 1.0);
  for (const auto& g : sys.generators()) {
    sc.capacity_factor.push_back(g.kind == GeneratorKind::Thermal ? 1.0 : rho(rng));
  }
  return sc;
}

}  // namespace ucscreen::testing
