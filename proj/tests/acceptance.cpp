// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "checks.hpp"

using vislink::checks::Outcome;

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : VISLINK_CLI;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"compositing-oracle", vislink::checks::compositing_oracle},
      {"renderer-cross-validation", vislink::checks::renderer_cross_validation},
      {"exclusion-planes", vislink::checks::exclusion_planes},
      {"mipmaps", vislink::checks::mipmaps},
      {"marching-cubes", vislink::checks::marching_cubes_sphere},
      {"parsers", vislink::checks::parsers},
      {"broker", vislink::checks::broker},
      {"convergence", vislink::checks::convergence},
      {"lww-permutations", vislink::checks::lww_permutations},
      {"broker-independence", vislink::checks::broker_independence},
      {"cli-determinism", [&] { return vislink::checks::cli_determinism(cli); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
