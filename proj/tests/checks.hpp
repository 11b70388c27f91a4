// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vislink/core/volume.hpp"
#include "vislink/render/camera.hpp"
#include "vislink/sim/scenario.hpp"
#include "vislink/sync/types.hpp"

// Measurements shared by the gtest suites and the acceptance binary.
namespace vislink::checks {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Homogeneous column of n voxels along z with LUT alpha `a`; returns the
// accumulated alpha of the axial ray at the given quality.
double homogeneous_column_alpha(double a, int n, Quality q);
Outcome compositing_oracle();

Camera sphere_camera(int size, double azimuth = 0.0, double elevation = 0.0);
// Worst mean abs diff (0..1) over the opacity sweep and views.
double layered_vs_raymarched_worst();
Outcome renderer_cross_validation();

// Opaque mass with a mid-plane divided by mass without.
double plane_mass_ratio();
bool disabled_planes_identical();
Outcome exclusion_planes();

double worst_mip_mean_error();
bool constant_volume_levels_identical();
Outcome mipmaps();

Outcome marching_cubes_sphere();

Outcome npy_round_trip(int cases = 200);
Outcome zip_round_trip();
Outcome mesh_cross_format();
Outcome parsers();

// Returns the number of (filter, topic) disagreements.
std::size_t topic_oracle_mismatches();
// Returns a description of the first violated script, empty when all hold.
std::string broker_script_violation(int scripts, std::uint64_t seed);
Outcome broker();

sim::Scenario convergence_scenario(bool late_joiner);
sim::Scenario broker_kill_scenario();
Outcome convergence();

sync::SpecimenState random_state(std::mt19937_64& rng, const std::string& id, std::uint64_t lamport,
                                 const sync::PeerId& writer);
// Number of random sets whose 24 application orders do not all agree.
int lww_permutation_failures(int sets, std::uint64_t seed);
Outcome lww_permutations();

Outcome broker_independence();

// Runs the CLI with the given argument string; returns the exit status.
int run_cli(const std::string& cli, const std::string& args, std::string* output = nullptr);
Outcome cli_determinism(const std::string& cli);

}  // namespace vislink::checks
