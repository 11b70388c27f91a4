// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <boost/asio.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include <json.hpp>

#include "checks.hpp"
#include "vislink/core/bytes.hpp"
#include "vislink/ingest/npy.hpp"
#include "vislink/render/frame.hpp"

namespace vislink {
namespace {

namespace fs = std::filesystem;
using checks::run_cli;

const std::string kCli = VISLINK_CLI;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("vislink_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  void sphere(int size = 64) {
    ASSERT_EQ(run_cli(kCli, "phantom sphere --size " + std::to_string(size) + " --out " + path("s.npy")), 0);
  }
  Frame frame(const std::string& name) const { return decode_frame_png(read_file(path(name))); }

  fs::path dir;
};

TEST_F(CliTest, GoldenRenderIsBitExact) {
  sphere();
  ASSERT_EQ(run_cli(kCli, "render --volume " + path("s.npy") + " --size 128x128 --lut fire --out " + path("g.png")),
            0);
  EXPECT_EQ(read_file(path("g.png")), read_file(std::string(VISLINK_TEST_DATA) + "/golden_sphere64.png"));
}

TEST_F(CliTest, ZeroOpacityIsTransparent) {
  sphere(32);
  ASSERT_EQ(run_cli(kCli, "render --volume " + path("s.npy") + " --opacity 0 --size 64x64 --out " + path("t.png")), 0);
  EXPECT_TRUE(frame("t.png").fully_transparent());
}

TEST_F(CliTest, MidPlaneHalvesOpaqueMass) {
  sphere();
  const std::string common =
      "render --volume " + path("s.npy") + " --opacity 1 --camera 0,0,100/0,0,0/0.8 --size 128x128 ";
  ASSERT_EQ(run_cli(kCli, common + "--out " + path("full.png")), 0);
  ASSERT_EQ(run_cli(kCli, common + "--plane 1,0,0,0 --out " + path("half.png")), 0);
  const Frame full = frame("full.png");
  const Frame half = frame("half.png");
  const double ratio = alpha_mass(half, 0, 128) / alpha_mass(full, 0, 128);
  EXPECT_NEAR(ratio, 0.5, 0.02);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  sphere(16);
  std::ofstream(path("x.tiff")) << "nope";
  EXPECT_EQ(run_cli(kCli, "render --volume " + path("x.tiff") + " --out " + path("o.png")), 2);
  EXPECT_EQ(run_cli(kCli, "render --volume " + path("s.npy") + " --material pearl --out " + path("o.png")), 2);
  EXPECT_EQ(run_cli(kCli, "render --volume " + path("s.npy") + " --opacity 3 --out " + path("o.png")), 2);
  EXPECT_EQ(run_cli(kCli, "render --volume " + path("s.npy") + " --size 0x4 --out " + path("o.png")), 2);
  EXPECT_EQ(run_cli(kCli, "mc --volume " + path("s.npy") + " --iso 1.5 --out " + path("m.obj")), 2);
  EXPECT_EQ(run_cli(kCli, "render --volume " + path("missing.npy") + " --out " + path("o.png")), 2);
  EXPECT_EQ(run_cli(kCli, "frobnicate"), 2);
}

TEST_F(CliTest, EmptyIsosurfaceWarns) {
  write_file(path("zero.npy"), ingest::write_npy(Volume({8, 8, 8}, std::vector<float>(512, 0.0f))));
  std::string out;
  EXPECT_EQ(run_cli(kCli, "mc --volume " + path("zero.npy") + " --iso 0.5 --out " + path("m.obj") + " 2>&1", &out),
            0);
  EXPECT_NE(out.find("warning"), std::string::npos);
}

TEST_F(CliTest, MeshRoundTripThroughCli) {
  sphere(32);
  std::string stats;
  ASSERT_EQ(run_cli(kCli, "mc --volume " + path("s.npy") + " --out " + path("m.stl"), &stats), 0);
  EXPECT_NE(stats.find("boundary_edges 0 "), std::string::npos) << stats;
  EXPECT_NE(stats.find("euler 2 "), std::string::npos) << stats;
  ASSERT_EQ(run_cli(kCli, "render --mesh " + path("m.stl") + " --material glass --size 64x64 --out " + path("m.png")),
            0);
  EXPECT_FALSE(frame("m.png").fully_transparent());
}

TEST_F(CliTest, UnreachableBrokerExitsThree) {
  boost::asio::io_context io;
  boost::asio::ip::tcp::acceptor probe(io, {boost::asio::ip::make_address("127.0.0.1"), 0});
  const auto port = probe.local_endpoint().port();
  probe.close();
  EXPECT_EQ(run_cli(kCli, "join --broker 127.0.0.1:" + std::to_string(port) + " --join-timeout 0.5"), 3);
}

TEST_F(CliTest, SimulateIsReproducible) {
  const std::string sc = std::string(VISLINK_SCENARIOS) + "/convergence.txt";
  std::string a;
  std::string b;
  ASSERT_EQ(run_cli(kCli, "simulate " + sc + " --json", &a), 0);
  ASSERT_EQ(run_cli(kCli, "simulate " + sc + " --json --trace " + path("t.jsonl"), &b), 0);
  const auto ja = nlohmann::json::parse(a);
  const auto jb = nlohmann::json::parse(b);
  EXPECT_EQ(ja["trace_hash"], jb["trace_hash"]);
  EXPECT_TRUE(ja["converged"].get<bool>());
  std::ifstream trace(path("t.jsonl"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(trace, line)) ++lines;
  EXPECT_EQ(lines, ja["trace_events"].get<std::size_t>());
  std::string c;
  ASSERT_EQ(run_cli(kCli, "simulate " + sc + " --json --seed 99", &c), 0);
  EXPECT_NE(nlohmann::json::parse(c)["trace_hash"], ja["trace_hash"]);
}

TEST_F(CliTest, SimulateReportsDivergence) {
  std::ofstream(path("bad.txt")) << "seed 3\nduration 3000\nnode a\nnode b\n"
                                    "loss 1\n"
                                    "at 500 a load s phantom:sphere:8\n"
                                    "expect_converged 3000\n";
  std::string out;
  const int rc = run_cli(kCli, "simulate " + path("bad.txt") + " 2>&1", &out);
  EXPECT_EQ(rc, 1) << out;
  std::ofstream(path("broken.txt")) << "node a\nat 5 ghost grab x\n";
  EXPECT_EQ(run_cli(kCli, "simulate " + path("broken.txt")), 2);
}

TEST_F(CliTest, HostAndJoinShareASpecimen) {
  boost::asio::io_context io;
  boost::asio::ip::tcp::acceptor probe(io, {boost::asio::ip::make_address("127.0.0.1"), 0});
  const std::string ep = "127.0.0.1:" + std::to_string(probe.local_endpoint().port());
  probe.close();
  std::string host_out;
  auto host = std::async(std::launch::async, [&] {
    return run_cli(kCli,
                   "host --with-broker --broker " + ep +
                       " --room cli --name h --load ball=phantom:sphere:16 --duration 4 --print-scene 2>/dev/null",
                   &host_out);
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(500));
  std::string join_out;
  const int join_rc =
      run_cli(kCli, "join --broker " + ep + " --room cli --name j --duration 2.5 --print-scene 2>/dev/null", &join_out);
  EXPECT_EQ(host.get(), 0);
  ASSERT_EQ(join_rc, 0);
  // Last line is the scene.
  const auto last = join_out.find_last_of('\n', join_out.size() - 2);
  const auto scene = nlohmann::json::parse(join_out.substr(last + 1));
  ASSERT_EQ(scene["specimens"].size(), 1u) << join_out;
  EXPECT_EQ(scene["specimens"][0]["id"], "ball");
  EXPECT_EQ(scene["phase"], "live");
}

TEST_F(CliTest, RenderIsDeterministicAcrossThreads) {
  const checks::Outcome o = checks::cli_determinism(kCli);
  EXPECT_TRUE(o.pass) << o.detail;
}

}  // namespace
}  // namespace vislink
