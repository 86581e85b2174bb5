#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "ktoda/io.hpp"
#include "support.hpp"

namespace ktoda {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

TEST(Json, StateRoundTripIsExact) {
  const auto s = testing::random_complex_state(12, 10).with_time(0.375);
  const auto back = io::state_from_json(io::Json::parse(io::state_to_json(s).dump()));
  EXPECT_EQ(back, s);
  EXPECT_EQ(back.time(), 0.375);
}

TEST(Json, StateErrorsNameTheField) {
  auto j = io::state_to_json(testing::constant_state(4, 1.0, 1.0, 1.0));
  j.erase("t");
  EXPECT_EQ(io::state_from_json(j).time(), 0.0);
  auto missing = j;
  missing.erase("b");
  try {
    io::state_from_json(missing);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_EQ(std::string(e.what()).rfind("b:", 0), 0u);
  }
  auto bad = j;
  bad["c"][1] = io::Json::array({1.0});
  try {
    io::state_from_json(bad);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_EQ(std::string(e.what()).rfind("c[1]:", 0), 0u);
  }
  EXPECT_THROW(io::state_from_json(io::Json::array()), InvalidArgument);
  EXPECT_THROW(io::complex_from_json(io::Json("x"), "z"), InvalidArgument);
}

TEST(Csv, TrajectoryShapeAndRoundTrip) {
  const Trajectory traj = testing::bounded_trajectory(1, 6, 1e-3, 0.01);
  const auto rows = lines(io::trajectory_csv(traj));
  ASSERT_EQ(rows.size(), traj.size() + 1);
  const auto header = split(rows[0]);
  EXPECT_EQ(header.size(), 1u + 2u * (6 + 5 + 4 + 3));
  EXPECT_EQ(header[0], "t");
  EXPECT_EQ(header[1], "re_a1");
  EXPECT_EQ(header.back(), "im_q3");
  const auto last = split(rows.back());
  EXPECT_EQ(std::stod(last[0]), traj.back().time());
  EXPECT_EQ(std::stod(last[1]), traj.back().state.a(1).real());
  EXPECT_EQ(std::stod(last[2]), traj.back().state.a(1).imag());
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789})
    EXPECT_EQ(std::stod(io::format_double(x)), x);
}

TEST(Json, MomentsAndPolys) {
  const auto s = testing::constant_state(8, 0.0, 1.0, 1.0);
  const auto U = moments_from_J(BandedOperator(s), 2);
  const auto j = io::moments_to_json(U);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[2]["k"], 2);
  EXPECT_EQ(j[2]["block"][3], io::Json::parse("[2.0, 0.0]"));
  const auto p = io::polys_to_json(scalar_polys(s, 1), vector_polys(s, 1));
  EXPECT_EQ(p["scalar"].size(), 4u);
  EXPECT_EQ(p["vector"][1]["n"], 1);
  EXPECT_EQ(p["vector"][1]["bottom"], io::Json::parse("[[-1,0],[-2,0],[0,0],[1,0]]"));
}

TEST(Json, ReportOmitsRuntimeUnlessAsked) {
  SuiteResult r;
  r.checks.push_back(make_report("x", {1, 8, 1e-3, 0.1, 0.9}, std::numeric_limits<double>::infinity(),
                                 1e-5, false, 0.25));
  const auto plain = io::report_to_json(r, false);
  EXPECT_FALSE(plain["checks"][0].contains("runtime_seconds"));
  EXPECT_TRUE(plain["checks"][0]["max_residual"].is_null());
  EXPECT_EQ(plain["ok"], false);
  EXPECT_EQ(plain["checks"][0]["instance"]["t_range"], io::Json::parse("[0.1, 0.9]"));
  EXPECT_EQ(io::report_to_json(r, true)["checks"][0]["runtime_seconds"], 0.25);
}

TEST(Csv, ResolventColumns) {
  io::ResolventRow row;
  row.t = 0.5;
  row.block.z = Complex(2.0, 1.0);
  row.block.value = Block2::Identity();
  row.block.tail_bound = 1e-15;
  row.closed_form = Block2::Identity() * 2.0;
  const auto plain = lines(io::resolvent_csv({row}, false));
  ASSERT_EQ(plain.size(), 2u);
  EXPECT_EQ(split(plain[0]).size(), 12u);
  EXPECT_EQ(split(plain[1])[1], "2");
  const auto cf = lines(io::resolvent_csv({row}, true));
  const auto cells = split(cf[1]);
  EXPECT_EQ(cells.size(), 21u);
  EXPECT_EQ(std::stod(cells.back()), 1.0);
}

TEST(Files, WriteAndReadBack) {
  const auto path = std::filesystem::temp_directory_path() / "ktoda_io_test.txt";
  io::write_text(path.string(), "hello\n");
  EXPECT_EQ(io::read_text(path.string()), "hello\n");
  std::filesystem::remove(path);
  EXPECT_THROW(io::read_text((path.string() + ".missing")), InvalidArgument);
}

}  // namespace
}  // namespace ktoda
