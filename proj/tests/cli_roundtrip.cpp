// SPDX-License-Identifier: Apache-2.0
//
// Drives the installed CLI binary end to end: warp/invert round trip,
// byte-identical determinism, and the documented exit codes.
// Usage: cli_roundtrip <polydiff-binary> <scratch-dir> <data-dir>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::cerr << "FAIL: " << what << "\n";
  }
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status < 0) return -1;
#ifdef _WIN32
  return status;
#else
  return WEXITSTATUS(status);
#endif
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::cerr << "usage: cli_roundtrip <binary> <scratch-dir> <data-dir>\n";
    return 2;
  }
  const std::string bin = argv[1];
  const std::string tmp = argv[2];
  const std::string data = argv[3];
  std::filesystem::create_directories(tmp);

  const std::string square = data + "/square.json";
  const std::string diffeo = data + "/parabola_diffeo.json";

  // Round trip: warp a grid, feed the images to invert, recover the grid.
  const std::string out1 = tmp + "/warp1.csv";
  expect(run(bin + " warp " + square + " " + diffeo + " --grid 7 -o " + out1) == 0,
         "warp exits 0");
  const auto warped = parse_csv(out1);
  expect(warped.size() == 49, "7x7 grid on the square has 49 points");

  const std::string images = tmp + "/images.csv";
  {
    std::ofstream out(images);
    out.precision(17);
    for (const auto& row : warped) out << row[2] << "," << row[3] << "\n";
  }
  const std::string back = tmp + "/back.csv";
  expect(run(bin + " invert " + square + " " + diffeo + " --points " + images + " -o " +
             back) == 0,
         "invert exits 0");
  const auto recovered = parse_csv(back);
  expect(recovered.size() == warped.size(), "invert produced one row per input");
  double worst = 0;
  for (std::size_t i = 0; i < warped.size() && i < recovered.size(); ++i) {
    worst = std::max(worst, std::abs(recovered[i][2] - warped[i][0]));
    worst = std::max(worst, std::abs(recovered[i][3] - warped[i][1]));
  }
  expect(worst < 1e-8, "round trip recovers the grid to 1e-8");

  // Determinism: identical invocations produce byte-identical output.
  const std::string out2 = tmp + "/warp2.csv";
  expect(run(bin + " warp " + square + " " + diffeo + " --grid 7 -o " + out2) == 0,
         "second warp exits 0");
  expect(slurp(out1) == slurp(out2), "warp output is byte-identical across runs");

  // Exit codes: 2 parse, 3 geometry, 4 gate rejection.
  const std::string devnull = " > /dev/null 2>&1";
  {
    std::ofstream bad(tmp + "/bad.json");
    bad << "{ not json";
  }
  expect(run(bin + " faces " + tmp + "/bad.json" + devnull) == 2, "parse error exits 2");
  expect(run(bin + " faces " + data + "/degenerate.json" + devnull) == 3,
         "empty interior exits 3");
  expect(run(bin + " gate " + square + " " + data + "/constant_field.json" + devnull) == 4,
         "NotStratified exits 4");
  expect(run(bin + " gate " + square + " " + data + "/too_strong_field.json" + devnull) == 4,
         "GateNotSatisfied exits 4");
  expect(run(bin + " gate " + square + " " + data + "/parabola_field.json" + devnull) == 0,
         "accepted gate exits 0");
  expect(run(bin + " falsify " + data + "/tau_xy.json -o " + tmp + "/witness.json") == 0,
         "falsify exits 0");
  expect(slurp(tmp + "/witness.json").find("leaves_M") != std::string::npos,
         "witness reports leaves_M");

  if (failures == 0) std::cout << "cli_roundtrip: all checks passed\n";
  return failures == 0 ? 0 : 1;
}
