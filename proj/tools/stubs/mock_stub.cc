// Copyright 2026 The GateHub Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Stand-in for the workflow components. One binary installed as
// mock-lammps, mock-pizza, ...; the name it is invoked under selects the
// output size and default file.
//
//   mock-<name> --atoms N --minutes M [--fail] [--out FILE] [other flags ignored]
//
// Sleeps M sim-minutes (GATEHUB_MS_PER_MINUTE real ms each), honours the
// CKPT_IN/CKPT_OUT checkpoint chain by resuming a counter, then writes the
// component's payload to FILE.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <unistd.h>

#include "CLI11.hpp"

namespace {

struct Stub {
  const char* name;
  std::size_t bytes;  // inside the declared class at 1e-3 scale
  const char* output;
};

constexpr Stub kStubs[] = {
    {"lammps", 2 << 20, "dump.txt"},    {"pizza", 2 << 20, "converted.txt"}, {"debyer", 200 << 10, "spectrum.txt"},
    {"r", 512, "plot.png"},             {"atomeye", 512, "frame.png"},       {"ffmpeg", 4 << 10, "movie.mp4"},
};

double env_number(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    return fallback;
  }
}

void write_payload(const Stub& stub, const std::filesystem::path& path, long atoms) {
  const std::size_t bytes = stub.bytes;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  const std::string line = std::string(stub.name) + " atoms=" + std::to_string(atoms) + " 0.000 1.000 2.000\n";
  std::size_t written = 0;
  while (written + line.size() <= bytes) {
    out << line;
    written += line.size();
  }
  out << std::string(bytes - written, '.');
}

}  // namespace

int main(int argc, char** argv) {
  const std::string self = std::filesystem::path(argv[0]).filename().string();
  const Stub* stub = nullptr;
  for (const auto& s : kStubs) {
    if (self == std::string("mock-") + s.name) stub = &s;
  }
  if (stub == nullptr) {
    std::cerr << self << ": unknown component (install as mock-<component>)\n";
    return 2;
  }
  CLI::App app{self};
  app.allow_extras();
  long atoms = 0;
  double minutes = env_number("GATEHUB_ESTIMATE_MINUTES", 0.0);
  bool fail = false;
  std::string out = std::string("outputs/") + stub->output;
  app.add_option("--atoms", atoms, "atom count")->check(CLI::NonNegativeNumber);
  app.add_option("--minutes", minutes, "simulated runtime")->check(CLI::NonNegativeNumber);
  app.add_flag("--fail", fail, "exit 1 instead of producing output");
  app.add_option("--out", out, "output file");
  CLI11_PARSE(app, argc, argv);

  long counter = 0;
  const char* ckpt_in = std::getenv("CKPT_IN");
  const char* ckpt_out = std::getenv("CKPT_OUT");
  if (ckpt_in != nullptr && *ckpt_in != '\0') {
    std::ifstream in(ckpt_in);
    if (!(in >> counter)) {
      std::cerr << self << ": cannot resume from " << ckpt_in << "\n";
      return 3;
    }
  }

  for (const char* const* e = environ; *e != nullptr; ++e) {
    const std::string kv(*e);
    if (kv.rfind("GATEHUB_INPUT_", 0) == 0) std::cout << "input " << kv.substr(14) << "\n";
  }

  const double ms = minutes * env_number("GATEHUB_MS_PER_MINUTE", 1.0);
  std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));

  if (ckpt_out != nullptr && *ckpt_out != '\0') {
    std::ofstream(ckpt_out) << counter + 1 << "\n";
  }
  std::cout << self << " atoms=" << atoms << " minutes=" << minutes << " counter=" << counter + 1
            << "\n";
  if (fail) {
    std::cerr << self << ": failure requested\n";
    return 1;
  }
  write_payload(*stub, out, atoms);
  return 0;
}
