// synthetic.h

// Copyright 2026  The dar authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DAR_TESTS_SYNTHETIC_H_
#define DAR_TESTS_SYNTHETIC_H_

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "dar/random.h"

namespace dar::testing {

// Writes a WISDM-format file: every user performs each listed activity for
// `seconds` at 20 Hz. Activity k oscillates at (k + 1) Hz with an offset,
// so classes are well separated in the spectrum.
inline void write_wisdm(const std::string& path, int users,
                        const std::vector<std::string>& activities, double seconds,
                        std::uint64_t seed, double noise = 0.3) {
  Rng rng(seed);
  std::ofstream out(path);
  long long ts = 0;
  const int samples = static_cast<int>(seconds * 20.0);
  for (int u = 0; u < users; ++u) {
    for (std::size_t k = 0; k < activities.size(); ++k) {
      const double f = 1.0 + static_cast<double>(k);
      for (int i = 0; i < samples; ++i) {
        const double t = i / 20.0;
        const double x = 4.0 * std::sin(2 * std::numbers::pi * f * t) + noise * rng.normal();
        const double y = 9.8 + 0.5 * static_cast<double>(k) + noise * rng.normal();
        const double z = 2.0 * std::cos(2 * std::numbers::pi * f * t) + noise * rng.normal();
        char line[160];
        std::snprintf(line, sizeof(line), "%d,%s,%lld,%.5f,%.5f,%.5f;\n", u + 1,
                      activities[k].c_str(), ts, x, y, z);
        out << line;
        ts += 50000000;
      }
    }
  }
}

// Daphnet-format file (64 Hz, label column last); alternating blocks of
// walking (1) and freeze (2) with a short unannotated (0) lead-in.
inline void write_daphnet(const std::string& path, double seconds, std::uint64_t seed) {
  Rng rng(seed);
  std::ofstream out(path);
  const int samples = static_cast<int>(seconds * 64.0);
  for (int i = 0; i < samples; ++i) {
    const int label = i < 64 ? 0 : ((i / 512) % 2 == 0 ? 1 : 2);
    const double f = label == 2 ? 6.0 : 1.5;
    const double a = 300.0 * std::sin(2 * std::numbers::pi * f * i / 64.0);
    out << i * 15 << ' ' << static_cast<int>(a + 10 * rng.normal()) << ' '
        << static_cast<int>(900 + 10 * rng.normal()) << ' ' << static_cast<int>(-a) << ' '
        << "0 0 0 0 0 0 " << label << '\n';
  }
}

// Skoda-format rows (98 Hz): label code, one decoy node group, then node 16.
// Gestures 48..50 run in 2 s blocks separated by null-class (32) rows.
inline void write_skoda(const std::string& path, double seconds, std::uint64_t seed) {
  Rng rng(seed);
  std::ofstream out(path);
  const int samples = static_cast<int>(seconds * 98.0);
  for (int i = 0; i < samples; ++i) {
    const int block = i / 196;
    const int code = block % 4 == 3 ? 32 : 48 + block % 4;
    const double f = 1.0 + 2.0 * (code - 48);
    const double x = std::sin(2 * std::numbers::pi * f * i / 98.0) + 0.1 * rng.normal();
    char line[200];
    std::snprintf(line, sizeof(line), "%d 15 0 0 0 1 2 3 16 0 0 0 %.4f %.4f %.4f\n", code, x,
                  0.2 * (code - 48) + 0.1 * rng.normal(), 0.1 * rng.normal());
    out << line;
  }
}

}  // namespace dar::testing

#endif  // DAR_TESTS_SYNTHETIC_H_
