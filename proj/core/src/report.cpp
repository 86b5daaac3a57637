// Copyright 2026 The CBE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cbe/report.hpp"

#include <array>
#include <charconv>

namespace cbe {

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

void write_timing_csv(std::ostream& out, std::span<const TimingRecord> records) {
  out << "method,d,k,metric,value\n";
  for (const auto& r : records) {
    out << r.method << ',' << r.d << ',' << r.k << ',' << r.metric << ','
        << format_number(r.value) << '\n';
  }
}

void write_angle_csv(std::ostream& out, std::span<const AngleStats> stats) {
  out << "# pair: x = 1/sqrt(d) * ones, y = cos(theta) x + sin(theta) z,"
         " z_j = (-1)^j/sqrt(d)\n";
  for (const auto& s : stats) {
    out << "# theta=" << format_number(s.theta) << " d=" << s.d
        << " rho=" << format_number(s.rho) << '\n';
  }
  out << "theta,k,trials,mean,variance,bound\n";
  for (const auto& s : stats) {
    out << format_number(s.theta) << ',' << s.k << ',' << s.trials << ','
        << format_number(s.mean_normalized_hamming) << ','
        << format_number(s.empirical_variance) << ',' << format_number(s.bound())
        << '\n';
  }
}

void write_recall_csv(std::ostream& out, std::span<const RecallCurve> curves) {
  out << "method,k,m,recall\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.m_values.size(); ++i) {
      out << c.method << ',' << c.bits << ',' << c.m_values[i] << ','
          << format_number(c.recall_at_m[i]) << '\n';
    }
  }
}

void write_trace_csv(std::ostream& out, std::span<const double> trace) {
  out << "iteration,step,objective\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i / 2 + 1 << ',' << (i % 2 == 0 ? "B" : "r") << ',';
    out << format_number(trace[i]) << '\n';
  }
}

}  // namespace cbe
