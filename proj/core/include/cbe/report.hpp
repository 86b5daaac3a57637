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

// CSV writers for evaluation outputs. Numbers use the shortest decimal form
// that round-trips, so reruns produce identical bytes.
#pragma once

#include <ostream>
#include <span>
#include <string>

#include "cbe/evaluation.hpp"

namespace cbe {

std::string format_number(double value);

// method,d,k,metric,value
void write_timing_csv(std::ostream& out, std::span<const TimingRecord> records);

// theta,k,trials,mean,variance,bound
// Preceded by '#' comment lines describing the test vector pair.
void write_angle_csv(std::ostream& out, std::span<const AngleStats> stats);

// method,k,m,recall
void write_recall_csv(std::ostream& out, std::span<const RecallCurve> curves);

// iteration,step,objective; each iteration logs a "B" row then an "r" row.
void write_trace_csv(std::ostream& out, std::span<const double> trace);

}  // namespace cbe
