// Copyright 2026 The qthermo Authors
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


#include <benchmark/benchmark.h>

#include <numbers>

#include "qthermo/lindblad.hpp"

using namespace qthermo;

namespace {

Generator make(int modes, int cutoff) {
  const FockSpace s(modes, cutoff);
  const BathSpec bath(1.0, 0.4, 0.2);
  return modes == 1 ? single_mode_generator(s, bath, Frame::Lab)
                    : two_mode_generator(s, bath, pump_coupling(0.08, 4.0, std::numbers::pi / 2));
}

CMatrix random_density(Eigen::Index d) {
  CMatrix m = CMatrix::Random(d, d);
  m = m * m.adjoint();
  return m / m.trace();
}

void run(benchmark::State& st, Kernel k) {
  const Generator g = make(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const CMatrix rho = random_density(g.space().dim());
  CMatrix out;
  kernels::Workspace ws;
  for (auto _ : st) {
    g.apply(rho, out, ws, k);
    benchmark::DoNotOptimize(out.data());
  }
  st.counters["dim"] = static_cast<double>(g.space().dim());
}

void BM_RhsParallel(benchmark::State& st) { run(st, Kernel::Parallel); }
void BM_RhsSerialReference(benchmark::State& st) { run(st, Kernel::SerialReference); }

// args: modes, cutoff
BENCHMARK(BM_RhsParallel)->Args({1, 60})->Args({1, 130})->Args({1, 200})->Args({2, 12})->Args({2, 20})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RhsSerialReference)->Args({1, 60})->Args({1, 130})->Args({1, 200})->Args({2, 12})->Args({2, 20})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
