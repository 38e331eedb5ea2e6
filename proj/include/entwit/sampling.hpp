// Copyright 2026 The entwit Authors
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

#pragma once

// Seeded random streams and a small worker pool for Monte Carlo runs and
// parameter sweeps. Results depend only on the seed.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace entwit {

using Rng = std::mt19937_64;

// Worker count from ENTWIT_THREADS, else the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("ENTWIT_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline Rng make_stream(std::uint64_t seed, int worker) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(worker)};
  return Rng(seq);
}

// Evaluates fn(i) for i in [0, count) on up to `workers` threads; output is
// in index order whatever the scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, Fn&& fn, int workers = worker_count()) {
  std::vector<T> out(count);
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < count;
             i += static_cast<std::size_t>(workers)) {
          out[i] = fn(i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Trials are cut into fixed chunks of kTrialChunk; chunk c always runs on
// make_stream(seed, c), so results do not depend on the worker count.
inline constexpr long long kTrialChunk = 4096;

inline std::size_t trial_chunks(long long trials) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  return static_cast<std::size_t>((trials + kTrialChunk - 1) / kTrialChunk);
}

// Histogram of `trials` draws of sample(rng) over [lo, hi].
template <class Sampler>
std::vector<long long> monte_carlo_histogram(long long trials, std::uint64_t seed, int lo,
                                             int hi, Sampler&& sample,
                                             int workers = worker_count()) {
  const std::size_t chunks = trial_chunks(trials);
  if (hi < lo) throw std::invalid_argument("empty histogram range");
  const std::size_t bins = static_cast<std::size_t>(hi - lo + 1);
  auto partial = parallel_map<std::vector<long long>>(
      chunks,
      [&](std::size_t c) {
        std::vector<long long> h(bins, 0);
        const long long begin = static_cast<long long>(c) * kTrialChunk;
        const long long end = std::min(trials, begin + kTrialChunk);
        Rng rng = make_stream(seed, static_cast<int>(c));
        for (long long t = begin; t < end; ++t) {
          const int x = sample(rng);
          if (x < lo || x > hi) throw std::out_of_range("sample outside histogram range");
          ++h[static_cast<std::size_t>(x - lo)];
        }
        return h;
      },
      workers);
  std::vector<long long> total(bins, 0);
  for (const auto& h : partial) {
    for (std::size_t i = 0; i < bins; ++i) total[i] += h[i];
  }
  return total;
}

// Per-trial results in trial order, drawn on the same chunked streams.
template <class T, class Trial>
std::vector<T> run_trials(long long trials, std::uint64_t seed, Trial&& trial,
                          int workers = worker_count()) {
  const std::size_t chunks = trial_chunks(trials);
  std::vector<T> out(static_cast<std::size_t>(trials));
  parallel_map<char>(
      chunks,
      [&](std::size_t c) {
        const long long begin = static_cast<long long>(c) * kTrialChunk;
        const long long end = std::min(trials, begin + kTrialChunk);
        Rng rng = make_stream(seed, static_cast<int>(c));
        for (long long t = begin; t < end; ++t) out[static_cast<std::size_t>(t)] = trial(rng);
        return char{0};
      },
      workers);
  return out;
}

// Stream seed for point `index` of a sweep.
inline std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace entwit
