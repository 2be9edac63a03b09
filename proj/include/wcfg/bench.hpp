// Copyright 2026 The wcfg Authors.
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

#ifndef WCFG_BENCH_HPP_
#define WCFG_BENCH_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "wcfg/session.hpp"

namespace wcfg {

struct BenchRecord {
  std::int64_t n = 0;
  std::string algo;
  std::string backend;
  double seconds = 0.0;
  std::optional<std::uint64_t> ops;
};

struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of r(N) = a N^b on the log-log scale.
inline PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points) {
  std::set<double> distinct;
  for (const auto& [n, r] : points) {
    if (!(n > 0.0) || !(r > 0.0)) {
      throw NonPositiveValue("power-law fit requires positive sizes and values");
    }
    distinct.insert(n);
  }
  if (distinct.size() < 2) {
    throw InsufficientData("power-law fit requires at least two distinct sizes");
  }
  double sx = 0, sy = 0;
  for (const auto& [n, r] : points) {
    sx += std::log(n);
    sy += std::log(r);
  }
  const double mx = sx / static_cast<double>(points.size());
  const double my = sy / static_cast<double>(points.size());
  double sxx = 0, sxy = 0;
  for (const auto& [n, r] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(r) - my);
  }
  PowerLawFit fit;
  fit.b = sxy / sxx;
  fit.a = std::exp(my - fit.b * mx);
  double ss_res = 0, ss_tot = 0;
  for (const auto& [n, r] : points) {
    const double y = std::log(r);
    const double yhat = std::log(fit.a) + fit.b * std::log(n);
    ss_res += (y - yhat) * (y - yhat);
    ss_tot += (y - my) * (y - my);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

struct BenchOptions {
  std::string algo = "parse";  // parse | prefix | next-token
  Backend backend = Backend::kCky;
  int repeats = 3;
  bool count_ops = false;
  std::uint64_t seed = 0;
  int threads = 1;
};

namespace detail {

template <Semiring S>
void bench_once(ParserSession<S>& session, const BenchOptions& opts,
                std::span<const std::string> prefix, OpCounter* ops) {
  if (opts.algo == "parse") {
    (void)session.parse(prefix, opts.backend, ops);
  } else if (opts.algo == "prefix") {
    (void)session.prefix_parse(prefix, opts.backend, ops);
  } else if (opts.algo == "next-token") {
    (void)session.next_token(prefix, opts.backend, false, ops);
  } else {
    throw Error("unknown bench algo '" + opts.algo + "'");
  }
}

}  // namespace detail

/// Measures every prefix of every string: best-of-`repeats` wall time on a
/// monotonic clock, plus one instrumented run per prefix when counting ops.
/// The measurement order is shuffled by the seed; records come back in
/// (string, prefix-length) order. threads > 1 parallelizes across strings
/// only, never within a measurement.
template <Semiring S>
std::vector<BenchRecord> run_bench(ParserSession<S>& session,
                                   const std::vector<std::vector<std::string>>& strings,
                                   const BenchOptions& opts) {
  const std::string backend_name = opts.backend == Backend::kCky ? "cky" : "earley";

  struct Task {
    size_t string_index;
    std::int64_t n;
    size_t record_index;
  };
  std::vector<Task> tasks;
  std::vector<BenchRecord> records;
  for (size_t si = 0; si < strings.size(); ++si) {
    for (std::int64_t n = 0; n <= static_cast<std::int64_t>(strings[si].size()); ++n) {
      tasks.push_back({si, n, records.size()});
      BenchRecord rec;
      rec.n = n;
      rec.algo = opts.algo;
      rec.backend = backend_name;
      records.push_back(std::move(rec));
    }
  }
  std::mt19937_64 rng(opts.seed);
  std::shuffle(tasks.begin(), tasks.end(), rng);

  // Warm the grammar preprocessing outside the timed region.
  std::vector<std::string> empty;
  detail::bench_once(session, opts, std::span<const std::string>(empty), nullptr);

  auto run_task = [&](const Task& task) {
    std::span<const std::string> prefix(strings[task.string_index].data(),
                                        static_cast<size_t>(task.n));
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < std::max(1, opts.repeats); ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      detail::bench_once(session, opts, prefix, nullptr);
      auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    auto& rec = records[task.record_index];
    rec.seconds = std::max(best, 1e-9);
    if (opts.count_ops) {
      OpCounter counter;
      detail::bench_once(session, opts, prefix, &counter);
      rec.ops = counter.total();
    }
  };

  if (opts.threads <= 1) {
    for (const auto& task : tasks) run_task(task);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    // Group tasks by string so a string's measurements stay on one thread.
    std::vector<std::vector<Task>> by_string(strings.size());
    for (const auto& t : tasks) by_string[t.string_index].push_back(t);
    for (int t = 0; t < opts.threads; ++t) {
      pool.emplace_back([&]() {
        for (size_t si = next.fetch_add(1); si < by_string.size(); si = next.fetch_add(1)) {
          for (const auto& task : by_string[si]) run_task(task);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return records;
}

/// RFC-4180-style CSV with header n,algo,backend,seconds,ops and a trailing
/// power-law summary comment over the n >= 1 records.
inline void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records) {
  out << "n,algo,backend,seconds,ops\n";
  for (const auto& r : records) {
    out << r.n << ',' << r.algo << ',' << r.backend << ','
        << format_significant(r.seconds, 9) << ',';
    if (r.ops.has_value()) out << *r.ops;
    out << '\n';
  }
  std::vector<std::pair<double, double>> points;
  for (const auto& r : records) {
    if (r.n >= 1) points.emplace_back(static_cast<double>(r.n), r.seconds);
  }
  try {
    auto fit = fit_power_law(points);
    out << "# fit a=" << format_significant(fit.a, 12) << " b=" << format_significant(fit.b, 12)
        << " r2=" << format_significant(fit.r_squared, 12) << '\n';
  } catch (const Error& e) {
    out << "# fit unavailable: " << e.what() << '\n';
  }
}

}  // namespace wcfg

#endif  // WCFG_BENCH_HPP_
