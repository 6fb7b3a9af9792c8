/*
   Copyright 2026 The LUCE Simulator Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#pragma once

#include <cstdint>

namespace luce {

/// Simulated time in integer milliseconds. All protocol timing (mining
/// latency, token expiry, renewal schedules) runs on this clock, never on
/// wall time, so large scenarios replay deterministically in real seconds.
using SimMillis = std::int64_t;

constexpr SimMillis sim_seconds(double s) { return static_cast<SimMillis>(s * 1000.0); }
constexpr SimMillis sim_hours(double h) { return sim_seconds(h * 3600.0); }
constexpr SimMillis sim_days(double d) { return sim_hours(d * 24.0); }

/// Two simulated weeks: the default token validity period T.
constexpr SimMillis kDefaultTokenPeriod = sim_seconds(1'209'600.0);

class SimClock {
 public:
  SimMillis now_ms() const { return now_; }
  double now_s() const { return static_cast<double>(now_) / 1000.0; }

  void advance(SimMillis delta) {
    if (delta > 0) now_ += delta;
  }

  /// Monotone: moving to an earlier instant is a no-op.
  void advance_to(SimMillis t) {
    if (t > now_) now_ = t;
  }

 private:
  SimMillis now_ = 0;
};

}  // namespace luce
