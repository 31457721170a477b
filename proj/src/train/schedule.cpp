// Copyright 2026 The chunkasr Authors
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

#include "chunkasr/train/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "chunkasr/errors.hpp"

namespace chunkasr {

void TriStageSchedule::validate() const {
  if (warmup_steps < 0 || hold_steps < 0 || decay_steps < 0) throw ConfigError("schedule: negative stage length");
  if (!(peak_lr > 0.0) || !std::isfinite(peak_lr)) throw ConfigError("schedule: peak_lr must be positive");
  if (!(floor_lr > 0.0) || floor_lr > peak_lr) throw ConfigError("schedule: floor_lr must be in (0, peak_lr]");
}

TriStageSchedule TriStageSchedule::spanning(std::int64_t total, double peak, double floor, double warmup_fraction,
                                            double hold_fraction) {
  TriStageSchedule s;
  s.peak_lr = peak;
  s.floor_lr = floor;
  s.warmup_steps = static_cast<std::int64_t>(std::llround(static_cast<double>(total) * warmup_fraction));
  s.hold_steps = static_cast<std::int64_t>(std::llround(static_cast<double>(total) * hold_fraction));
  s.decay_steps = std::max<std::int64_t>(0, total - s.warmup_steps - s.hold_steps);
  return s;
}

double lr_at(const TriStageSchedule& s, std::int64_t step) {
  if (step < 0) throw ConfigError("lr_at: negative step");
  const double init = 0.01 * s.peak_lr;
  if (step < s.warmup_steps)
    return init + (s.peak_lr - init) * static_cast<double>(step) / static_cast<double>(s.warmup_steps);
  step -= s.warmup_steps;
  if (step < s.hold_steps) return s.peak_lr;
  step -= s.hold_steps;
  if (step < s.decay_steps) {
    const double rate = std::log(s.floor_lr / s.peak_lr) / static_cast<double>(s.decay_steps);
    return s.peak_lr * std::exp(rate * static_cast<double>(step));
  }
  return s.floor_lr;
}

}  // namespace chunkasr
