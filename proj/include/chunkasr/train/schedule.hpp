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

#pragma once

#include <cstdint>

namespace chunkasr {

/// Tri-stage learning rate: linear warmup from 0.01 * peak, constant hold,
/// exponential decay to `floor_lr`, then flat at the floor.
struct TriStageSchedule {
  std::int64_t warmup_steps = 0;
  std::int64_t hold_steps = 0;
  std::int64_t decay_steps = 0;
  double peak_lr = 3e-3;
  double floor_lr = 1.5e-4;

  void validate() const;

  /// Splits `total_steps` into warmup/hold/decay by the given fractions.
  static TriStageSchedule spanning(std::int64_t total_steps, double peak_lr, double floor_lr,
                                   double warmup_fraction = 0.1, double hold_fraction = 0.4);
};

double lr_at(const TriStageSchedule& s, std::int64_t step);

}  // namespace chunkasr
