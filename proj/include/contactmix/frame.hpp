// Copyright 2026 The contactmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONTACTMIX_FRAME_HPP
#define CONTACTMIX_FRAME_HPP

#include <vector>

#include "contactmix/geometry.hpp"

namespace contactmix {

struct FrameEntry {
  AgentId id = 0;
  TypeIndex type = 0;
  Vec2 position;
  friend bool operator==(const FrameEntry&, const FrameEntry&) = default;
};

/// Positions of every present agent at one contact-sampling tick, sorted by id.
struct TickFrame {
  Tick tick = 0;
  std::vector<FrameEntry> entries;
  friend bool operator==(const TickFrame&, const TickFrame&) = default;
};

}  // namespace contactmix

#endif  // CONTACTMIX_FRAME_HPP
