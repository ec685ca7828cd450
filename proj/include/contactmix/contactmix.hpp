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

#ifndef CONTACTMIX_CONTACTMIX_HPP
#define CONTACTMIX_CONTACTMIX_HPP

#include "contactmix/aggregate.hpp"
#include "contactmix/contacts.hpp"
#include "contactmix/engine.hpp"
#include "contactmix/report.hpp"
#include "contactmix/scenario.hpp"
#include "contactmix/trace.hpp"

#endif  // CONTACTMIX_CONTACTMIX_HPP
