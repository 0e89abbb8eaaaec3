// Copyright 2026 The Cachevolt Authors
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

#ifndef CACHEVOLT_CACHE_MODEL_HPP_
#define CACHEVOLT_CACHE_MODEL_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cachevolt/tech_model.hpp"

namespace cachevolt {

// The four modeled cache components. CellArray (memory cells + sense
// amplifiers) is the "core"; the other three are "peripheral" circuitry.
enum class ComponentKind : int {
  kCellArray = 0,
  kDecoder = 1,
  kAddressDrivers = 2,
  kDataDrivers = 3,
};

inline constexpr int kComponentCount = 4;

inline constexpr std::array<ComponentKind, kComponentCount> kAllComponents = {
    ComponentKind::kCellArray,
    ComponentKind::kDecoder,
    ComponentKind::kAddressDrivers,
    ComponentKind::kDataDrivers,
};

const char* component_name(ComponentKind k);
bool is_core(ComponentKind k);

// A full cache description: four fitted component models plus the knob grid
// they were characterized on and the per-access read energy used by the
// hierarchy-level dynamic-energy model.
struct CacheSpec {
  std::string name;
  std::int64_t size_bytes = 0;
  std::array<ComponentModel, kComponentCount> models;  // indexed by kind
  double read_energy = 0.0;  // joules per access
  TechGrid grid;

  const ComponentModel& model(ComponentKind k) const {
    return models[static_cast<int>(k)];
  }
  ComponentModel& model(ComponentKind k) {
    return models[static_cast<int>(k)];
  }

  void validate() const;  // throws OutOfRange on bad size/energy/grid
};

// One knob setting per component, indexed by ComponentKind.
using Assignment = std::array<TechPoint, kComponentCount>;

inline const TechPoint& at(const Assignment& a, ComponentKind k) {
  return a[static_cast<int>(k)];
}

// Knob-sharing granularity: one independent pair per component (SchemeI),
// a core pair plus one pair shared by the three peripherals (SchemeII),
// or a single pair for the whole cache (SchemeIII).
enum class SchemeKind : int {
  kSchemeI = 0,
  kSchemeII = 1,
  kSchemeIII = 2,
};

const char* scheme_name(SchemeKind s);
SchemeKind scheme_from_name(const std::string& name);  // throws ParseError

// The sharing classes of a scheme, each listing its member components in
// declaration order. SchemeI: four singleton classes. SchemeII:
// [{CellArray}, {Decoder, AddressDrivers, DataDrivers}]. SchemeIII: one
// class of all four.
std::vector<std::vector<ComponentKind>> scheme_classes(SchemeKind s);

// Builds the full Assignment from one point per sharing class.
// class_points.size() must equal the scheme's class count.
Assignment expand_scheme(SchemeKind s,
                         const std::vector<TechPoint>& class_points);

// Total leakage / access delay: the sum of the four per-component model
// evaluations. Throws AssignmentMismatch when a point is off the grid.
double cache_leakage(const CacheSpec& spec, const Assignment& asg);
double cache_delay(const CacheSpec& spec, const Assignment& asg);

}  // namespace cachevolt

#endif  // CACHEVOLT_CACHE_MODEL_HPP_
