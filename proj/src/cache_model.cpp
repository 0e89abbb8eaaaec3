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

#include "cachevolt/cache_model.hpp"

#include <string>

#include "cachevolt/errors.hpp"

namespace cachevolt {

const char* component_name(ComponentKind k) {
  switch (k) {
    case ComponentKind::kCellArray:
      return "cell_array";
    case ComponentKind::kDecoder:
      return "decoder";
    case ComponentKind::kAddressDrivers:
      return "address_drivers";
    case ComponentKind::kDataDrivers:
      return "data_drivers";
  }
  return "?";
}

bool is_core(ComponentKind k) { return k == ComponentKind::kCellArray; }

void CacheSpec::validate() const {
  if (size_bytes <= 0) throw OutOfRange("cache size must be positive");
  if (read_energy < 0) throw OutOfRange("read energy must be non-negative");
  grid.validate();
}

const char* scheme_name(SchemeKind s) {
  switch (s) {
    case SchemeKind::kSchemeI:
      return "scheme1";
    case SchemeKind::kSchemeII:
      return "scheme2";
    case SchemeKind::kSchemeIII:
      return "scheme3";
  }
  return "?";
}

SchemeKind scheme_from_name(const std::string& name) {
  if (name == "scheme1" || name == "1" || name == "I")
    return SchemeKind::kSchemeI;
  if (name == "scheme2" || name == "2" || name == "II")
    return SchemeKind::kSchemeII;
  if (name == "scheme3" || name == "3" || name == "III")
    return SchemeKind::kSchemeIII;
  throw ParseError("<scheme>", 0,
                   "unknown scheme '" + name +
                       "' (expected scheme1|scheme2|scheme3)");
}

std::vector<std::vector<ComponentKind>> scheme_classes(SchemeKind s) {
  switch (s) {
    case SchemeKind::kSchemeI:
      return {{ComponentKind::kCellArray},
              {ComponentKind::kDecoder},
              {ComponentKind::kAddressDrivers},
              {ComponentKind::kDataDrivers}};
    case SchemeKind::kSchemeII:
      return {{ComponentKind::kCellArray},
              {ComponentKind::kDecoder, ComponentKind::kAddressDrivers,
               ComponentKind::kDataDrivers}};
    case SchemeKind::kSchemeIII:
      return {{ComponentKind::kCellArray, ComponentKind::kDecoder,
               ComponentKind::kAddressDrivers, ComponentKind::kDataDrivers}};
  }
  return {};
}

Assignment expand_scheme(SchemeKind s,
                         const std::vector<TechPoint>& class_points) {
  const auto classes = scheme_classes(s);
  if (class_points.size() != classes.size())
    throw ArityMismatch(std::string(scheme_name(s)) + " takes " +
                        std::to_string(classes.size()) + " class points, got " +
                        std::to_string(class_points.size()));
  Assignment asg{};
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (ComponentKind k : classes[c])
      asg[static_cast<int>(k)] = class_points[c];
  return asg;
}

namespace {

void check_on_grid(const CacheSpec& spec, const Assignment& asg) {
  for (ComponentKind k : kAllComponents) {
    const TechPoint& p = at(asg, k);
    if (!spec.grid.contains(p))
      throw AssignmentMismatch(std::string(component_name(k)) + " point (" +
                               std::to_string(p.vth) + " V, " +
                               std::to_string(p.tox) +
                               " A) is off the cache grid");
  }
}

}  // namespace

double cache_leakage(const CacheSpec& spec, const Assignment& asg) {
  check_on_grid(spec, asg);
  double total = 0.0;
  for (ComponentKind k : kAllComponents)
    total += eval_leakage(spec.model(k).leakage, at(asg, k));
  return total;
}

double cache_delay(const CacheSpec& spec, const Assignment& asg) {
  check_on_grid(spec, asg);
  double total = 0.0;
  for (ComponentKind k : kAllComponents)
    total += eval_delay(spec.model(k).delay, at(asg, k));
  return total;
}

}  // namespace cachevolt
