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

#ifndef CACHEVOLT_ERRORS_HPP_
#define CACHEVOLT_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cachevolt {

// Root of the library's exception hierarchy. Everything thrown on purpose
// derives from this, so callers can catch cachevolt::Error at the boundary.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A value fell outside the bounds that the operation requires (e.g. a tox
// outside the grid handed to the area model).
class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& what) : Error(what) {}
};

// A knob value that must lie exactly on the grid does not.
class OffGridValue : public Error {
 public:
  explicit OffGridValue(const std::string& what) : Error(what) {}
};

// An Assignment does not line up with the CacheSpec it is applied to
// (missing component or off-grid point).
class AssignmentMismatch : public Error {
 public:
  explicit AssignmentMismatch(const std::string& what) : Error(what) {}
};

// A scheme expansion received the wrong number of class points.
class ArityMismatch : public Error {
 public:
  explicit ArityMismatch(const std::string& what) : Error(what) {}
};

// The exhaustive search would enumerate more candidates than the configured
// cap allows; the caller should fall back to the separable solver.
class EnumerationTooLarge : public Error {
 public:
  explicit EnumerationTooLarge(const std::string& what) : Error(what) {}
};

// Two cache specs that must share a knob grid do not.
class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& what) : Error(what) {}
};

// Base for everything the coefficient fitter can throw. `kind()` names the
// concrete failure so front-ends can report it without RTTI games.
class FitError : public Error {
 public:
  FitError(const std::string& kind, const std::string& what)
      : Error(kind + ": " + what), kind_(kind) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

class InsufficientSamples : public FitError {
 public:
  explicit InsufficientSamples(const std::string& what)
      : FitError("InsufficientSamples", what) {}
};

class DegenerateDesign : public FitError {
 public:
  explicit DegenerateDesign(const std::string& what)
      : FitError("DegenerateDesign", what) {}
};

class FitDiverged : public FitError {
 public:
  explicit FitDiverged(const std::string& what)
      : FitError("FitDiverged", what) {}
};

// A (l1_size, l2_size) pair was requested that the miss-rate table lacks.
class MissingMissRate : public Error {
 public:
  MissingMissRate(std::int64_t l1_bytes, std::int64_t l2_bytes)
      : Error("no miss-rate entry for (l1=" + std::to_string(l1_bytes) +
              " B, l2=" + std::to_string(l2_bytes) + " B)"),
        l1_bytes_(l1_bytes),
        l2_bytes_(l2_bytes) {}
  std::int64_t l1_bytes() const { return l1_bytes_; }
  std::int64_t l2_bytes() const { return l2_bytes_; }

 private:
  std::int64_t l1_bytes_;
  std::int64_t l2_bytes_;
};

// No L2 candidate admits any assignment meeting the access-time budget.
class NoFeasibleL2 : public Error {
 public:
  explicit NoFeasibleL2(const std::string& what) : Error(what) {}
};

// No L1 candidate admits any assignment meeting the access-time budget.
class NoFeasibleL1 : public Error {
 public:
  explicit NoFeasibleL1(const std::string& what) : Error(what) {}
};

// Malformed input file. Carries the path and (when known) the 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, int line, const std::string& what)
      : Error(path + (line > 0 ? ":" + std::to_string(line) : "") + ": " +
              what),
        path_(path),
        line_(line) {}
  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

}  // namespace cachevolt

#endif  // CACHEVOLT_ERRORS_HPP_
