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

#ifndef CACHEVOLT_CLI_HPP_
#define CACHEVOLT_CLI_HPP_

namespace cachevolt {

// Entry point behind main(). Exit codes:
//   0  success (including infeasible results without --strict)
//   1  unexpected failure
//   2  malformed input file or command line
//   3  coefficient fit failure (the message names the failure kind)
//   4  --strict and the requested budget is infeasible
//   5  missing miss-rate entry (the message names the absent pair)
int run_cli(int argc, char** argv);

}  // namespace cachevolt

#endif  // CACHEVOLT_CLI_HPP_
