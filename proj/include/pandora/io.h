// Copyright 2026 The Pandora Authors
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

#ifndef PANDORA_IO_H_
#define PANDORA_IO_H_

#include <iosfwd>
#include <string>

#include "pandora/instance.h"
#include "pandora/relaxation.h"

namespace pandora {

// Shortest representation that parses back to the same double; "inf",
// "-inf" and "nan" for non-finite values.
std::string format_double(double x);

// {"costs": [..], "scenarios": [{"prob": p, "volumes": [v | null, ..]}]}.
// Probabilities within 1e-6 of summing to one are renormalized; anything
// else, or an instance failing validate(), throws InvalidInstance.
PandoraInstance read_instance(std::istream& in);
PandoraInstance load_instance(const std::string& path);
void write_instance(std::ostream& out, const PandoraInstance& instance);

// {"universe": n, "sets": [[..], ..]}.
SetCoverInstance read_set_cover(std::istream& in);
SetCoverInstance load_set_cover(const std::string& path);

// {"step": d, "horizon": T, "X": [[..], ..]}.
void write_solution(std::ostream& out, const CpSolution& solution);
CpSolution read_solution(std::istream& in);
CpSolution load_solution(const std::string& path);

}  // namespace pandora

#endif  // PANDORA_IO_H_
