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

#include "pandora/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "pandora/errors.h"

namespace pandora {

using nlohmann::json;

namespace {

json parse(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInstance(std::string("malformed JSON: ") + e.what());
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open " + path);
  return in;
}

double number(const json& v, const char* what) {
  if (!v.is_number()) throw InvalidInstance(std::string(what) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidInstance(std::string(what) + " must be finite");
  return x;
}

// Numbers are written through format_double so files round-trip exactly.
void write_number(std::ostream& out, double x) {
  if (std::isinf(x)) {
    out << "null";
  } else {
    out << format_double(x);
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

PandoraInstance read_instance(std::istream& in) {
  const json doc = parse(in);
  if (!doc.is_object() || !doc.contains("costs") || !doc.contains("scenarios")) {
    throw InvalidInstance("instance needs costs and scenarios");
  }
  PandoraInstance inst;
  for (const auto& c : doc.at("costs")) inst.costs.push_back(number(c, "cost"));
  double total = 0.0;
  for (const auto& s : doc.at("scenarios")) {
    if (!s.is_object() || !s.contains("prob") || !s.contains("volumes")) {
      throw InvalidInstance("scenario needs prob and volumes");
    }
    ScenarioData sd;
    sd.probability = number(s.at("prob"), "prob");
    for (const auto& v : s.at("volumes")) {
      sd.volumes.push_back(v.is_null() ? kInfinite : number(v, "volume"));
    }
    total += sd.probability;
    inst.scenarios.push_back(std::move(sd));
  }
  if (std::abs(total - 1.0) <= 1e-6 && total > 0.0) {
    for (auto& sd : inst.scenarios) sd.probability /= total;
  }
  const auto problems = validate(inst);
  if (!problems.empty()) throw InvalidInstance("invalid instance: " + problems.front());
  return inst;
}

PandoraInstance load_instance(const std::string& path) {
  auto in = open_input(path);
  return read_instance(in);
}

void write_instance(std::ostream& out, const PandoraInstance& instance) {
  out << "{\"costs\": [";
  for (std::size_t i = 0; i < instance.costs.size(); ++i) {
    if (i) out << ", ";
    write_number(out, instance.costs[i]);
  }
  out << "], \"scenarios\": [";
  for (std::size_t s = 0; s < instance.scenarios.size(); ++s) {
    const auto& sd = instance.scenarios[s];
    if (s) out << ", ";
    out << "{\"prob\": ";
    write_number(out, sd.probability);
    out << ", \"volumes\": [";
    for (std::size_t i = 0; i < sd.volumes.size(); ++i) {
      if (i) out << ", ";
      write_number(out, sd.volumes[i]);
    }
    out << "]}";
  }
  out << "]}\n";
}

SetCoverInstance read_set_cover(std::istream& in) {
  const json doc = parse(in);
  if (!doc.is_object() || !doc.contains("universe") || !doc.contains("sets")) {
    throw InvalidInstance("set cover needs universe and sets");
  }
  SetCoverInstance sc;
  const auto& u = doc.at("universe");
  if (!u.is_number_integer() || u.get<long long>() < 0) {
    throw InvalidInstance("universe must be a nonnegative integer");
  }
  sc.universe_size = u.get<std::size_t>();
  for (const auto& set : doc.at("sets")) {
    std::vector<std::size_t> members;
    for (const auto& e : set) {
      if (!e.is_number_integer() || e.get<long long>() < 0) {
        throw InvalidInstance("set elements must be nonnegative integers");
      }
      members.push_back(e.get<std::size_t>());
    }
    sc.sets.push_back(std::move(members));
  }
  const auto problems = validate(sc);
  if (!problems.empty()) throw InvalidInstance("invalid set cover: " + problems.front());
  return sc;
}

SetCoverInstance load_set_cover(const std::string& path) {
  auto in = open_input(path);
  return read_set_cover(in);
}

void write_solution(std::ostream& out, const CpSolution& solution) {
  out << "{\"step\": ";
  write_number(out, solution.grid.step);
  out << ", \"horizon\": ";
  write_number(out, solution.grid.horizon);
  out << ", \"X\": [";
  for (std::size_t i = 0; i < solution.X.size(); ++i) {
    if (i) out << ", ";
    out << '[';
    for (std::size_t j = 0; j < solution.X[i].size(); ++j) {
      if (j) out << ", ";
      write_number(out, solution.X[i][j]);
    }
    out << ']';
  }
  out << "]}\n";
}

CpSolution read_solution(std::istream& in) {
  const json doc = parse(in);
  if (!doc.is_object() || !doc.contains("step") || !doc.contains("X")) {
    throw InvalidInstance("solution needs step and X");
  }
  CpSolution sol;
  sol.grid.step = number(doc.at("step"), "step");
  if (!(sol.grid.step > 0.0)) throw InvalidInstance("step must be positive");
  for (const auto& row : doc.at("X")) {
    std::vector<double> xi;
    for (const auto& v : row) xi.push_back(number(v, "X value"));
    sol.X.push_back(std::move(xi));
  }
  if (sol.X.empty() || sol.X.front().empty()) throw InvalidInstance("empty solution");
  for (const auto& xi : sol.X) {
    if (xi.size() != sol.X.front().size()) throw InvalidInstance("ragged solution");
  }
  sol.grid.points = sol.X.front().size() - 1;
  sol.grid.horizon = doc.contains("horizon")
                         ? number(doc.at("horizon"), "horizon")
                         : static_cast<double>(sol.grid.points) * sol.grid.step;
  return sol;
}

CpSolution load_solution(const std::string& path) {
  auto in = open_input(path);
  return read_solution(in);
}

}  // namespace pandora
