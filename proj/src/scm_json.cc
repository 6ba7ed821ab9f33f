/*
 * Copyright 2026 The cfdro Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cfdro/scm_json.h"

#include <fstream>
#include <map>

#include "cfdro/error.h"

namespace cfdro {

using nlohmann::json;

namespace {

ExogenousSpec ParseExogenous(const json& j, const std::string& node) {
  const std::string dist = j.at("dist").get<std::string>();
  if (dist == "bernoulli") {
    const double p = j.at("p").get<double>();
    if (p < 0.0 || p > 1.0) throw SchemaError("node '" + node + "': bad Bernoulli p");
    return ExogenousSpec::Bernoulli(p);
  }
  if (dist == "normal") {
    const double variance = j.value("variance", 1.0);
    if (variance < 0.0) throw SchemaError("node '" + node + "': negative variance");
    return ExogenousSpec::Normal(j.value("mean", 0.0), variance);
  }
  throw SchemaError("node '" + node + "': unknown exogenous distribution '" + dist + "'");
}

}  // namespace

ScmDocument ScmFromJson(const json& doc) {
  try {
    if (doc.value("version", std::string()) != kScmSchemaVersion) {
      throw SchemaError(std::string("SCM file must declare version \"") +
                        kScmSchemaVersion + "\"");
    }
    const json& nodes_json = doc.at("nodes");
    std::map<std::string, int> index;
    for (size_t i = 0; i < nodes_json.size(); ++i) {
      const std::string name = nodes_json[i].at("name").get<std::string>();
      if (!index.emplace(name, static_cast<int>(i)).second) {
        throw SchemaError("duplicate node name '" + name + "'");
      }
    }
    auto lookup = [&](const std::string& name) {
      auto it = index.find(name);
      if (it == index.end()) throw SchemaError("unknown node '" + name + "'");
      return it->second;
    };

    std::vector<ScmNode> nodes;
    for (const json& nj : nodes_json) {
      ScmNode node;
      node.name = nj.at("name").get<std::string>();
      std::map<std::string, int> slot_of;
      for (const json& p : nj.value("parents", json::array())) {
        const std::string parent = p.get<std::string>();
        slot_of[parent] = static_cast<int>(node.parents.size());
        node.parents.push_back(lookup(parent));
      }
      const json eq = nj.value("equation", json{{"type", "root"}});
      const std::string type = eq.value("type", std::string("root"));
      if (type == "root") {
        if (!node.parents.empty()) {
          throw SchemaError("node '" + node.name + "' is a root but lists parents");
        }
      } else if (type == "linear") {
        node.equation = StructuralEquation::Linear(
            eq.at("coefficients").get<std::vector<double>>());
      } else if (type == "additive") {
        std::vector<StructuralEquation::Term> terms;
        for (const json& t : eq.at("terms")) {
          const std::string parent = t.at("parent").get<std::string>();
          auto it = slot_of.find(parent);
          if (it == slot_of.end()) {
            throw SchemaError("node '" + node.name + "' reads undeclared parent '" +
                              parent + "'");
          }
          terms.push_back({it->second, t.value("fn", std::string("identity")),
                           t.value("coef", 1.0)});
        }
        node.equation = StructuralEquation::Additive(std::move(terms));
      } else {
        throw SchemaError("node '" + node.name + "': unknown equation type '" + type +
                          "'");
      }
      if (nj.contains("exogenous")) {
        node.exogenous = ParseExogenous(nj.at("exogenous"), node.name);
      }
      nodes.push_back(std::move(node));
    }
    std::vector<int> sensitive;
    for (const json& s : doc.at("sensitive")) sensitive.push_back(lookup(s.get<std::string>()));
    return {Scm(std::move(nodes), std::move(sensitive)),
            doc.value("label", std::string("label"))};
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed SCM document: ") + e.what());
  }
}

json ScmToJson(const Scm& scm, const std::string& label) {
  json nodes = json::array();
  for (const ScmNode& node : scm.nodes()) {
    json nj;
    nj["name"] = node.name;
    json parents = json::array();
    for (int p : node.parents) parents.push_back(scm.node(p).name);
    nj["parents"] = parents;
    const StructuralEquation& eq = node.equation;
    switch (eq.kind()) {
      case StructuralEquation::Kind::kLinear:
        if (node.parents.empty()) {
          nj["equation"] = {{"type", "root"}};
        } else {
          nj["equation"] = {{"type", "linear"}, {"coefficients", eq.coefficients()}};
        }
        break;
      case StructuralEquation::Kind::kAdditive: {
        json terms = json::array();
        for (const auto& t : eq.terms()) {
          terms.push_back({{"parent", scm.node(node.parents[t.slot]).name},
                           {"fn", t.function},
                           {"coef", t.coefficient}});
        }
        nj["equation"] = {{"type", "additive"}, {"terms", terms}};
        break;
      }
      case StructuralEquation::Kind::kCustom:
        throw SchemaError("custom equation '" + eq.id() + "' on node '" + node.name +
                          "' cannot be serialized");
    }
    switch (node.exogenous.kind) {
      case ExogenousSpec::Kind::kBernoulli:
        nj["exogenous"] = {{"dist", "bernoulli"}, {"p", node.exogenous.mean}};
        break;
      case ExogenousSpec::Kind::kNormal:
        nj["exogenous"] = {{"dist", "normal"},
                           {"mean", node.exogenous.mean},
                           {"variance", node.exogenous.variance}};
        break;
      case ExogenousSpec::Kind::kNone:
        break;
    }
    nodes.push_back(nj);
  }
  json sensitive = json::array();
  for (int s : scm.sensitive()) sensitive.push_back(scm.node(s).name);
  return {{"version", kScmSchemaVersion},
          {"nodes", nodes},
          {"sensitive", sensitive},
          {"label", label}};
}

ScmDocument LoadScmFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open SCM file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw SchemaError("SCM file '" + path + "' is not valid JSON: " + e.what());
  }
  return ScmFromJson(doc);
}

void SaveScmFile(const Scm& scm, const std::string& path, const std::string& label) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write SCM file '" + path + "'");
  out << ScmToJson(scm, label).dump(2) << "\n";
}

}  // namespace cfdro
