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

#ifndef CFDRO_SCM_JSON_H_
#define CFDRO_SCM_JSON_H_

// SCM definition files, schema "scm/1":
//
//   {
//     "version": "scm/1",
//     "nodes": [
//       {"name": "A", "parents": [],
//        "equation": {"type": "root"},
//        "exogenous": {"dist": "bernoulli", "p": 0.5}},
//       {"name": "X1", "parents": ["A"],
//        "equation": {"type": "linear", "coefficients": [2.0]},
//        "exogenous": {"dist": "normal", "mean": 0.0, "variance": 1.0}},
//       {"name": "X2", "parents": ["X1", "A"],
//        "equation": {"type": "additive",
//                     "terms": [{"parent": "X1", "fn": "tanh", "coef": 0.8},
//                               {"parent": "A", "fn": "identity", "coef": 1}]}}
//     ],
//     "sensitive": ["A"],
//     "label": "y"
//   }
//
// "exogenous" is optional (needed only for sampling). "label" names the label
// column used when the file backs a custom CSV schema. Custom closures cannot
// be serialized.

#include <string>

#include "cfdro/scm.h"
#include "json.hpp"

namespace cfdro {

inline constexpr char kScmSchemaVersion[] = "scm/1";

struct ScmDocument {
  Scm scm;
  std::string label = "label";
};

ScmDocument ScmFromJson(const nlohmann::json& doc);
nlohmann::json ScmToJson(const Scm& scm, const std::string& label = "label");
ScmDocument LoadScmFile(const std::string& path);
void SaveScmFile(const Scm& scm, const std::string& path,
                 const std::string& label = "label");

}  // namespace cfdro

#endif  // CFDRO_SCM_JSON_H_
